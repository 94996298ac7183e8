#include "kantolab/interval_function.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace kantolab {

namespace {

constexpr double kPointTol = 1e-12;

std::vector<double> reduced_points(const std::vector<double>& pts, double a, double b) {
  const double p = b - a;
  std::vector<double> out;
  out.reserve(pts.size());
  for (double x : pts) {
    double r = x - p * std::floor((x - a) / p);
    if (r >= b || std::abs(r - b) <= kPointTol * p) r = a;
    out.push_back(r);
  }
  return merge_points(std::move(out), p);
}

std::vector<double> shift_points(const std::vector<double>& pts, double h) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (double x : pts) out.push_back(x - h);
  return out;
}

std::vector<double> concat(std::vector<double> x, const std::vector<double>& y) {
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

}  // namespace

std::vector<double> merge_points(std::vector<double> pts, double scale) {
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts) {
    if (!out.empty() && std::abs(x - out.back()) <= kPointTol * scale) continue;
    out.push_back(x);
  }
  return out;
}

IntervalFunction::IntervalFunction(Spec spec) {
  if (!(spec.a < spec.b)) throw std::invalid_argument("IntervalFunction needs a < b");
  if (!spec.eval) throw std::invalid_argument("IntervalFunction needs an evaluator");
  spec.kinks = reduced_points(spec.kinks, spec.a, spec.b);
  spec.singular = reduced_points(spec.singular, spec.a, spec.b);
  spec.derivative_singular = reduced_points(spec.derivative_singular, spec.a, spec.b);
  d_ = std::make_shared<const Spec>(std::move(spec));
}

IntervalFunction::IntervalFunction(double a, double b, RealMap eval, RealMap derivative,
                                   std::vector<double> kinks)
    : IntervalFunction(Spec{a, b, std::move(eval), std::move(derivative), std::move(kinks), {}, {}, {}}) {}

double IntervalFunction::reduce(double x) const {
  const double a = d_->a, b = d_->b;
  if (x >= a && x <= b) return x;
  const double p = b - a;
  double r = x - p * std::floor((x - a) / p);
  if (r >= b) r -= p;
  if (r < a) r = a;
  return r;
}

double IntervalFunction::derivative(double x) const {
  if (!d_->derivative) throw std::logic_error("function '" + d_->name + "' has no derivative");
  return d_->derivative(reduce(x));
}

IntervalFunction IntervalFunction::derivative_function() const {
  if (!d_->derivative) throw std::logic_error("function '" + d_->name + "' has no derivative");
  Spec s;
  s.a = d_->a;
  s.b = d_->b;
  s.eval = d_->derivative;
  s.kinks = d_->kinks;
  s.singular = concat(d_->singular, d_->derivative_singular);
  s.name = d_->name + "'";
  return IntervalFunction(std::move(s));
}

std::vector<double> IntervalFunction::breakpoints(double lo, double hi) const {
  const double p = period();
  std::vector<double> base = concat(d_->kinks, d_->singular);
  base.push_back(d_->a);
  std::vector<double> pts{lo, hi};
  for (double x : base) {
    const double m0 = std::floor((lo - x) / p);
    for (double m = m0; x + m * p <= hi; m += 1.0) {
      const double y = x + m * p;
      if (y > lo && y < hi) pts.push_back(y);
    }
  }
  pts = merge_points(std::move(pts), p);
  // keep the exact endpoints
  pts.front() = lo;
  pts.back() = hi;
  if (pts.size() >= 2 && pts[pts.size() - 2] >= hi) pts.erase(pts.end() - 2);
  return pts;
}

bool IntervalFunction::is_singular_at(double x) const {
  const double p = period();
  for (double s : d_->singular) {
    const double t = (x - s) / p;
    if (std::abs(t - std::round(t)) * p <= kPointTol * p) return true;
  }
  return false;
}

IntervalFunction IntervalFunction::shifted(double h) const {
  if (h == 0.0) return *this;
  Spec s;
  s.a = d_->a;
  s.b = d_->b;
  auto self = *this;
  s.eval = [self, h](double x) { return self(x + h); };
  if (d_->derivative) s.derivative = [self, h](double x) { return self.derivative(x + h); };
  std::vector<double> k = d_->kinks;
  k.push_back(d_->a);
  s.kinks = shift_points(k, h);
  s.singular = shift_points(d_->singular, h);
  s.derivative_singular = shift_points(d_->derivative_singular, h);
  s.name = d_->name;
  return IntervalFunction(std::move(s));
}

IntervalFunction IntervalFunction::scaled(double c) const {
  Spec s = *d_;
  auto self = *this;
  s.eval = [self, c](double x) { return c * self(x); };
  if (d_->derivative) s.derivative = [self, c](double x) { return c * self.derivative(x); };
  return IntervalFunction(std::move(s));
}

IntervalFunction IntervalFunction::absolute() const {
  Spec s = *d_;
  auto self = *this;
  s.eval = [self](double x) { return std::abs(self(x)); };
  s.derivative = {};
  return IntervalFunction(std::move(s));
}

IntervalFunction IntervalFunction::memoized() const {
  Spec s = *d_;
  auto self = *this;
  auto cache = std::make_shared<std::unordered_map<std::uint64_t, double>>();
  s.eval = [self, cache](double x) {
    const auto key = std::bit_cast<std::uint64_t>(x);
    if (auto it = cache->find(key); it != cache->end()) return it->second;
    const double v = self(x);
    cache->emplace(key, v);
    return v;
  };
  return IntervalFunction(std::move(s));
}

IntervalFunction IntervalFunction::renamed(std::string name) const {
  Spec s = *d_;
  s.name = std::move(name);
  return IntervalFunction(std::move(s));
}

namespace {

IntervalFunction combine(const IntervalFunction& f, const IntervalFunction& g, double sign) {
  if (f.a() != g.a() || f.b() != g.b()) throw std::invalid_argument("functions live on different intervals");
  IntervalFunction::Spec s;
  s.a = f.a();
  s.b = f.b();
  s.eval = [f, g, sign](double x) { return f(x) + sign * g(x); };
  if (f.has_derivative() && g.has_derivative())
    s.derivative = [f, g, sign](double x) { return f.derivative(x) + sign * g.derivative(x); };
  s.kinks = concat(f.kinks(), g.kinks());
  s.singular = concat(f.singular(), g.singular());
  s.derivative_singular = concat(f.spec().derivative_singular, g.spec().derivative_singular);
  s.name = f.name() + (sign > 0 ? "+" : "-") + g.name();
  return IntervalFunction(std::move(s));
}

}  // namespace

IntervalFunction operator+(const IntervalFunction& f, const IntervalFunction& g) { return combine(f, g, 1.0); }
IntervalFunction operator-(const IntervalFunction& f, const IntervalFunction& g) { return combine(f, g, -1.0); }

IntervalFunction finite_difference(const IntervalFunction& f, double h, int k) {
  if (k < 1) throw std::invalid_argument("difference order must be >= 1");
  IntervalFunction out = f.shifted(k * h);
  double binom = 1.0;
  for (int j = k - 1; j >= 0; --j) {
    binom = binom * (j + 1) / (k - j);  // C(k, j)
    const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
    out = out + f.shifted(j * h).scaled(sign * binom);
  }
  return out;
}

}  // namespace kantolab
