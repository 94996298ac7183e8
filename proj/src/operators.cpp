#include "kantolab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "kantolab/errors.hpp"
#include "kantolab/format.hpp"

namespace kantolab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double integrate_function(const IntervalFunction& f, double lo, double hi, const quad::Options& opts) {
  if (lo == hi) return 0.0;
  if (lo > hi) return -integrate_function(f, hi, lo, opts);
  const auto pts = f.breakpoints(lo, hi);
  const quad::Integrand g = [&](double x) { return f(x); };
  double total = 0.0;
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    const bool sl = f.is_singular_at(pts[i]), sr = f.is_singular_at(pts[i + 1]);
    if (sl || sr) {
      auto r = quad::integrate_singular(g, pts[i], pts[i + 1], sl, sr, opts);
      if (r.diverged) throw NumericalFailure("integral of '" + f.name() + "' diverges near a singular point");
      total += r.value;
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j + 1 < pts.size() && !f.is_singular_at(pts[j])) ++j;
    if (f.is_singular_at(pts[j]) && j > i + 1) --j;
    auto r = quad::integrate(g, std::span<const double>(pts.data() + i, j - i + 1), opts);
    if (!r.finite) throw NumericalFailure("integral of '" + f.name() + "' is not finite");
    total += r.value;
    i = j;
  }
  return total;
}

std::vector<double> cell_averages(const IntervalFunction& f, int n, const quad::Options& opts) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const long k0 = static_cast<long>(std::ceil(n * f.a()));
  const long k1 = static_cast<long>(std::floor(n * f.b())) - 1;
  if (k0 > k1) throw std::invalid_argument("empty index range ceil(na) > floor(nb) - 1");
  std::vector<double> avg;
  avg.reserve(k1 - k0 + 1);
  for (long k = k0; k <= k1; ++k) {
    const double lo = static_cast<double>(k) / n, hi = static_cast<double>(k + 1) / n;
    double v = n * integrate_function(f, lo, hi, opts);
    // A cell where f is sampled constant keeps that exact value.
    const double c = f(0.5 * (lo + hi));
    if (std::abs(v - c) <= 1e-14 * std::max(1.0, std::abs(c))) {
      bool same = true;
      for (int i = 1; i < 16 && same; ++i) same = f(lo + (hi - lo) * i / 16.0) == c;
      if (same) v = c;
    }
    avg.push_back(v);
  }
  return avg;
}

KantorovichOperator::KantorovichOperator(const DensityKernel& kernel, const IntervalFunction& f, int n,
                                         const quad::Options& opts) {
  auto d = std::make_shared<Data>();
  d->kernel = kernel;
  d->n = n;
  d->a = f.a();
  d->b = f.b();
  d->k0 = static_cast<long>(std::ceil(n * f.a()));
  d->avg = cell_averages(f, n, opts);
  d_ = std::move(d);
}

template <class F>
void KantorovichOperator::for_each_term(double x, F&& fn) const {
  const double nx = d_->n * x;
  const long k1 = k_last();
  long lo = d_->k0, hi = k1;
  const double r = d_->kernel.sum_radius;
  if (std::isfinite(r)) {
    lo = std::max(lo, static_cast<long>(std::ceil(nx - r)));
    hi = std::min(hi, static_cast<long>(std::floor(nx + r)));
  }
  for (long k = lo; k <= hi; ++k) fn(k, nx - static_cast<double>(k));
}

double KantorovichOperator::denominator(double x) const {
  double s = 0.0;
  for_each_term(x, [&](long, double t) { s += d_->kernel(t); });
  return s;
}

namespace {

long centre_index(double nx, long k0, long k1) {
  return std::clamp(static_cast<long>(std::floor(nx)), k0, k1);
}

}  // namespace

double KantorovichOperator::operator()(double x) const {
  const long j = centre_index(d_->n * x, d_->k0, k_last());
  const double cj = d_->avg[j - d_->k0];
  double num = 0.0, den = 0.0;
  for_each_term(x, [&](long k, double t) {
    const double w = d_->kernel(t);
    den += w;
    num += (d_->avg[k - d_->k0] - cj) * w;
  });
  if (x >= d_->a && x <= d_->b && !(den >= d_->kernel.phi_at_2 - 1e-12))
    throw NumericalFailure("operator denominator " + format_double(den) + " below phi(2) = " +
                           format_double(d_->kernel.phi_at_2));
  return cj + num / den;
}

double KantorovichOperator::derivative(double x) const {
  if (!d_->kernel.has_derivative())
    throw HypothesisNotMet("kernel '" + d_->kernel.id() + "' has no derivative");
  const long j = centre_index(d_->n * x, d_->k0, k_last());
  const double cj = d_->avg[j - d_->k0];
  double den = 0.0, dden = 0.0, num = 0.0, dnum = 0.0;
  for_each_term(x, [&](long k, double t) {
    const double w = d_->kernel(t);
    const double dw = d_->kernel.derivative(t);
    const double e = d_->avg[k - d_->k0] - cj;
    den += w;
    dden += dw;
    num += e * w;
    dnum += e * dw;
  });
  return d_->n * (dnum * den - num * dden) / (den * den);
}

IntervalFunction KantorovichOperator::as_function() const {
  IntervalFunction::Spec s;
  s.a = d_->a;
  s.b = d_->b;
  auto self = *this;
  s.eval = [self](double x) { return self(x); };
  if (d_->kernel.has_derivative()) s.derivative = [self](double x) { return self.derivative(x); };
  for (double kappa : d_->kernel.kinks)
    for (long k = d_->k0; k <= k_last(); ++k) {
      const double x = (static_cast<double>(k) + kappa) / d_->n;
      if (x > s.a && x < s.b) s.kinks.push_back(x);
    }
  s.name = "K" + std::to_string(d_->n);
  return IntervalFunction(std::move(s));
}

double apply(const DensityKernel& kernel, const IntervalFunction& f, int n, double x) {
  return KantorovichOperator(kernel, f, n)(x);
}

double apply_derivative(const DensityKernel& kernel, const IntervalFunction& f, int n, double x) {
  if (!kernel.has_derivative()) throw HypothesisNotMet("kernel '" + kernel.id() + "' has no derivative");
  return KantorovichOperator(kernel, f, n).derivative(x);
}

IntervalFunction steklov(const IntervalFunction& f, int k, double h, const quad::Options& opts) {
  if (k != 1 && k != 2) throw std::invalid_argument("Steklov functions are implemented for k = 1, 2");
  if (!(h > 0.0) || h > f.period() / k * (1 + 1e-12)) throw std::invalid_argument("Steklov: need 0 < h <= (b - a)/k");
  IntervalFunction::Spec s;
  s.a = f.a();
  s.b = f.b();
  std::vector<double> base = f.kinks();
  base.push_back(f.a());
  base.insert(base.end(), f.singular().begin(), f.singular().end());
  for (int m = 0; m <= k; ++m)
    for (double p : base) s.kinks.push_back(p - m * h);
  s.name = f.name() + "_steklov" + std::to_string(k);
  if (k == 1) {
    s.eval = [f, h, opts](double x) { return integrate_function(f, x, x + h, opts) / h; };
    s.derivative = [f, h](double x) { return (f(x + h) - f(x)) / h; };
    for (double p : f.singular())
      for (double q : {p, p - h}) s.derivative_singular.push_back(q);
  } else {
    auto rule = std::make_shared<quad::GaussLegendre>(32);
    s.eval = [f, h, rule](double x) {
      const auto t = rule->nodes();
      const auto w = rule->weights();
      double acc = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double ti = 0.5 * h * (t[i] + 1.0);
        for (std::size_t j = 0; j < t.size(); ++j) {
          const double tj = 0.5 * h * (t[j] + 1.0);
          acc += w[i] * w[j] * (2.0 * f(x + 0.5 * (ti + tj)) - f(x + ti + tj));
        }
      }
      return 0.25 * acc;  // (h/2)^2 / h^2
    };
  }
  return IntervalFunction(std::move(s));
}

double hl_maximal(const IntervalFunction& f, double x, const quad::Options& opts) {
  const IntervalFunction g = f.absolute();
  const double a = f.a(), b = f.b(), w = b - a;

  auto ratio_at = [&](double u) { return std::abs(integrate_function(g, x, u, opts)) / std::abs(u - x); };

  auto sweep = [&](int N) {
    std::vector<double> us;
    us.reserve(N + 64);
    for (int i = 0; i <= N; ++i) us.push_back(a + w * i / N);
    for (int e = 2; e <= 8; ++e)
      for (double sgn : {-1.0, 1.0}) {
        const double u = x + sgn * w * std::pow(10.0, -e);
        if (u >= a && u <= b) us.push_back(u);
      }
    for (double p : f.breakpoints(a, b)) us.push_back(p);
    us.push_back(x);
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    // cumulative integral of |f| along the sorted points
    std::vector<double> cum(us.size(), 0.0);
    for (std::size_t i = 1; i < us.size(); ++i) cum[i] = cum[i - 1] + integrate_function(g, us[i - 1], us[i], opts);
    const auto ix = std::lower_bound(us.begin(), us.end(), x) - us.begin();
    double best = 0.0, best_u = x;
    for (std::size_t i = 0; i < us.size(); ++i) {
      if (us[i] == x) continue;
      const double r = std::abs(cum[i] - cum[ix]) / std::abs(us[i] - x);
      if (r > best) {
        best = r;
        best_u = us[i];
      }
    }
    // golden-section polish between the neighbouring grid points
    const double step = w / N;
    double lo = std::max(a, best_u - step), hi = std::min(b, best_u + step);
    if (x > lo && x < hi) (best_u < x ? hi : lo) = x;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    if (hi - lo > 0 && x1 != x && x2 != x) {
      double f1 = ratio_at(x1), f2 = ratio_at(x2);
      for (int it = 0; it < 30; ++it) {
        if (f1 < f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          if (x2 == x) break;
          f2 = ratio_at(x2);
        } else {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          if (x1 == x) break;
          f1 = ratio_at(x1);
        }
      }
      best = std::max({best, f1, f2});
    }
    return best;
  };

  int N = 2048;
  double prev = sweep(N);
  for (int level = 0; level < 3; ++level) {
    N *= 2;
    const double cur = sweep(N);
    const bool done = cur - prev <= 0.005 * cur;
    prev = std::max(prev, cur);
    if (done) break;
  }
  return prev;
}

void dump_operator(const KantorovichOperator& op, const IntervalFunction& f, std::span<const double> xs,
                   std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"x", "f", "Knf", "dKnf"});
  for (double x : xs) {
    const double d = op.kernel().has_derivative() ? op.derivative(x) : kNaN;
    csv.row({format_double(x), format_double(f(x)), format_double(op(x)), format_double(d)});
  }
}

}  // namespace kantolab
