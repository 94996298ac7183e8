#include "kantolab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace kantolab::quad {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  const int n = order;
  nodes_.assign(n, 0.0);
  weights_.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      const double pn = (n == 1) ? x : p1;
      const double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double pn = (n == 1) ? x : p1;
    const double pn1 = (n == 1) ? 1.0 : p0;
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussLegendre& local_rule() {
  static const GaussLegendre rule(10);
  return rule;
}

namespace {

struct Segment {
  double a, b;
  double coarse;
  double left, right;
  double err;
  int depth;
  double fine() const { return left + right; }
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.err < y.err; }
};

class Evaluator {
 public:
  explicit Evaluator(const Integrand& f) : f_(f) {}

  double operator()(double x) {
    ++count;
    const double v = f_(x);
    if (!std::isfinite(v)) {
      finite = false;
      if (std::isnan(v)) nan = true;
    }
    return v;
  }

  std::size_t count = 0;
  bool finite = true;
  bool nan = false;

 private:
  const Integrand& f_;
};

Segment make_segment(Evaluator& ev, double a, double b, double coarse, int depth) {
  const auto& rule = local_rule();
  const double m = 0.5 * (a + b);
  Segment s{a, b, coarse, 0.0, 0.0, 0.0, depth};
  s.left = rule.apply(ev, a, m);
  s.right = rule.apply(ev, m, b);
  s.err = std::abs(s.coarse - s.fine());
  return s;
}

Result nonfinite_result(const Evaluator& ev) {
  Result r;
  r.finite = false;
  r.converged = false;
  r.value = ev.nan ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
  r.error = std::numeric_limits<double>::infinity();
  r.evaluations = ev.count;
  return r;
}

}  // namespace

Result integrate(const Integrand& f, std::span<const double> points, const Options& opts) {
  std::vector<double> pts(points.begin(), points.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Result result;
  if (pts.size() < 2) return result;

  Evaluator ev(f);
  const auto& rule = local_rule();
  std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
  std::vector<Segment> frozen;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    const double coarse = rule.apply(ev, pts[i], pts[i + 1]);
    heap.push(make_segment(ev, pts[i], pts[i + 1], coarse, 0));
  }
  if (!ev.finite) return nonfinite_result(ev);

  auto totals = [&]() {
    double value = 0.0, err = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      value += copy.top().fine();
      err += copy.top().err;
      copy.pop();
    }
    for (const auto& s : frozen) {
      value += s.fine();
      err += s.err;
    }
    return std::pair{value, err};
  };

  auto [total, total_err] = totals();
  std::size_t splits = 0;
  while (!heap.empty()) {
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (total_err <= tol) break;
    if (heap.size() + frozen.size() >= opts.max_intervals) break;
    Segment s = heap.top();
    heap.pop();
    if (s.depth >= opts.max_depth) {
      frozen.push_back(s);
      continue;
    }
    const double m = 0.5 * (s.a + s.b);
    Segment l = make_segment(ev, s.a, m, s.left, s.depth + 1);
    Segment r = make_segment(ev, m, s.b, s.right, s.depth + 1);
    if (!ev.finite) return nonfinite_result(ev);
    total += l.fine() + r.fine() - s.fine();
    total_err += l.err + r.err - s.err;
    heap.push(l);
    heap.push(r);
    if (++splits % 4096 == 0) std::tie(total, total_err) = totals();
  }
  std::tie(total, total_err) = totals();
  result.value = total;
  result.error = total_err;
  result.converged = total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  result.evaluations = ev.count;
  return result;
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  if (a == b) return Result{};
  if (a > b) {
    const double pts[] = {b, a};
    Result r = integrate(f, pts, opts);
    r.value = -r.value;
    return r;
  }
  const double pts[] = {a, b};
  return integrate(f, pts, opts);
}

namespace {

// f_off(d) = f(end + dir * d) for d in (0, width]; the singularity sits at d = 0.
SingularResult one_sided(const Integrand& f_off, double width, double end_abs, const Options& opts) {
  SingularResult out;
  const double scale = std::min(1.0, 0.5 * width);
  constexpr std::size_t kLevels = std::size(kSingularLadder);
  double eps[kLevels];
  for (std::size_t k = 0; k < kLevels; ++k) eps[k] = scale * kSingularLadder[k];

  Result main = integrate(f_off, eps[0], width, opts);
  out.evaluations += main.evaluations;
  if (!main.finite) {
    out.diverged = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.converged = main.converged;
  double cumulative = main.value;
  out.trend.push_back(cumulative);
  double increments[kLevels - 1];
  for (std::size_t k = 0; k + 1 < kLevels; ++k) {
    Result panel = integrate(f_off, eps[k + 1], eps[k], opts);
    out.evaluations += panel.evaluations;
    if (!panel.finite) {
      out.diverged = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    increments[k] = panel.value;
    cumulative += panel.value;
    out.trend.push_back(cumulative);
  }

  // Constant (log) or growing increments per decade: not integrable.
  bool flat_or_growing = true;
  for (std::size_t k = 0; k + 2 < kLevels; ++k) {
    const double prev = std::abs(increments[k]);
    const double next = std::abs(increments[k + 1]);
    if (!(prev > 0.0) || next < 0.98 * prev) flat_or_growing = false;
  }
  if (flat_or_growing || std::abs(cumulative) > 1e12) {
    out.diverged = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }

  // Innermost piece via d = eps * e^{-s}, truncated where d falls below the
  // resolution of the abscissa.
  const double inner = eps[kLevels - 1];
  const double floor_abs = std::max(std::abs(end_abs) * 8.0 * std::numeric_limits<double>::epsilon(),
                                    1e-280);
  const double s_max = std::clamp(std::log(inner / floor_abs), 0.0, 600.0);
  if (s_max > 0.0) {
    auto mapped = [&](double s) {
      const double d = inner * std::exp(-s);
      return f_off(d) * d;
    };
    Result tail = integrate(mapped, 0.0, s_max, opts);
    out.evaluations += tail.evaluations;
    if (!tail.finite) {
      out.diverged = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.converged = out.converged && tail.converged;
    cumulative += tail.value;
  }
  out.value = cumulative;
  return out;
}

}  // namespace

SingularResult integrate_singular(const Integrand& f, double a, double b, bool singular_left,
                                  bool singular_right, const Options& opts) {
  if (!(b > a)) return SingularResult{};
  if (!singular_left && !singular_right) {
    Result r = integrate(f, a, b, opts);
    SingularResult out;
    out.value = r.value;
    out.converged = r.converged;
    out.diverged = !r.finite;
    out.evaluations = r.evaluations;
    out.trend.assign(std::size(kSingularLadder), r.value);
    return out;
  }
  if (singular_left && singular_right) {
    const double m = 0.5 * (a + b);
    SingularResult l = integrate_singular(f, a, m, true, false, opts);
    SingularResult r = integrate_singular(f, m, b, false, true, opts);
    SingularResult out;
    out.diverged = l.diverged || r.diverged;
    out.converged = l.converged && r.converged;
    out.value = out.diverged ? std::numeric_limits<double>::infinity() : l.value + r.value;
    out.evaluations = l.evaluations + r.evaluations;
    for (std::size_t k = 0; k < std::min(l.trend.size(), r.trend.size()); ++k)
      out.trend.push_back(l.trend[k] + r.trend[k]);
    return out;
  }
  if (singular_left) {
    auto f_off = [&](double d) { return f(a + d); };
    return one_sided(f_off, b - a, a, opts);
  }
  auto f_off = [&](double d) { return f(b - d); };
  return one_sided(f_off, b - a, b, opts);
}

}  // namespace kantolab::quad
