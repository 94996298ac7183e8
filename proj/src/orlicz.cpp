#include "kantolab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kantolab/errors.hpp"
#include "kantolab/format.hpp"

namespace kantolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double get_param(const Params& given, const std::string& key, double fallback) {
  for (const auto& [k, v] : given)
    if (k == key) return v;
  return fallback;
}

void check_keys(const std::string& name, const Params& given, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : given) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("phi '" + name + "' has no parameter '" + k + "'");
  }
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string PhiFunction::id() const {
  std::string s = name;
  for (std::size_t i = 0; i < params.size(); ++i) {
    s += (i == 0 ? ':' : ',');
    s += params[i].first + "=" + format_double(params[i].second);
  }
  return s;
}

double PhiFunction::param(const std::string& key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw std::out_of_range("phi '" + name + "' has no parameter '" + key + "'");
}

std::vector<std::string> phi_catalog() {
  return {"power", "zygmund", "exp", "exp_taylor", "cosh", "llogl", "plog_quotient"};
}

PhiFunction make_phi(const std::string& name, const Params& given) {
  PhiFunction phi;
  phi.name = name;
  if (name == "power") {
    check_keys(name, given, {"p"});
    const double p = get_param(given, "p", 2.0);
    require(std::isfinite(p) && p >= 1.0, "power: need p >= 1");
    phi.params = {{"p", p}};
    if (p == 1.0)
      phi.eval = [](double u) { return u; };
    else if (p == 2.0)
      phi.eval = [](double u) { return u * u; };
    else
      phi.eval = [p](double u) { return std::pow(u, p); };
    phi.n_function_hint = p > 1.0 ? Tri::yes : Tri::no;
    phi.delta2_constant = std::pow(2.0, p);
    phi.delta_prime_constant = 1.0;
    if (p > 1.0) phi.beta_hint = p;
  } else if (name == "zygmund") {
    check_keys(name, given, {"beta", "gamma"});
    const double beta = get_param(given, "beta", 1.0);
    const double gamma = get_param(given, "gamma", 1.0);
    require(std::isfinite(beta) && beta >= 1.0, "zygmund: need beta >= 1");
    require(std::isfinite(gamma) && gamma > 0.0, "zygmund: need gamma > 0");
    phi.params = {{"beta", beta}, {"gamma", gamma}};
    phi.eval = [beta, gamma](double u) {
      return std::pow(u, beta) * std::pow(std::log(u + std::numbers::e), gamma);
    };
    phi.n_function_hint = beta > 1.0 ? Tri::yes : Tri::no;
    phi.delta2_constant = std::pow(2.0, beta) * std::pow(1.0 + std::numbers::ln2, gamma);
    phi.delta_prime_constant = std::pow(2.0, gamma);
    if (beta > 1.0) phi.beta_hint = beta;
  } else if (name == "exp") {
    check_keys(name, given, {"rho"});
    const double rho = get_param(given, "rho", 1.0);
    require(std::isfinite(rho) && rho > 0.0, "exp: need rho > 0");
    phi.params = {{"rho", rho}};
    if (rho == 1.0)
      phi.eval = [](double u) { return std::expm1(u); };
    else
      phi.eval = [rho](double u) { return std::expm1(std::pow(u, rho)); };
    phi.convex = rho >= 1.0;
    phi.n_function_hint = rho > 1.0 ? Tri::yes : Tri::no;
    if (rho > 1.0) phi.beta_hint = rho;
  } else if (name == "exp_taylor") {
    check_keys(name, given, {});
    phi.eval = [](double u) {
      if (u < 1e-2) return u * u * (0.5 + u * (1.0 / 6 + u * (1.0 / 24 + u * (1.0 / 120 + u / 720))));
      return std::expm1(u) - u;
    };
    phi.n_function_hint = Tri::yes;
    phi.beta_hint = 2.0;
  } else if (name == "cosh") {
    check_keys(name, given, {});
    phi.eval = [](double u) {
      const double s = std::sinh(0.5 * u);
      return 2.0 * s * s;
    };
    phi.n_function_hint = Tri::yes;
    phi.beta_hint = 2.0;
  } else if (name == "llogl") {
    check_keys(name, given, {});
    phi.eval = [](double u) { return u * std::log1p(u); };
    phi.n_function_hint = Tri::yes;
    phi.delta2_constant = 4.0;
  } else if (name == "plog_quotient") {
    check_keys(name, given, {"p"});
    const double p = get_param(given, "p", 2.0);
    require(std::isfinite(p) && p > 1.0, "plog_quotient: need p > 1");
    phi.params = {{"p", p}};
    phi.eval = [p](double t) { return std::pow(t, p) / std::log(std::numbers::e + t); };
    phi.n_function_hint = Tri::yes;
    phi.delta2_constant = std::pow(2.0, p);
  } else {
    throw std::invalid_argument("unknown phi-function '" + name + "'");
  }
  return phi;
}

std::pair<std::string, Params> parse_catalog_id(const std::string& text) {
  const auto colon = text.find(':');
  std::string name = text.substr(0, colon);
  Params params;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("malformed parameter '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != val.size()) throw std::invalid_argument("malformed number '" + val + "'");
      params.emplace_back(key, v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return {name, params};
}

PhiFunction parse_phi(const std::string& text) {
  auto [name, params] = parse_catalog_id(text);
  return make_phi(name, params);
}

ModularValue modular(const PhiFunction& phi, const IntervalFunction& f, double lambda, const quad::Options& opts) {
  if (!(lambda > 0.0)) throw std::invalid_argument("modular: lambda must be positive");
  const quad::Integrand g = [&](double x) { return phi(lambda * std::abs(f(x))); };
  const auto pts = f.breakpoints(f.a(), f.b());
  std::vector<bool> sing(pts.size());
  bool any_singular = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sing[i] = f.is_singular_at(pts[i]);
    any_singular = any_singular || sing[i];
  }

  ModularValue out;
  double regular_sum = 0.0;
  double regular_err = 0.0;
  std::vector<double> trend;
  auto infinite = [&]() {
    out.value = kInf;
    out.infinite = true;
    out.converged = false;
    out.trend = trend;
    return out;
  };

  // Regular runs share one quadrature call; pieces touching a singular point
  // go through the cutoff ladder.
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    if (sing[i] || sing[i + 1]) {
      auto r = quad::integrate_singular(g, pts[i], pts[i + 1], sing[i], sing[i + 1], opts);
      out.refinements += r.evaluations;
      if (trend.empty()) trend.assign(r.trend.size(), 0.0);
      for (std::size_t k = 0; k < std::min(trend.size(), r.trend.size()); ++k) trend[k] += r.trend[k];
      if (r.diverged) return infinite();
      out.converged = out.converged && r.converged;
      regular_sum += r.value;
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j + 1 < pts.size() && !sing[j]) ++j;
    if (sing[j] && j > i + 1) --j;
    std::span<const double> run(pts.data() + i, j - i + 1);
    auto r = quad::integrate(g, run, opts);
    out.refinements += r.evaluations;
    if (!r.finite) return infinite();
    regular_sum += r.value;
    regular_err += r.error;
    for (double& t : trend) t += r.value;
    if (!r.converged) {
      if (r.value > 1e12) return infinite();
      if (!any_singular && r.error > 1e-6 * std::max(1.0, std::abs(r.value)))
        throw NumericalFailure("modular: quadrature did not converge (error " + format_double(r.error) + ")");
      out.converged = false;
    }
    i = j;
  }
  if (!std::isfinite(regular_sum)) return infinite();
  out.value = std::max(0.0, regular_sum);
  out.trend = std::move(trend);
  (void)regular_err;
  return out;
}

double luxemburg_norm(const PhiFunction& phi, const IntervalFunction& f, const LuxemburgOptions& opts) {
  if (!phi.convex) throw HypothesisNotMet("Luxemburg norm needs a convex phi ('" + phi.id() + "' is not)");
  const IntervalFunction g = f.memoized();

  double sup = 0.0;
  {
    const auto pts = g.breakpoints(g.a(), g.b());
    constexpr int kSamples = 257;
    for (int i = 0; i < kSamples; ++i) {
      const double x = g.a() + (g.b() - g.a()) * (i + 0.5) / kSamples;
      const double v = std::abs(g(x));
      if (std::isfinite(v)) sup = std::max(sup, v);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double v = std::abs(g(0.5 * (pts[i] + pts[i + 1])));
      if (std::isfinite(v)) sup = std::max(sup, v);
    }
  }
  const PhiFunction identity = make_phi("power", {{"p", 1.0}});
  if (sup == 0.0 && modular(identity, g, 1.0, opts.quad).value == 0.0) return 0.0;

  // y(u) = ln I[f/u]; decreasing in u.
  auto y_at = [&](double u) {
    const ModularValue m = modular(phi, g, 1.0 / u, opts.quad);
    if (m.infinite) return kInf;
    if (m.value <= 0.0) return -kInf;
    return std::log(m.value);
  };

  double u0 = std::max(1e-12, sup);
  double lo, hi, ylo, yhi;
  double y0 = y_at(u0);
  int steps = 0;
  if (y0 <= 0.0) {
    hi = u0;
    yhi = y0;
    lo = u0 / 2;
    ylo = y_at(lo);
    while (ylo <= 0.0) {
      if (++steps > opts.max_bracket_steps) return lo;
      hi = lo;
      yhi = ylo;
      lo /= 2;
      ylo = y_at(lo);
    }
  } else {
    lo = u0;
    ylo = y0;
    hi = 2 * u0;
    yhi = y_at(hi);
    while (yhi > 0.0) {
      if (++steps > opts.max_bracket_steps)
        throw NotInOrliczSpace("I[f/u] > 1 for every bracket u up to " + format_double(hi));
      lo = hi;
      ylo = yhi;
      hi *= 2;
      yhi = y_at(hi);
    }
  }

  // Illinois regula falsi in (ln u, ln I) with bisection fallback; the
  // invariant y(lo) > 0 >= y(hi) is kept throughout.
  int side = 0;
  double prev_width = hi - lo;
  int slow = 0;
  for (int iter = 0; iter < 400 && hi - lo > opts.rel_width * hi; ++iter) {
    const double pinch = 0.25 * opts.rel_width * hi;
    double u;
    if (std::isfinite(ylo) && std::isfinite(yhi) && slow < 2) {
      const double xl = std::log(lo), xh = std::log(hi);
      u = std::exp(xl + (xh - xl) * ylo / (ylo - yhi));
    } else {
      u = 0.5 * (lo + hi);
      slow = 0;
    }
    u = std::clamp(u, lo + pinch, hi - pinch);
    if (!(u > lo && u < hi)) u = 0.5 * (lo + hi);
    const double y = y_at(u);
    if (y > 0.0) {
      lo = u;
      ylo = y;
      if (side == -1 && std::isfinite(yhi)) yhi *= 0.5;
      side = -1;
    } else {
      hi = u;
      yhi = y;
      if (side == 1 && std::isfinite(ylo)) ylo *= 0.5;
      side = 1;
    }
    const double width = hi - lo;
    slow = (width > 0.5 * prev_width) ? slow + 1 : 0;
    prev_width = width;
  }
  return hi;
}

std::vector<double> modulus_grid(double delta, int points, double min_ratio) {
  std::vector<double> hs(points);
  const double l0 = std::log(delta * min_ratio), l1 = std::log(delta);
  for (int i = 0; i < points; ++i) hs[i] = (i + 1 == points) ? delta : std::exp(l0 + (l1 - l0) * i / (points - 1));
  return hs;
}

namespace {

// Sup over the nested log grid of a per-h value; `eval` returns +inf to abort.
double grid_sup(double delta, const ModulusOptions& opts, const std::function<double(double)>& eval) {
  std::map<double, double> seen;
  double best = 0.0;
  int points = opts.initial_points;
  for (int level = 0; level <= opts.max_doublings; ++level) {
    const double before = best;
    for (double h : modulus_grid(delta, points, opts.min_ratio)) {
      for (double sh : {h, -h}) {
        if (seen.count(sh)) continue;
        const double v = eval(sh);
        seen[sh] = v;
        if (!std::isfinite(v)) return v;
        best = std::max(best, v);
      }
    }
    if (level > 0 && best - before <= opts.change_tol * best) break;
    points = 2 * points - 1;
  }
  return best;
}

}  // namespace

double strong_modulus(const PhiFunction& phi, const IntervalFunction& f, double delta, int k,
                      const ModulusOptions& opts) {
  if (!(delta > 0.0) || delta > f.period() * (1 + 1e-12)) throw std::invalid_argument("strong_modulus: need 0 < delta <= b - a");
  if (k < 1) throw std::invalid_argument("strong_modulus: need k >= 1");
  return grid_sup(delta, opts, [&](double h) { return luxemburg_norm(phi, finite_difference(f, h, k), opts.lux); });
}

ModularValue weak_modulus(const PhiFunction& phi, const IntervalFunction& f, double delta, double lambda,
                          const ModulusOptions& opts) {
  if (!(delta > 0.0) || delta > f.period() * (1 + 1e-12)) throw std::invalid_argument("weak_modulus: need 0 < delta <= b - a");
  if (!(lambda > 0.0)) throw std::invalid_argument("weak_modulus: lambda must be positive");
  ModularValue out;
  const double v = grid_sup(delta, opts, [&](double h) {
    const ModularValue m = modular(phi, finite_difference(f, h, 1), lambda, opts.lux.quad);
    out.refinements += m.refinements;
    out.converged = out.converged && m.converged;
    return m.infinite ? kInf : m.value;
  });
  out.value = v;
  if (!std::isfinite(v)) {
    out.infinite = true;
    out.converged = false;
  }
  return out;
}

std::vector<double> probe_grid() {
  std::vector<double> u(121);
  for (int i = 0; i < 121; ++i) u[i] = std::pow(10.0, -6.0 + 12.0 * i / 120.0);
  return u;
}

namespace {

// Bounded verdict for a ratio sequence on the probe grid: all finite and not
// growing over the last decade.
ConditionVerdict bounded_verdict(const std::vector<double>& u, const std::vector<double>& r) {
  ConditionVerdict v;
  v.holds = true;
  v.observed = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i])) {
      v.holds = false;
      v.observed = kInf;
      v.witness = u[i];
      return v;
    }
    if (r[i] > v.observed) {
      v.observed = r[i];
      v.witness = u[i];
    }
  }
  const std::size_t n = r.size();
  if (n > 10 && r[n - 1] > r[n - 11] * (1 + 1e-3)) v.holds = false;
  return v;
}

}  // namespace

ConditionReport probe_conditions(const PhiFunction& phi, std::optional<double> beta, std::uint64_t seed) {
  ConditionReport rep;
  const auto u = probe_grid();
  std::vector<double> val(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) val[i] = phi(u[i]);

  bool ax = phi(0.0) == 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    ax = ax && val[i] > 0.0;
    if (i > 0) ax = ax && val[i] >= val[i - 1];
  }
  const double v2 = phi(1e2), v4 = phi(1e4), v6 = phi(1e6);
  ax = ax && (v2 < v4 || std::isinf(v4)) && (v4 < v6 || std::isinf(v6));
  rep.axioms = ax;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-6.0, 6.0);
  bool cvx = true;
  for (int i = 0; i < 2000 && cvx; ++i) {
    const double x = std::pow(10.0, expo(rng));
    const double y = (i % 2 == 0) ? std::pow(10.0, expo(rng)) : x * (1.0 + std::pow(10.0, expo(rng) / 2 - 3));
    const double mid = phi(0.5 * (x + y));
    const double avg = 0.5 * (phi(x) + phi(y));
    if (std::isinf(avg)) continue;
    if (mid > avg * (1 + 1e-10) + 1e-300) cvx = false;
  }
  rep.convex = cvx;

  std::vector<double> r2(u.size()), rp(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    r2[i] = phi(2 * u[i]) / val[i];
    double m = 0.0;
    for (double v : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double num = phi(u[i] * v);
      const double q = std::isfinite(num) ? num / (val[i] * phi(v)) : kInf;
      m = std::max(m, std::isnan(q) ? kInf : q);
    }
    rp[i] = m;
  }
  rep.delta2 = bounded_verdict(u, r2);
  rep.delta_prime = bounded_verdict(u, rp);

  rep.n_function.observed = val.front() / u.front();
  rep.n_function.witness = u.front();
  rep.n_large_ratio = val.back() / u.back();
  rep.n_function.holds = rep.n_function.observed < 1e-2 && rep.n_large_ratio > 1e2;

  auto monotone = [&](double b, bool& strict, ConditionVerdict& v) {
    strict = true;
    v.holds = true;
    v.observed = kInf;
    double prev = -1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = val[i] * std::pow(u[i], -b);
      if (i > 0 && std::isfinite(prev) && prev > 0.0) {
        const double q = r / prev;
        if (q < v.observed) {
          v.observed = q;
          v.witness = u[i];
        }
        if (q < 1.0 - 1e-12) v.holds = false;
        if (!(q > 1.0)) strict = false;
      }
      prev = r;
    }
  };
  if (beta || phi.beta_hint) {
    rep.beta = beta ? *beta : *phi.beta_hint;
    monotone(rep.beta, rep.beta_strict, rep.beta_monotone);
  } else {
    for (double b : {4.0, 3.0, 2.5, 2.0, 1.75, 1.5, 1.25, 1.1, 1.05, 1.01}) {
      rep.beta = b;
      monotone(b, rep.beta_strict, rep.beta_monotone);
      if (rep.beta_monotone.holds) break;
    }
  }
  return rep;
}

}  // namespace kantolab
