#include "kantolab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "kantolab/errors.hpp"
#include "kantolab/format.hpp"

namespace kantolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = std::numbers::e;

double param_or(const Params& given, const std::string& key, double fallback) {
  for (const auto& [k, v] : given)
    if (k == key) return v;
  return fallback;
}

void only_keys(const std::string& name, const Params& given, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : given) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("sigmoidal '" + name + "' has no parameter '" + k + "'");
  }
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_prime(double x) {
  const double e = std::exp(-std::abs(x));
  return e / ((1.0 + e) * (1.0 + e));
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binom(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// sum_j (-1)^j C(s,j) (s/2 + x - j)_+^m / m!
double truncated_power_sum(int s, int m, double x) {
  double acc = 0.0;
  for (int j = 0; j <= s; ++j) {
    const double t = 0.5 * s + x - j;
    if (t <= 0.0) break;
    acc += ((j % 2) ? -1.0 : 1.0) * binom(s, j) * std::pow(t, m);
  }
  return acc / factorial(m);
}

}  // namespace

std::string Sigmoidal::id() const {
  std::string s = name;
  for (std::size_t i = 0; i < params.size(); ++i) {
    s += (i == 0 ? ':' : ',');
    s += params[i].first + "=" + format_double(params[i].second);
  }
  return s;
}

std::vector<std::string> kernel_catalog() { return {"logistic", "tanh", "ramp", "sigma_theta", "bspline"}; }

Sigmoidal make_sigmoidal(const std::string& name, const Params& given) {
  Sigmoidal s;
  s.name = name;
  if (name == "logistic") {
    only_keys(name, given, {});
    s.eval = logistic;
    s.derivative = logistic_prime;
    s.alpha = kInf;
    s.exp_rate = 1.0;
  } else if (name == "tanh") {
    only_keys(name, given, {});
    s.eval = [](double x) { return logistic(2.0 * x); };
    s.derivative = [](double x) { return 2.0 * logistic_prime(2.0 * x); };
    s.alpha = kInf;
    s.exp_rate = 2.0;
  } else if (name == "ramp") {
    only_keys(name, given, {});
    s.eval = [](double x) {
      if (x <= -1.5) return 0.0;
      if (x >= 1.5) return 1.0;
      return x / 3.0 + 0.5;
    };
    s.alpha = kInf;
    s.half_width = 1.5;
    s.corners = {-1.5, 1.5};
  } else if (name == "sigma_theta") {
    only_keys(name, given, {"theta"});
    const double theta = param_or(given, "theta", 5.0);
    if (!(theta > 1.0) || !std::isfinite(theta)) throw std::invalid_argument("sigma_theta: need theta > 1");
    s.params = {{"theta", theta}};
    const double c = std::pow(2.0, -theta) / 4.0;
    s.eval = [theta, c](double x) {
      if (x <= -0.5) return c * std::pow(-x, -theta);
      if (x <= 0.5) return 0.5 * x + 0.5;
      return 1.0 - c * std::pow(x, -theta);
    };
    s.alpha = theta - 1.0;
    s.relaxed_smoothness = true;
    s.corners = {-0.5, 0.5};
  } else if (name == "bspline") {
    only_keys(name, given, {"s"});
    const double sd = param_or(given, "s", 4.0);
    if (sd != std::floor(sd) || sd < 1 || sd > 20) throw std::invalid_argument("bspline: need integer order 1 <= s <= 20");
    const int order = static_cast<int>(sd);
    s.params = {{"s", sd}};
    const double hw = 0.5 * order;
    s.eval = [order, hw](double x) {
      if (x <= -hw) return 0.0;
      if (x >= hw) return 1.0;
      if (x <= 0.0) return truncated_power_sum(order, order, x);
      return 1.0 - truncated_power_sum(order, order, -x);
    };
    if (order >= 2)
      s.derivative = [order, hw](double x) {
        const double t = -std::abs(x);
        if (t <= -hw) return 0.0;
        return truncated_power_sum(order, order - 1, t);
      };
    s.alpha = kInf;
    s.half_width = hw;
    if (order <= 2)
      for (int j = 0; j <= order; ++j) s.corners.push_back(-hw + j);
  } else {
    throw std::invalid_argument("unknown sigmoidal '" + name + "'");
  }
  s.sigma_at_one_lt_one = s.eval(1.0) < 1.0;
  return s;
}

Sigmoidal parse_sigmoidal(const std::string& text) {
  auto [name, params] = parse_catalog_id(text);
  return make_sigmoidal(name, params);
}

double DensityKernel::upsilon() const {
  if (auto c = std::get_if<Compact>(&support)) return c->upsilon;
  throw HypothesisNotMet("kernel '" + id() + "' is not compactly supported");
}

DensityKernel build_density(const Sigmoidal& sigma) {
  if (!(sigma.eval(-1e6) < 1e-3) || !(sigma.eval(1e6) > 1.0 - 1e-3))
    throw HypothesisNotMet("'" + sigma.id() + "' does not have sigmoidal limits");
  for (int i = 0; i <= 400; ++i) {
    const double x = -20.0 + 0.1 * i;
    if (std::abs((sigma(x) - 0.5) + (sigma(-x) - 0.5)) > 1e-12)
      throw HypothesisNotMet("'" + sigma.id() + "' is not odd-symmetric about 1/2");
  }
  if (!(sigma(1.0) < 1.0))
    throw HypothesisNotMet("'" + sigma.id() + "' has sigma(1) = 1, so phi(2) = 0 and the denominator floor fails");

  DensityKernel k;
  k.source = sigma;
  auto sig = sigma.eval;
  if (sigma.name == "logistic") {
    // closed form, written in t = |x| to avoid overflow
    k.eval = [](double x) {
      const double t = std::abs(x);
      const double e1 = std::exp(-1.0 - t);
      return 0.5 * (kE * kE - 1.0) * e1 / ((1.0 + e1) * (1.0 + std::exp(1.0 - t)));
    };
    k.derivative = [](double x) {
      const double t = std::abs(x);
      const double a = std::exp(-1.0 - t), b = std::exp(1.0 - t);
      const double g = (kE * kE - 1.0) / (2.0 * kE) * (-std::expm1(-2.0 * t)) * std::exp(-t) /
                       ((1.0 + a) * (1.0 + a) * (1.0 + b) * (1.0 + b));
      return x > 0 ? -g : g;
    };
  } else {
    k.eval = [sig](double x) {
      const double t = std::abs(x);
      return 0.5 * (sig(1.0 - t) - sig(-1.0 - t));
    };
    if (sigma.derivative) {
      auto ds = sigma.derivative;
      k.derivative = [ds](double x) {
        const double t = std::abs(x);
        const double g = 0.5 * (ds(t + 1.0) - ds(t - 1.0));
        return x >= 0 ? g : -g;
      };
    }
  }
  k.phi_at_2 = k.eval(2.0);

  std::vector<double> kinks;
  for (double c : sigma.corners)
    for (double v : {c - 1.0, c + 1.0, -(c - 1.0), -(c + 1.0)}) kinks.push_back(v);
  k.kinks = merge_points(std::move(kinks));

  const double phi0 = k.eval(0.0);
  if (sigma.half_width > 0.0) {
    k.support = Compact{sigma.half_width + 1.0};
    k.sum_radius = sigma.half_width + 1.0;
  } else if (sigma.exp_rate > 0.0) {
    double c = 0.0;
    for (double x : {10.0, 20.0, 40.0}) c = std::max(c, k.eval(x) * std::exp(sigma.exp_rate * x));
    k.support = Decay{sigma.alpha, c, sigma.exp_rate};
    k.sum_radius = std::log(c / (1e-18 * phi0)) / sigma.exp_rate;
  } else {
    double c = 0.0;
    for (double x : {10.0, 20.0, 40.0}) c = std::max(c, k.eval(x) * std::pow(x, sigma.alpha + 1.0));
    k.support = Decay{sigma.alpha, c, 0.0};
    k.sum_radius = kInf;
  }
  return k;
}

DensityKernel make_kernel(const std::string& text) { return build_density(parse_sigmoidal(text)); }

int tail_truncation(const DensityKernel& kernel, double nu, double eps) {
  if (auto c = std::get_if<Compact>(&kernel.support)) return static_cast<int>(std::ceil(c->upsilon)) + 1;
  const Decay& d = std::get<Decay>(kernel.support);
  // Two sides, at most one term per unit of distance beyond K.
  if (d.exp_rate > 0.0) {
    int K = std::max(2, static_cast<int>(std::ceil(nu / d.exp_rate)) + 1);
    for (;; ++K) {
      double tail = 0.0;
      for (int j = K;; ++j) {
        const double term = d.tail_constant * std::exp(-d.exp_rate * j) * std::pow(j + 1.0, nu);
        tail += term;
        if (term < 1e-30) break;
      }
      if (2.0 * tail < eps || K > 100000) return K;
    }
  }
  if (!(nu < d.alpha)) throw PotentiallyInfinite("moment order " + format_double(nu) + " >= alpha = " + format_double(d.alpha));
  auto bound = [&](double K) {
    // term(d) <= C d^{nu-alpha-1} for d > K; sum <= K^{e} + K^{e+1}/(alpha-nu), e = nu-alpha-1
    const double e = nu - d.alpha - 1.0;
    return 2.0 * d.tail_constant * (std::pow(K, e) + std::pow(K, e + 1.0) / (d.alpha - nu));
  };
  double K = 2.0;
  while (bound(K) >= eps) {
    K *= 2.0;
    if (K > 1e9) throw PotentiallyInfinite("tail bound for the moment does not reach tolerance");
  }
  double lo = K / 2, hi = K;
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    (bound(mid) < eps ? hi : lo) = mid;
  }
  return static_cast<int>(hi);
}

namespace {

template <class Term>
double window_sum(double u, int K, Term&& term) {
  const long k0 = static_cast<long>(std::floor(u - K));
  const long k1 = static_cast<long>(std::ceil(u + K));
  double acc = 0.0;
  for (long k = k0; k <= k1; ++k) {
    const double d = u - static_cast<double>(k);
    if (std::abs(d) > K) continue;
    acc += term(d);
  }
  return acc;
}

template <class Summand>
MomentValue sup_over_unit(Summand&& S) {
  constexpr int kGrid = 1024;
  MomentValue out;
  int best = 0;
  double bestv = -kInf;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = S(static_cast<double>(i) / kGrid);
    if (!std::isfinite(v)) {
      out.value = v;
      return out;
    }
    if (v > bestv) {
      bestv = v;
      best = i;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(kGrid);
  double hi = std::min(kGrid, best + 1) / static_cast<double>(kGrid);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = S(x1), f2 = S(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = S(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = S(x1);
    }
  }
  out.value = bestv;
  out.argmax = static_cast<double>(best) / kGrid;
  for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}})
    if (f > out.value) {
      out.value = f;
      out.argmax = x;
    }
  return out;
}

double abs_pow(double d, double nu) { return nu == 0.0 ? 1.0 : std::pow(std::abs(d), nu); }

}  // namespace

double moment_summand(const DensityKernel& kernel, double nu, double u, int K) {
  return window_sum(u, K, [&](double d) { return kernel(d) * abs_pow(d, nu); });
}

MomentValue moment(const DensityKernel& kernel, double nu) {
  if (!(nu >= 0.0)) throw std::invalid_argument("moment order must be >= 0");
  const int K = tail_truncation(kernel, nu, 1e-10);
  MomentValue m = sup_over_unit([&](double u) { return moment_summand(kernel, nu, u, K); });
  m.truncation = K;
  return m;
}

MomentValue derivative_moment(const DensityKernel& kernel, double nu) {
  if (!kernel.has_derivative()) throw HypothesisNotMet("kernel '" + kernel.id() + "' has no derivative");
  const int K = tail_truncation(kernel, nu, 1e-10);
  MomentValue m = sup_over_unit([&](double u) {
    return window_sum(u, K, [&](double d) { return std::abs(kernel.derivative(d)) * abs_pow(d, nu); });
  });
  m.truncation = K;
  return m;
}

MomentValue hybrid_moment(const DensityKernel& kernel, const PhiFunction& phi, double nu, double mu) {
  if (!(nu >= 0.0) || !(mu >= 0.0)) throw std::invalid_argument("hybrid moment orders must be >= 0");
  auto at = [&](int K) {
    MomentValue m = sup_over_unit([&](double u) {
      return window_sum(u, K, [&](double d) {
        const double w = kernel(d);
        if (w == 0.0) return 0.0;
        return w * abs_pow(d, nu) * phi(abs_pow(d, mu));
      });
    });
    m.truncation = K;
    return m;
  };
  int K = tail_truncation(kernel, nu, 1e-10);
  MomentValue cur = at(K);
  if (kernel.compact()) return cur;
  constexpr int kMaxK = 1 << 15;
  while (true) {
    if (!std::isfinite(cur.value)) throw PotentiallyInfinite("hybrid moment sum is not finite");
    if (2 * K > kMaxK) throw PotentiallyInfinite("hybrid moment is not truncation-stable");
    MomentValue next = at(2 * K);
    if (!std::isfinite(next.value)) throw PotentiallyInfinite("hybrid moment sum is not finite");
    if (std::abs(next.value - cur.value) <= 1e-9 * std::max(1.0, next.value)) return next;
    K *= 2;
    cur = next;
  }
}

double partition_defect(const DensityKernel& kernel, std::span<const double> grid) {
  const int K = kernel.compact() ? static_cast<int>(std::ceil(kernel.upsilon())) + 1
                                 : std::min<double>(tail_truncation(kernel, 0.0, 1e-14), 1e7);
  double worst = 0.0;
  for (double x : grid) worst = std::max(worst, std::abs(moment_summand(kernel, 0.0, x, K) - 1.0));
  return worst;
}

DenominatorFloor denominator_floor(const DensityKernel& kernel, double a, double b, int n,
                                   std::span<const double> grid) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const long k0 = static_cast<long>(std::ceil(n * a));
  const long k1 = static_cast<long>(std::floor(n * b)) - 1;
  if (k0 > k1) throw std::invalid_argument("empty index range ceil(na) > floor(nb) - 1");
  DenominatorFloor out;
  out.phi_at_2 = kernel.phi_at_2;
  out.min_sum = kInf;
  for (double x : grid) {
    double s = 0.0;
    for (long k = k0; k <= k1; ++k) s += kernel(n * x - static_cast<double>(k));
    if (s < out.min_sum) {
      out.min_sum = s;
      out.argmin = x;
    }
  }
  return out;
}

void dump_kernel(const DensityKernel& kernel, std::span<const double> xs, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"x", "phi", "dphi"});
  for (double x : xs) {
    const double d = kernel.has_derivative() ? kernel.derivative(x) : std::numeric_limits<double>::quiet_NaN();
    csv.row({format_double(x), format_double(kernel(x)), format_double(d)});
  }
}

}  // namespace kantolab
