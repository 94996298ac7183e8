#include "kantolab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "kantolab/errors.hpp"
#include "kantolab/format.hpp"
#include "kantolab/operators.hpp"
#include "kantolab/quadrature.hpp"

namespace kantolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

double sampled_sup(const IntervalFunction& f) {
  double m = 0.0;
  for (int i = 0; i <= 256; ++i) m = std::max(m, std::abs(f(f.a() + (f.b() - f.a()) * i / 256.0)));
  return m;
}
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, count) on up to `threads` workers.  The first
// failing index (lowest i) decides which exception is rethrown.
template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  if (rhs == 0.0) return kInf;
  return lhs / rhs;
}

double norm_of(const PhiFunction& phi, const IntervalFunction& g) { return luxemburg_norm(phi, g); }

// Error function K_n f - f.
IntervalFunction error_function(const KantorovichOperator& op, const IntervalFunction& f) {
  return (op.as_function() - f).renamed("K" + std::to_string(op.n()) + "f-f");
}

std::string describe(const BoundRequest& req, const std::string& extra) {
  std::string s = "f=" + req.f.name() + ";phi=" + req.phi.id() + ";kernel=" + req.kernel.id();
  if (!extra.empty()) s += ";" + extra;
  return s;
}

BoundReport row(const BoundRequest& req, const std::string& form, double lhs, double rhs, double tol,
                const std::string& extra) {
  BoundReport r;
  r.kind = req.kind;
  r.form = form;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = safe_ratio(lhs, rhs);
  r.tol = tol;
  r.pass = r.ratio <= 1.0 + tol;
  r.params = describe(req, extra);
  return r;
}

// Per-n ratio rows (informational) followed by the max/min spread row.
void push_fitted(std::vector<BoundReport>& out, const BoundRequest& req, const std::string& form,
                 const std::vector<int>& ns, const std::vector<double>& lhs, const std::vector<double>& rhs,
                 const std::string& extra) {
  std::vector<double> ratios;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    auto r = row(req, form, lhs[i], rhs[i], kInf, "n=" + std::to_string(ns[i]) + extra);
    r.pass = true;
    out.push_back(r);
    if (lhs[i] != 0.0) ratios.push_back(r.ratio);
  }
  BoundReport s;
  s.kind = req.kind;
  s.form = form + ":spread";
  s.tol = 0.0;
  s.params = describe(req, "max_spread=" + format_double(req.max_spread) + extra);
  if (ratios.empty()) {
    // every lhs vanished: the constant is irrelevant
    s.lhs = s.rhs = s.ratio = 0.0;
    s.pass = true;
  } else {
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    s.lhs = *hi;
    s.rhs = *lo * req.max_spread;
    s.ratio = std::isfinite(*hi) ? s.lhs / s.rhs : kInf;
    s.pass = s.ratio <= 1.0;
  }
  out.push_back(s);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw HypothesisNotMet(what);
}

IntervalFunction derivative_of(const IntervalFunction& f) {
  require(f.has_derivative(), "'" + f.name() + "' has no derivative");
  return f.derivative_function();
}

// ||g||_phi, with "not in L^phi" turned into a hypothesis failure.
double member_norm(const PhiFunction& phi, const IntervalFunction& g, const std::string& what) {
  try {
    return norm_of(phi, g);
  } catch (const NotInOrliczSpace&) {
    throw HypothesisNotMet(what + " is not in L^phi");
  } catch (const NumericalFailure&) {
    throw HypothesisNotMet(what + " is not in L^phi (integral diverges)");
  }
}

ModularValue modular_or_infinite(const PhiFunction& phi, const IntervalFunction& g, double lambda) {
  try {
    return modular(phi, g, lambda);
  } catch (const NumericalFailure&) {
    ModularValue v;
    v.infinite = true;
    v.converged = false;
    v.value = kInf;
    return v;
  }
}

double value_of(const ModularValue& v) { return v.infinite ? kInf : v.value; }

std::string lambda_tag(double lambda) { return ";lambda=" + format_double(lambda); }

void require_nfunction(const ConditionReport& c) {
  require(c.convex && c.n_function.holds, "phi is not an N-function (probe)");
}

void require_beta(const ConditionReport& c) { require(c.beta_monotone.holds, "u^-beta phi(u) is not increasing (probe)"); }

void require_finite_moment(const std::function<MomentValue()>& m, const std::string& what) {
  try {
    m();
  } catch (const PotentiallyInfinite& e) {
    throw HypothesisNotMet(what + ": " + e.what());
  }
}

std::vector<KantorovichOperator> build_operators(const BoundRequest& req) {
  std::vector<std::optional<KantorovichOperator>> built(req.ns.size());
  parallel_for(req.ns.size(), req.threads, [&](std::size_t i) { built[i].emplace(req.kernel, req.f, req.ns[i]); });
  std::vector<KantorovichOperator> ops;
  for (auto& op : built) ops.push_back(std::move(*op));
  return ops;
}

std::vector<double> default_hs() { return {0.2, 0.1, 0.05}; }

// Gauss-Legendre average over t in J = [0, len] of g(t).
double average_over_j(double len, const std::function<double(double)>& g) {
  static const quad::GaussLegendre rule(10);
  return rule.apply(g, 0.0, len) / len;
}

void check_ns(const BoundRequest& req) {
  if (req.ns.empty()) throw std::invalid_argument("bound check needs at least one n");
}

std::vector<BoundReport> compact_direct(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  require_nfunction(cond);
  const double ups = req.kernel.upsilon();
  const double dnorm = member_norm(req.phi, derivative_of(req.f), "f'");
  const auto ops = build_operators(req);
  std::vector<double> lhs(ops.size());
  parallel_for(ops.size(), req.threads,
               [&](std::size_t i) { lhs[i] = norm_of(req.phi, error_function(ops[i], req.f)); });
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < ops.size(); ++i)
    out.push_back(row(req, "norm", lhs[i], 4.0 * (1.0 + ups) * dnorm / req.ns[i], req.tol,
                      "n=" + std::to_string(req.ns[i]) + ";upsilon=" + format_double(ups)));
  return out;
}

std::vector<BoundReport> operator_norm(const BoundRequest& req) {
  check_ns(req);
  const double p2 = req.kernel.phi_at_2;
  const double fnorm = member_norm(req.phi, req.f, "f");
  const auto lambda = req.lambda ? req.lambda
                                 : search_lambda([&](double l) { return !modular_or_infinite(req.phi, req.f, l).infinite; });
  require(lambda.has_value(), "I[lambda f] is infinite for every lambda on the grid");
  const double rhs_mod = value_of(modular_or_infinite(req.phi, req.f, *lambda)) / p2;
  const auto ops = build_operators(req);
  std::vector<double> lhs_norm(ops.size()), lhs_mod(ops.size());
  parallel_for(ops.size(), req.threads, [&](std::size_t i) {
    const auto g = ops[i].as_function();
    lhs_norm[i] = norm_of(req.phi, g);
    lhs_mod[i] = value_of(modular_or_infinite(req.phi, g, *lambda));
  });
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string tag = "n=" + std::to_string(req.ns[i]) + ";phi2=" + format_double(p2);
    out.push_back(row(req, "norm", lhs_norm[i], fnorm / p2, req.tol, tag));
    out.push_back(row(req, "modular", lhs_mod[i], rhs_mod, req.tol, tag + lambda_tag(*lambda)));
  }
  return out;
}

std::vector<BoundReport> weak_direct(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  require(cond.convex, "phi is not convex (probe)");
  const double ups = req.kernel.upsilon();
  const auto df = derivative_of(req.f);
  const auto ops = build_operators(req);
  std::vector<IntervalFunction> errs;
  for (const auto& op : ops) errs.push_back(error_function(op, req.f));
  std::vector<double> lhs(ops.size()), rhs(ops.size());
  auto evaluate = [&](double l) {
    parallel_for(ops.size(), req.threads, [&](std::size_t i) {
      rhs[i] = value_of(modular_or_infinite(req.phi, df, 2.0 * l * (1.0 + ups) / req.ns[i]));
      lhs[i] = value_of(modular_or_infinite(req.phi, errs[i], l));
    });
    return std::all_of(rhs.begin(), rhs.end(), [](double v) { return std::isfinite(v); });
  };
  std::optional<double> lambda;
  if (req.lambda) {
    evaluate(*req.lambda);
    lambda = req.lambda;
  } else {
    lambda = search_lambda(evaluate);
  }
  require(lambda.has_value(), "I[lambda f'] is infinite for every lambda on the grid");
  std::vector<BoundReport> out;
  for (std::size_t i = 0; i < ops.size(); ++i)
    out.push_back(row(req, "modular", lhs[i], rhs[i], req.tol,
                      "n=" + std::to_string(req.ns[i]) + ";upsilon=" + format_double(ups) + lambda_tag(*lambda)));
  return out;
}

std::vector<BoundReport> steklov_direct(const BoundRequest& req, const ConditionReport& cond) {
  require_nfunction(cond);
  const auto hs = req.hs.empty() ? default_hs() : req.hs;
  std::vector<BoundReport> out(2 * hs.size());
  parallel_for(hs.size(), req.threads, [&](std::size_t i) {
    const double h = hs[i];
    const auto fh = steklov(req.f, 1, h);
    const double w = strong_modulus(req.phi, req.f, h, 1);
    const double lhs1 = norm_of(req.phi, req.f - fh);
    const double lhs2 = norm_of(req.phi, fh.derivative_function());
    const std::string tag = "h=" + format_double(h) + ";k=1";
    out[2 * i] = row(req, "(i)", lhs1, 2.0 * w, req.tol, tag);
    out[2 * i + 1] = row(req, "(ii)", lhs2, 4.0 / h * w, req.tol, tag + ";s=1");
  });
  return out;
}

std::vector<BoundReport> weak_quantitative(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  const auto ops = build_operators(req);
  std::vector<IntervalFunction> errs;
  for (const auto& op : ops) errs.push_back(error_function(op, req.f));
  std::vector<double> lhs(ops.size()), w(ops.size());
  const bool compact = req.kernel.compact();
  double scale = 0.0;
  if (compact) {
    scale = 6.0 * (1.0 + req.kernel.upsilon());
  } else {
    require_beta(cond);
    require_finite_moment([&] { return hybrid_moment(req.kernel, req.phi, 0.0, 2.0); }, "M^phi_{0,2}");
    scale = 12.0;  // 12 lambda L^2 with L = 1
  }
  auto delta = [&](int n) { return compact ? 1.0 / n : 1.0 / std::sqrt(static_cast<double>(n)); };
  auto evaluate = [&](double l) {
    parallel_for(ops.size(), req.threads, [&](std::size_t i) {
      w[i] = value_of(weak_modulus(req.phi, req.f, std::min(delta(req.ns[i]), req.f.period()), scale * l));
      lhs[i] = value_of(modular_or_infinite(req.phi, errs[i], l));
    });
    return std::all_of(w.begin(), w.end(), [](double v) { return std::isfinite(v); }) &&
           std::all_of(lhs.begin(), lhs.end(), [](double v) { return std::isfinite(v); });
  };
  std::optional<double> lambda;
  if (req.lambda) {
    evaluate(*req.lambda);
    lambda = req.lambda;
  } else {
    lambda = search_lambda(evaluate);
  }
  require(lambda.has_value(), "weak modulus is infinite for every lambda on the grid");
  std::vector<BoundReport> out;
  if (compact) {
    const double factor = 2.0 + 1.0 / req.kernel.phi_at_2;
    for (std::size_t i = 0; i < ops.size(); ++i)
      out.push_back(row(req, "explicit", lhs[i], factor * w[i], req.tol,
                        "n=" + std::to_string(req.ns[i]) + ";factor=" + format_double(factor) + lambda_tag(*lambda)));
  } else {
    std::vector<double> rhs(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) rhs[i] = w[i] + 3.0 * *lambda / req.ns[i];
    // The rate of this form need not be sharp, so the ratio may decay; only
    // growth past max_spread times the first ratio counts against it.
    double first = kNaN, top = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      auto r = row(req, "fitted", lhs[i], rhs[i], kInf, "n=" + std::to_string(req.ns[i]) + lambda_tag(*lambda));
      r.pass = true;
      out.push_back(r);
      if (std::isnan(first)) first = r.ratio;
      top = std::max(top, r.ratio);
    }
    BoundReport g = row(req, "fitted:growth", top, first * req.max_spread, 0.0,
                        "max_spread=" + format_double(req.max_spread) + lambda_tag(*lambda));
    if (top == 0.0) g.pass = true;
    out.push_back(g);
  }
  return out;
}

std::vector<BoundReport> minkowski(const BoundRequest& req, bool weak) {
  require(req.phi.convex, "phi is not convex");
  const double len = 0.1;
  const IntervalFunction absf = req.f.absolute();
  IntervalFunction::Spec s;
  s.a = req.f.a();
  s.b = req.f.b();
  s.eval = [absf, len](double x) { return integrate_function(absf, x, x + len); };
  for (double p : absf.breakpoints(s.a, s.b)) {
    s.kinks.push_back(p);
    s.kinks.push_back(p - len);
  }
  s.name = "int_J|f(.+t)|";
  const IntervalFunction lhs_fn(std::move(s));
  std::vector<BoundReport> out;
  const std::string tag = "J=[0," + format_double(len) + "];g=1";
  if (!weak) {
    const double lhs = norm_of(req.phi, lhs_fn);
    const double rhs = 2.0 * len * average_over_j(len, [&](double t) { return norm_of(req.phi, req.f.shifted(t)); });
    out.push_back(row(req, "norm", lhs, rhs, req.tol, tag));
    return out;
  }
  double lhs = 0.0, rhs = 0.0;
  auto evaluate = [&](double l) {
    lhs = value_of(modular_or_infinite(req.phi, lhs_fn, l));
    rhs = average_over_j(len, [&](double t) { return value_of(modular_or_infinite(req.phi, req.f.shifted(t), l * len)); });
    return std::isfinite(lhs) && std::isfinite(rhs);
  };
  std::optional<double> lambda;
  if (req.lambda) {
    evaluate(*req.lambda);
    lambda = req.lambda;
  } else {
    lambda = search_lambda(evaluate);
  }
  require(lambda.has_value(), "no lambda on the grid makes both sides finite");
  out.push_back(row(req, "modular", lhs, rhs, req.tol, tag + lambda_tag(*lambda)));
  return out;
}

std::vector<BoundReport> delta_prime_direct(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  require(cond.delta_prime.holds, "phi fails the Delta' probe");
  require_beta(cond);
  require_finite_moment([&] { return hybrid_moment(req.kernel, req.phi, 0.0, 1.0); }, "M^phi_{0,1}");
  const auto df = derivative_of(req.f);
  const double dnorm = member_norm(req.phi, df, "f'");
  const auto ops = build_operators(req);
  std::vector<IntervalFunction> errs;
  for (const auto& op : ops) errs.push_back(error_function(op, req.f));
  std::vector<double> lhs_n(ops.size()), rhs_n(ops.size()), lhs_m(ops.size()), rhs_m(ops.size());
  const double l = req.lambda.value_or(1.0);
  parallel_for(ops.size(), req.threads, [&](std::size_t i) {
    lhs_n[i] = norm_of(req.phi, errs[i]);
    rhs_n[i] = 2.0 * dnorm / req.ns[i];
    lhs_m[i] = value_of(modular_or_infinite(req.phi, errs[i], l));
    rhs_m[i] = value_of(modular_or_infinite(req.phi, df, 2.0 * l / req.ns[i]));
  });
  std::vector<BoundReport> out;
  push_fitted(out, req, "modular", req.ns, lhs_m, rhs_m, lambda_tag(l));
  push_fitted(out, req, "norm", req.ns, lhs_n, rhs_n, "");
  return out;
}

std::vector<BoundReport> general_modular(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  require_beta(cond);
  require_finite_moment([&] { return hybrid_moment(req.kernel, req.phi, 0.0, 2.0); }, "M^phi_{0,2}");
  const auto df = derivative_of(req.f);
  IntervalFunction::Spec sq = df.spec();
  sq.eval = [df](double x) {
    const double d = df(x);
    return d * d;
  };
  sq.derivative = {};
  sq.name = "(f')^2";
  const IntervalFunction df2(std::move(sq));
  const auto member = search_lambda([&](double l) { return !modular_or_infinite(req.phi, df2, l).infinite; });
  require(member.has_value(), "(f')^2 is not in L^phi");
  const auto ops = build_operators(req);
  std::vector<IntervalFunction> errs;
  for (const auto& op : ops) errs.push_back(error_function(op, req.f));
  std::vector<double> lhs(ops.size()), rhs(ops.size());
  auto evaluate = [&](double l) {
    parallel_for(ops.size(), req.threads, [&](std::size_t i) {
      lhs[i] = value_of(modular_or_infinite(req.phi, errs[i], l));
      rhs[i] = l / req.ns[i] + value_of(modular_or_infinite(req.phi, df2, 4.0 * l / req.ns[i]));
    });
    return std::all_of(rhs.begin(), rhs.end(), [](double v) { return std::isfinite(v); });
  };
  std::optional<double> lambda;
  if (req.lambda) {
    evaluate(*req.lambda);
    lambda = req.lambda;
  } else {
    // 0 < lambda < 1
    lambda = search_lambda([&](double l) { return l < 1.0 && evaluate(l); });
  }
  require(lambda.has_value(), "no lambda in (0, 1) makes the bound finite");
  std::vector<BoundReport> out;
  push_fitted(out, req, "modular", req.ns, lhs, rhs, lambda_tag(*lambda));
  return out;
}

std::vector<BoundReport> quantitative(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  std::string variant;
  if (req.kernel.compact()) {
    require_nfunction(cond);
    variant = ";variant=compact";
  } else {
    require(cond.delta_prime.holds, "phi fails the Delta' probe");
    require_beta(cond);
    require_finite_moment([&] { return hybrid_moment(req.kernel, req.phi, 0.0, 1.0); }, "M^phi_{0,1}");
    variant = ";variant=delta_prime";
  }
  const auto ops = build_operators(req);
  std::vector<double> lhs(ops.size()), rhs(ops.size());
  parallel_for(ops.size(), req.threads, [&](std::size_t i) {
    lhs[i] = norm_of(req.phi, error_function(ops[i], req.f));
    rhs[i] = strong_modulus(req.phi, req.f, std::min(1.0 / req.ns[i], req.f.period()), 1);
  });
  std::vector<BoundReport> out;
  push_fitted(out, req, "norm", req.ns, lhs, rhs, variant);
  return out;
}

std::vector<BoundReport> bernstein(const BoundRequest& req) {
  check_ns(req);
  require(req.kernel.has_derivative(), "kernel has no derivative");
  require_finite_moment([&] { return derivative_moment(req.kernel, 0.0); }, "M_0(phi')");
  const double fnorm = member_norm(req.phi, req.f, "f");
  const auto ops = build_operators(req);
  std::vector<double> lhs(ops.size()), rhs(ops.size());
  parallel_for(ops.size(), req.threads, [&](std::size_t i) {
    lhs[i] = norm_of(req.phi, ops[i].as_function().derivative_function());
    rhs[i] = req.ns[i] * fnorm;
  });
  std::vector<BoundReport> out;
  push_fitted(out, req, "norm", req.ns, lhs, rhs, "");
  return out;
}

std::vector<BoundReport> derivative_bound(const BoundRequest& req, const ConditionReport& cond) {
  check_ns(req);
  require(req.kernel.has_derivative(), "kernel has no derivative");
  require_beta(cond);
  require_finite_moment([&] { return moment(req.kernel, 1.0); }, "M_1(phi)");
  require_finite_moment([&] { return derivative_moment(req.kernel, 1.0); }, "M_1(phi')");
  const double dnorm = member_norm(req.phi, derivative_of(req.f), "f'");
  const auto ops = build_operators(req);
  std::vector<double> lhs(ops.size()), rhs(ops.size(), dnorm);
  parallel_for(ops.size(), req.threads,
               [&](std::size_t i) { lhs[i] = norm_of(req.phi, ops[i].as_function().derivative_function()); });
  std::vector<BoundReport> out;
  push_fitted(out, req, "norm", req.ns, lhs, rhs, "");
  return out;
}

}  // namespace

RateFit rate_fit(std::span<const double> xs, std::span<const double> errors, double x_min) {
  if (xs.size() != errors.size()) throw std::invalid_argument("rate_fit: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] >= x_min && xs[i] > 0.0 && std::isfinite(errors[i]) && errors[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(errors[i]));
    }
  if (lx.size() < 4) throw std::invalid_argument("rate_fit: fewer than 4 usable points");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate_fit: all abscissae equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : std::max(0.0, 1.0 - sse / syy);
  fit.used = static_cast<int>(lx.size());
  return fit;
}

ErrorCurve error_curve(const IntervalFunction& f, const PhiFunction& phi, const DensityKernel& kernel,
                       std::span<const int> ns, double lambda, int threads) {
  if (ns.empty()) throw std::invalid_argument("error_curve: empty n list");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw std::invalid_argument("error_curve: n values must be strictly increasing");
  if (!(lambda > 0.0)) throw std::invalid_argument("error_curve: lambda must be positive");
  ErrorCurve c;
  c.phi = phi.id();
  c.kernel = kernel.id();
  c.f = f.name();
  c.ns.assign(ns.begin(), ns.end());
  c.lambda = lambda;
  c.lux_errors.resize(ns.size());
  c.modular_errors.resize(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t i) {
    const auto err = error_function(KantorovichOperator(kernel, f, ns[i]), f);
    c.lux_errors[i] = luxemburg_norm(phi, err);
    c.modular_errors[i] = modular_or_infinite(phi, err, lambda);
  });
  std::vector<double> xs(ns.begin(), ns.end());
  try {
    c.fit = rate_fit(xs, c.lux_errors);
  } catch (const std::invalid_argument&) {
    c.fit.slope = c.fit.intercept = c.fit.r2 = kNaN;
  }
  return c;
}

RateFit rate_fit(const ErrorCurve& curve, double n_min) {
  std::vector<double> xs(curve.ns.begin(), curve.ns.end());
  return rate_fit(xs, curve.lux_errors, n_min);
}

std::vector<std::string> bound_kinds() {
  return {"compact_direct",   "operator_norm", "weak_direct",      "delta_prime_direct", "general_modular",
          "quantitative",     "weak_quantitative", "steklov_direct", "bernstein",        "derivative_bound",
          "minkowski",        "weak_minkowski"};
}

std::optional<double> search_lambda(const std::function<bool(double)>& ok) {
  for (int i = 0; i <= 20; ++i) {
    const double l = std::ldexp(1.0, -i);
    if (ok(l)) return l;
  }
  return std::nullopt;
}

std::vector<BoundReport> verify_bound(const BoundRequest& req) {
  const auto& k = req.kind;
  if (k == "operator_norm") return operator_norm(req);
  if (k == "bernstein") return bernstein(req);
  if (k == "minkowski") return minkowski(req, false);
  if (k == "weak_minkowski") return minkowski(req, true);
  const auto known = bound_kinds();
  if (std::find(known.begin(), known.end(), k) == known.end())
    throw std::invalid_argument("unknown bound kind '" + k + "'");
  const auto cond = probe_conditions(req.phi);
  if (k == "compact_direct") return compact_direct(req, cond);
  if (k == "weak_direct") return weak_direct(req, cond);
  if (k == "delta_prime_direct") return delta_prime_direct(req, cond);
  if (k == "general_modular") return general_modular(req, cond);
  if (k == "quantitative") return quantitative(req, cond);
  if (k == "weak_quantitative") return weak_quantitative(req, cond);
  if (k == "steklov_direct") return steklov_direct(req, cond);
  return derivative_bound(req, cond);
}

bool all_pass(std::span<const BoundReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.pass; });
}

LipschitzFit lipschitz_fit(const IntervalFunction& f, const PhiFunction& phi, bool weak,
                           std::span<const double> deltas, std::span<const double> lambda_grid) {
  if (deltas.size() < 4) throw std::invalid_argument("lipschitz_fit: need at least 4 deltas");
  LipschitzFit fit;
  fit.deltas.assign(deltas.begin(), deltas.end());
  fit.moduli.resize(deltas.size());
  if (!weak) {
    for (std::size_t i = 0; i < deltas.size(); ++i) fit.moduli[i] = strong_modulus(phi, f, deltas[i], 1);
  } else {
    std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
    if (grid.empty())
      for (int i = 0; i <= 20; ++i) grid.push_back(std::ldexp(1.0, -i));
    bool found = false;
    for (double l : grid) {
      bool finite = true;
      for (std::size_t i = 0; i < deltas.size() && finite; ++i) {
        const auto w = weak_modulus(phi, f, deltas[i], l);
        fit.moduli[i] = value_of(w);
        finite = !w.infinite;
      }
      if (finite) {
        fit.lambda = l;
        found = true;
        break;
      }
    }
    if (!found) throw NotInWeakClass("weak modulus of '" + f.name() + "' is infinite for every lambda");
  }
  if (std::all_of(fit.moduli.begin(), fit.moduli.end(), [](double v) { return v == 0.0; })) {
    fit.nu_hat = kInf;
    fit.r2 = 1.0;
    fit.degenerate = true;
    return fit;
  }
  const auto r = rate_fit(fit.deltas, fit.moduli, 0.0);
  fit.nu_hat = r.slope;
  fit.r2 = r.r2;
  return fit;
}

Cutoff Cutoff::from_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("cutoff must lie in (0, 1)");
  return Cutoff{-std::log(eps)};
}

double Cutoff::eps() const { return std::exp(-log_inv); }

double inclusion_t1_closed(double t) {
  const double r = std::sqrt(1.0 - t);
  return r - 0.5 * t * std::log((1.0 - r) / (r + 1.0)) - 1.0 + t;
}

double inclusion_t2_closed(double t) {
  return std::sqrt(t) + (1.0 - t) * std::asinh(std::sqrt(t / (1.0 - t))) - t;
}

InclusionReport inclusion_example(double t, std::span<const Cutoff> cutoffs) {
  if (!(t > 0.0 && t <= 0.5)) throw std::invalid_argument("inclusion_example: need 0 < t <= 1/2");
  // f(x) = ln(x^{-1/2}) and phi(u) = e^u - 1, so phi(|f(x) - f(y)|) = sqrt(max/min) - 1.
  auto phi_gap = [](double x, double y) {
    return std::expm1(0.5 * std::abs(std::log(x) - std::log(y)));
  };
  quad::Options o;
  o.abs_tol = 1e-13;
  InclusionReport r;
  r.t = t;
  // T1 = integral over x in (0, 1-t) of phi(|f(x+t) - f(x)|); x = s^2 removes the x^{-1/2} singularity.
  r.t1_quadrature = quad::integrate([&](double s) { return s == 0.0 ? 2.0 * std::sqrt(t) : 2.0 * s * phi_gap(s * s + t, s * s); },
                                    0.0, std::sqrt(1.0 - t), o)
                        .value;
  // T2 = integral over x in (1-t, 1) of phi(|f(x-1+t) - f(x)|); x - 1 + t = s^2.
  r.t2_quadrature =
      quad::integrate([&](double s) {
        return s == 0.0 ? 2.0 * std::sqrt(1.0 - t) : 2.0 * s * phi_gap(s * s + 1.0 - t, s * s);
      }, 0.0, std::sqrt(t), o)
          .value;
  r.t1_closed = inclusion_t1_closed(t);
  r.t2_closed = inclusion_t2_closed(t);
  // lambda = 2: integral over z in (t + eps, 1) of phi(2 |f(z) - f(z - t)|).  With
  // w = ln(1/(z - t)) the integrand exp(2|f(z) - f(z-t)|)(z - t) - (z - t) stays
  // representable for eps far below the double range.
  const double w0 = -std::log1p(-t);
  auto integrand = [t](double w) {
    const double lz = std::log(t + std::exp(-w));  // ln z
    const double gap = std::abs(lz + w);            // 2|f(z) - f(z - t)|
    return std::exp(gap - w) - std::exp(-w);
  };
  for (const Cutoff& c : cutoffs) {
    r.cutoffs.push_back(c);
    double v = 0.0;
    if (c.log_inv > w0) {
      std::vector<double> pts{w0};
      for (double p = std::max(1.0, 2.0 * w0); p < c.log_inv; p *= 2.0) pts.push_back(p);
      pts.push_back(c.log_inv);
      v = quad::integrate(integrand, pts, o).value;
    }
    r.lambda2_trend.push_back(v);
    r.lambda2_closed.push_back(t * (c.log_inv - w0));
  }
  return r;
}

SobolevReport sobolev_counterexample(double p, std::span<const Cutoff> cutoffs) {
  if (!(p > 1.0)) throw std::invalid_argument("sobolev_counterexample: need p > 1");
  SobolevReport r;
  r.p = p;
  // Substituting x = e^{-s}: u'(x) = (x ln(1/x))^{-1/p}, so ln u' = (s - ln s)/p
  // and u'^p dx = ds / s exactly.
  auto log_up = [p](double s) { return (s - std::log(s)) / p; };
  auto logaddexp = [](double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
  };
  // phi~(u') dx = u'^p / log(e + u') dx
  const quad::Integrand orlicz = [&](double s) { return 1.0 / (s * logaddexp(1.0, log_up(s))); };
  const quad::Integrand lp = [](double s) { return std::exp(-std::log(s)); };
  const double s0 = std::numbers::ln2;
  quad::Options o;
  o.abs_tol = 1e-14;
  for (const Cutoff& c : cutoffs) {
    if (!(c.log_inv > s0)) throw std::invalid_argument("cutoff must lie below 1/2");
    r.cutoffs.push_back(c);
    std::vector<double> pts;
    for (double s = s0; s < c.log_inv; s *= 2.0) pts.push_back(s);
    pts.push_back(c.log_inv);
    r.modular.push_back(quad::integrate(orlicz, pts, o).value);
    r.lp_power.push_back(quad::integrate(lp, pts, o).value);
    r.lp_closed.push_back(std::log(c.log_inv) - std::log(s0));
  }
  if (r.modular.size() >= 2) {
    r.last_change = std::abs(r.modular.back() - r.modular[r.modular.size() - 2]);
    r.modular_stable = r.last_change < 1e-6;
  }
  r.lp_unbounded = !r.lp_power.empty() && r.lp_power.back() > 1e2;
  return r;
}

double k_functional_upper(const IntervalFunction& f, const PhiFunction& phi, double delta,
                          std::span<const double> h_grid) {
  if (h_grid.empty()) throw std::invalid_argument("k_functional_upper: empty h grid");
  double best = kInf;
  for (double h : h_grid) {
    const auto fh = steklov(f, 1, h);
    const auto diff = f - fh;
    // A difference at the rounding level of the Steklov quadrature is zero;
    // rescaling it to unit modular only amplifies noise.
    const double scale = sampled_sup(f);
    const bool noise = std::isfinite(scale) && sampled_sup(diff) <= 64.0 * kEps * std::max(1.0, scale);
    const double defect = noise ? 0.0 : luxemburg_norm(phi, diff);
    const double v = defect + delta * luxemburg_norm(phi, fh.derivative_function());
    best = std::min(best, v);
  }
  return best;
}

InverseReport inverse_consistency(const IntervalFunction& f, const PhiFunction& phi, const DensityKernel& kernel,
                                  std::span<const int> ns, std::span<const double> deltas, int threads) {
  const auto cond = probe_conditions(phi);
  require_beta(cond);
  require(kernel.has_derivative(), "kernel has no derivative");
  require_finite_moment([&] { return derivative_moment(kernel, 0.0); }, "M_0(phi')");
  require_finite_moment([&] { return moment(kernel, 1.0); }, "M_1(phi)");
  InverseReport rep;
  const auto curve = error_curve(f, phi, kernel, ns, 1.0, threads);
  if (std::all_of(curve.lux_errors.begin(), curve.lux_errors.end(), [](double e) { return e == 0.0; })) {
    rep.degenerate = true;
    rep.pass = true;
    rep.error_fit.slope = -kInf;
    rep.modulus_fit.nu_hat = kInf;
    rep.modulus_fit.degenerate = true;
    rep.gap = 0.0;
    rep.note = "errors vanish identically";
    return rep;
  }
  rep.error_fit = rate_fit(curve);
  rep.modulus_fit = lipschitz_fit(f, phi, false, deltas);
  rep.gap = std::abs(rep.error_fit.slope + rep.modulus_fit.nu_hat);
  rep.pass = rep.gap <= 0.15;
  rep.boundary = rep.modulus_fit.nu_hat >= 0.9 || rep.error_fit.slope <= -0.9;
  if (rep.boundary) rep.note = "exponent near 1: outside 0 < nu < 1, informational";
  return rep;
}

}  // namespace kantolab
