#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kantolab/interval_function.hpp"
#include "kantolab/kernels.hpp"
#include "kantolab/orlicz.hpp"

namespace kantolab {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used = 0;
};

/// Least squares of log(error) on log(x) over points with x >= x_min and a
/// finite positive error.  Throws std::invalid_argument with fewer than 4.
RateFit rate_fit(std::span<const double> xs, std::span<const double> errors, double x_min = 8.0);

struct ErrorCurve {
  std::string phi;
  std::string kernel;
  std::string f;
  std::vector<int> ns;
  std::vector<double> lux_errors;
  std::vector<ModularValue> modular_errors;
  double lambda = 1.0;
  /// Fit of lux_errors against n (nan when the errors vanish).
  RateFit fit;
};

ErrorCurve error_curve(const IntervalFunction& f, const PhiFunction& phi, const DensityKernel& kernel,
                       std::span<const int> ns, double lambda = 1.0, int threads = 1);

RateFit rate_fit(const ErrorCurve& curve, double n_min = 8.0);

struct BoundReport {
  std::string kind;
  /// Which inequality of the kind: norm, modular, (i), (ii), ratio, spread...
  std::string form;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double tol = 0.0;
  std::string params;
};

struct BoundRequest {
  std::string kind;
  IntervalFunction f;
  PhiFunction phi;
  DensityKernel kernel;
  std::vector<int> ns;
  /// Step sizes for steklov_direct.
  std::vector<double> hs;
  std::optional<double> lambda;
  double tol = 1e-6;
  /// Allowed max/min of a fitted-constant ratio sequence.
  double max_spread = 4.0;
  int threads = 1;
};

std::vector<std::string> bound_kinds();

/// Checks one inequality family over req.ns (or req.hs).  Explicit constants
/// give one row per n; fitted constants give per-n ratio rows plus a
/// "spread" row that carries the pass flag.  Throws HypothesisNotMet when a
/// hypothesis probe fails.
std::vector<BoundReport> verify_bound(const BoundRequest& req);

bool all_pass(std::span<const BoundReport> reports);

/// First lambda in {1, 1/2, ..., 2^-20} for which ok(lambda) holds.
std::optional<double> search_lambda(const std::function<bool(double)>& ok);

struct LipschitzFit {
  double nu_hat = 0.0;
  double r2 = 0.0;
  /// lambda actually used (weak fits).
  double lambda = 1.0;
  std::vector<double> deltas;
  std::vector<double> moduli;
  bool degenerate = false;
};

/// Fitted exponent of omega(f, delta) (strong) or of the weak modulus of
/// lambda f against delta.  A zero modulus gives nu_hat = inf, degenerate.
/// Weak fits take the first lambda on `lambda_grid` with all moduli finite
/// and throw NotInWeakClass when there is none.
LipschitzFit lipschitz_fit(const IntervalFunction& f, const PhiFunction& phi, bool weak,
                           std::span<const double> deltas, std::span<const double> lambda_grid = {});

/// A cutoff epsilon stored as ln(1/epsilon), so cutoffs far below the
/// smallest double stay representable.
struct Cutoff {
  double log_inv = 0.0;
  static Cutoff from_eps(double eps);
  static Cutoff from_log(double log_inv) { return Cutoff{log_inv}; }
  double eps() const;
};

struct InclusionReport {
  double t = 0.0;
  double t1_quadrature = 0.0;
  double t1_closed = 0.0;
  double t2_quadrature = 0.0;
  double t2_closed = 0.0;
  std::vector<Cutoff> cutoffs;
  /// Integral over [t + eps, 1] of phi(2 |f(z) - f(z - t)|), per cutoff.
  std::vector<double> lambda2_trend;
  /// Closed form t ln((1 - t)/eps) of the same integral.
  std::vector<double> lambda2_closed;
};

double inclusion_t1_closed(double t);
double inclusion_t2_closed(double t);

/// The ln(x^{-1/2}) example under phi = e^u - 1.
InclusionReport inclusion_example(double t, std::span<const Cutoff> cutoffs);

struct SobolevReport {
  double p = 2.0;
  std::vector<Cutoff> cutoffs;
  /// integral over [eps, 1/2] of phi~(u'), phi~(t) = t^p / log(e + t).
  std::vector<double> modular;
  /// integral over [eps, 1/2] of |u'|^p.
  std::vector<double> lp_power;
  /// ln ln(1/eps) - ln ln 2.
  std::vector<double> lp_closed;
  double last_change = 0.0;
  bool modular_stable = false;
  bool lp_unbounded = false;
};

SobolevReport sobolev_counterexample(double p, std::span<const Cutoff> cutoffs);

/// min over h of ||f - f_{1,h}|| + delta ||f_{1,h}'||: an upper bound of the K-functional.
double k_functional_upper(const IntervalFunction& f, const PhiFunction& phi, double delta,
                          std::span<const double> h_grid);

struct InverseReport {
  RateFit error_fit;
  LipschitzFit modulus_fit;
  double gap = 0.0;
  bool pass = false;
  bool degenerate = false;
  /// nu near 1: outside the open range of the characterization.
  bool boundary = false;
  std::string note;
};

InverseReport inverse_consistency(const IntervalFunction& f, const PhiFunction& phi, const DensityKernel& kernel,
                                  std::span<const int> ns, std::span<const double> deltas, int threads = 1);

}  // namespace kantolab
