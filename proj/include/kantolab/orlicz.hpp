#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kantolab/interval_function.hpp"
#include "kantolab/quadrature.hpp"

namespace kantolab {

enum class Tri { no, yes, unknown };

using Params = std::vector<std::pair<std::string, double>>;

struct PhiFunction {
  std::string name;
  Params params;
  RealMap eval;
  bool convex = true;
  Tri n_function_hint = Tri::unknown;
  std::optional<double> delta2_constant;
  std::optional<double> delta_prime_constant;
  std::optional<double> beta_hint;

  double operator()(double u) const { return eval(u); }
  /// "power:p=2" style identifier.
  std::string id() const;
  double param(const std::string& key) const;
};

/// Catalog: power(p), zygmund(beta, gamma), exp(rho), exp_taylor, cosh, llogl,
/// plog_quotient(p).  Missing parameters take their defaults.
PhiFunction make_phi(const std::string& name, const Params& params = {});
/// Parses "name" or "name:key=value,key=value".
PhiFunction parse_phi(const std::string& text);
/// Splits "name:k=v,..." into its parts (shared with the kernel catalog).
std::pair<std::string, Params> parse_catalog_id(const std::string& text);
std::vector<std::string> phi_catalog();

struct ModularValue {
  double value = 0.0;
  bool infinite = false;
  bool converged = true;
  /// Integrand evaluations spent.
  std::size_t refinements = 0;
  /// Cutoff trend for pieces touching a singular point (empty otherwise).
  std::vector<double> trend;
};

/// I^phi[lambda f] = integral over [a, b] of phi(lambda |f|).
ModularValue modular(const PhiFunction& phi, const IntervalFunction& f, double lambda = 1.0,
                     const quad::Options& opts = {});

struct LuxemburgOptions {
  double rel_width = 1e-10;
  int max_bracket_steps = 200;
  quad::Options quad;
};

/// inf{u > 0 : I^phi[f/u] <= 1}.  Returns the upper end of the final bracket.
double luxemburg_norm(const PhiFunction& phi, const IntervalFunction& f, const LuxemburgOptions& opts = {});

struct ModulusOptions {
  int initial_points = 33;
  double min_ratio = 1e-3;
  double change_tol = 0.01;
  int max_doublings = 3;
  LuxemburgOptions lux;
};

/// omega_k(f, delta)_phi: a lower estimate of sup over |h| <= delta of
/// ||Delta^k_h f||_phi on a log-spaced grid of both signs.
double strong_modulus(const PhiFunction& phi, const IntervalFunction& f, double delta, int k = 1,
                      const ModulusOptions& opts = {});

/// Weak modulus: sup over |h| <= delta of I^phi[lambda (f(. + h) - f)].
ModularValue weak_modulus(const PhiFunction& phi, const IntervalFunction& f, double delta, double lambda,
                          const ModulusOptions& opts = {});

/// The |h| values (one sign) used at a given refinement level.
std::vector<double> modulus_grid(double delta, int points, double min_ratio);

struct ConditionVerdict {
  bool holds = false;
  double observed = 0.0;
  /// Point of the probe grid where `observed` was attained.
  double witness = 0.0;
};

struct ConditionReport {
  std::string label = "probe";
  bool axioms = false;
  bool convex = false;
  ConditionVerdict delta2;
  ConditionVerdict delta_prime;
  /// observed = phi(u)/u at the smallest grid point; see n_large_ratio.
  ConditionVerdict n_function;
  double n_large_ratio = 0.0;
  ConditionVerdict beta_monotone;
  double beta = 1.0;
  bool beta_strict = false;
};

/// Grid probes of the phi-function axioms, convexity, Delta_2, Delta', the
/// N-function limits and monotonicity of u^{-beta} phi(u).
ConditionReport probe_conditions(const PhiFunction& phi, std::optional<double> beta = std::nullopt,
                                 std::uint64_t seed = 12345);

std::vector<double> probe_grid();

}  // namespace kantolab
