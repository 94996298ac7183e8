#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kantolab/interval_function.hpp"
#include "kantolab/orlicz.hpp"

namespace kantolab {

struct Sigmoidal {
  std::string name;
  Params params;
  RealMap eval;
  /// sigma'; empty when sigma is not C^1.
  RealMap derivative;
  /// Exponent of sigma(x) = O(|x|^{-alpha-1}) at -infinity (inf for exponential decay).
  double alpha = 0.0;
  /// Exponential decay rate of sigma at -infinity, 0 when algebraic or compact.
  double exp_rate = 0.0;
  /// sigma reaches 0 below -half_width and 1 above it (0 when never).
  double half_width = 0.0;
  bool relaxed_smoothness = false;
  bool sigma_at_one_lt_one = true;
  /// Points where sigma is not smooth.
  std::vector<double> corners;

  double operator()(double x) const { return eval(x); }
  std::string id() const;
};

Sigmoidal make_sigmoidal(const std::string& name, const Params& params = {});
Sigmoidal parse_sigmoidal(const std::string& text);
std::vector<std::string> kernel_catalog();

struct Compact {
  double upsilon = 0.0;
};
struct Decay {
  double alpha = 0.0;
  /// C in phi(x) <= C |x|^{-alpha-1} (algebraic) or C e^{-rate |x|} (rate > 0).
  double tail_constant = 0.0;
  double exp_rate = 0.0;
};
using Support = std::variant<Compact, Decay>;

struct DensityKernel {
  Sigmoidal source;
  RealMap eval;
  RealMap derivative;
  Support support;
  double phi_at_2 = 0.0;
  /// |x| beyond which phi < 1e-18 phi(0): terms past it are dropped from
  /// operator sums (inf when the decay is algebraic).
  double sum_radius = 0.0;
  /// Non-smooth points of phi.
  std::vector<double> kinks;

  double operator()(double x) const { return eval(x); }
  bool has_derivative() const { return static_cast<bool>(derivative); }
  bool compact() const { return std::holds_alternative<Compact>(support); }
  const std::string& name() const { return source.name; }
  std::string id() const { return source.id(); }
  /// Upsilon for compact kernels; throws HypothesisNotMet otherwise.
  double upsilon() const;
};

/// phi_sigma(x) = (sigma(x + 1) - sigma(x - 1)) / 2 with its support descriptor.
DensityKernel build_density(const Sigmoidal& sigma);
DensityKernel make_kernel(const std::string& text);

/// max over the grid of |sum_k phi(x - k) - 1|.
double partition_defect(const DensityKernel& kernel, std::span<const double> grid);

struct MomentValue {
  double value = 0.0;
  /// Terms with |k| <= truncation were summed.
  int truncation = 0;
  double argmax = 0.0;
};

/// Smallest K with the analytic tail bound of sum_{|u-k| > K} phi(u-k)|u-k|^nu below eps.
int tail_truncation(const DensityKernel& kernel, double nu, double eps = 1e-10);

/// sum_{|k| <= K} phi(u - k) |u - k|^nu.
double moment_summand(const DensityKernel& kernel, double nu, double u, int K);

/// M_nu: sup over u in [0, 1] of sum_k phi(u - k)|u - k|^nu.  Throws
/// PotentiallyInfinite for decay kernels with nu >= alpha.
MomentValue moment(const DensityKernel& kernel, double nu);

/// M^phi_{nu,mu}: sup over u of sum_k phi_sigma(u-k)|u-k|^nu phi(|u-k|^mu).
/// Throws PotentiallyInfinite when doubling the truncation moves the value.
MomentValue hybrid_moment(const DensityKernel& kernel, const PhiFunction& phi, double nu, double mu);

/// M_nu(phi'): the same sup with |phi'| in place of phi.
MomentValue derivative_moment(const DensityKernel& kernel, double nu);

struct DenominatorFloor {
  double min_sum = 0.0;
  double phi_at_2 = 0.0;
  double argmin = 0.0;
};

/// min over the grid of sum_{k=ceil(na)}^{floor(nb)-1} phi(nx - k), with phi(2).
DenominatorFloor denominator_floor(const DensityKernel& kernel, double a, double b, int n,
                                   std::span<const double> grid);

/// Plain-text table "x phi(x) phi'(x)" (phi' column nan when absent).
void dump_kernel(const DensityKernel& kernel, std::span<const double> xs, std::ostream& out);

}  // namespace kantolab
