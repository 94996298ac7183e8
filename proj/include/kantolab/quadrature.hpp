#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kantolab::quad {

using Integrand = std::function<double(double)>;

/// Gauss-Legendre rule on [-1, 1], nodes found by Newton iteration on P_n.
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  template <class F>
  double apply(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return half * sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// The fixed local rule used by the adaptive integrator (10 points).
const GaussLegendre& local_rule();

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-13;
  int max_depth = 40;
  std::size_t max_intervals = 400000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  bool finite = true;
  std::size_t evaluations = 0;
};

/// Globally adaptive composite Gauss-Legendre: the interval with the largest
/// halving error is split until the summed error meets the tolerance.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, over consecutive pieces [p0,p1], [p1,p2], ... sharing one error budget.
/// `points` must be sorted; duplicates are ignored.
Result integrate(const Integrand& f, std::span<const double> points, const Options& opts = {});

/// Outcome of integrating over a piece with an (integrable or not) endpoint singularity.
struct SingularResult {
  double value = 0.0;
  bool diverged = false;
  bool converged = true;
  /// Cumulative estimates on [a + eps_k, b] (or [a, b - eps_k]) for the eps ladder.
  std::vector<double> trend;
  std::size_t evaluations = 0;
};

/// Cutoff ladder used to audit endpoint singularities, relative to min(1, width/2).
inline constexpr double kSingularLadder[] = {1e-3, 1e-4, 1e-5, 1e-6};

/// Integrates f on [a, b] where f may blow up at a and/or b.  The ladder of
/// cutoffs decides convergence vs divergence from the increment ratios; when
/// convergent, the innermost piece is integrated after x = a + eps * e^{-s}.
SingularResult integrate_singular(const Integrand& f, double a, double b, bool singular_left,
                                  bool singular_right, const Options& opts = {});

}  // namespace kantolab::quad
