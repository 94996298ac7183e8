#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "kantolab/interval_function.hpp"
#include "kantolab/kernels.hpp"
#include "kantolab/quadrature.hpp"

namespace kantolab {

/// Integral of f over [lo, hi] (any real range; periodic images of kinks and
/// singular points are split out).  Throws NumericalFailure on divergence.
double integrate_function(const IntervalFunction& f, double lo, double hi, const quad::Options& opts = {});

/// n * integral of f over [k/n, (k+1)/n] for k = ceil(na) .. floor(nb) - 1.
std::vector<double> cell_averages(const IntervalFunction& f, int n, const quad::Options& opts = {});

/// K_n f for a fixed (kernel, f, n): cell averages are computed once, after
/// which evaluation is read-only and safe to share between threads.
class KantorovichOperator {
 public:
  KantorovichOperator(const DensityKernel& kernel, const IntervalFunction& f, int n, const quad::Options& opts = {});

  int n() const { return d_->n; }
  long k_first() const { return d_->k0; }
  long k_last() const { return d_->k0 + static_cast<long>(d_->avg.size()) - 1; }
  std::span<const double> averages() const { return d_->avg; }
  const DensityKernel& kernel() const { return d_->kernel; }

  double operator()(double x) const;
  /// Quotient-rule derivative; throws HypothesisNotMet if the kernel has no derivative.
  double derivative(double x) const;
  /// sum_k phi(nx - k) over the index range.
  double denominator(double x) const;

  /// K_n f as an IntervalFunction on [a, b] (derivative attached when available).
  IntervalFunction as_function() const;

 private:
  struct Data {
    DensityKernel kernel;
    int n = 0;
    double a = 0.0, b = 0.0;
    long k0 = 0;
    std::vector<double> avg;
  };
  std::shared_ptr<const Data> d_;

  template <class F>
  void for_each_term(double x, F&& fn) const;
};

double apply(const DensityKernel& kernel, const IntervalFunction& f, int n, double x);
double apply_derivative(const DensityKernel& kernel, const IntervalFunction& f, int n, double x);

/// Steklov function f_{k,h} for k in {1, 2}.  For k = 1 the exact derivative
/// (f(x + h) - f(x)) / h is attached.
IntervalFunction steklov(const IntervalFunction& f, int k, double h, const quad::Options& opts = {});

/// Hardy-Littlewood maximal function at x: a lower estimate of
/// sup_{u != x} |x - u|^{-1} |integral_x^u |f||.
double hl_maximal(const IntervalFunction& f, double x, const quad::Options& opts = {});

/// Table "x f K_n f K_n' f" (derivative column nan when unavailable).
void dump_operator(const KantorovichOperator& op, const IntervalFunction& f, std::span<const double> xs,
                   std::ostream& out);

}  // namespace kantolab
