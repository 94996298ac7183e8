#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace kantolab {

using RealMap = std::function<double(double)>;

/// A real function on [a, b], extended (b - a)-periodically outside the interval.
///
/// `kinks` are interior points where the function or its derivative jumps;
/// `singular` are points where |f| is unbounded.  Both are split hints for
/// quadrature and are stored reduced to [a, b).
class IntervalFunction {
 public:
  struct Spec {
    double a = 0.0;
    double b = 1.0;
    RealMap eval;
    RealMap derivative;
    std::vector<double> kinks;
    std::vector<double> singular;
    /// Points where the derivative (but not f) is unbounded.
    std::vector<double> derivative_singular;
    std::string name;
  };

  IntervalFunction() = default;
  explicit IntervalFunction(Spec spec);
  IntervalFunction(double a, double b, RealMap eval, RealMap derivative = {},
                   std::vector<double> kinks = {});

  double a() const { return d_->a; }
  double b() const { return d_->b; }
  double period() const { return d_->b - d_->a; }
  const std::string& name() const { return d_->name; }

  /// Value at x; x outside [a, b] is reduced by the period first.
  double operator()(double x) const { return d_->eval(reduce(x)); }

  bool has_derivative() const { return static_cast<bool>(d_->derivative); }
  double derivative(double x) const;
  /// f' as a function on the same interval (throws if f has no derivative).
  IntervalFunction derivative_function() const;

  const std::vector<double>& kinks() const { return d_->kinks; }
  const std::vector<double>& singular() const { return d_->singular; }

  /// Reduces x into [a, b]; points already inside are left untouched.
  double reduce(double x) const;

  /// Sorted split points in [lo, hi]: lo, hi and every periodic image of the
  /// kinks, singular points and the wrap point a.
  std::vector<double> breakpoints(double lo, double hi) const;
  /// True if x is (a periodic image of) a singular point.
  bool is_singular_at(double x) const;

  /// g(x) = f(x + h).
  IntervalFunction shifted(double h) const;
  /// g(x) = c f(x).
  IntervalFunction scaled(double c) const;
  /// g(x) = |f(x)|.
  IntervalFunction absolute() const;
  /// Same function with values cached per argument.  The cache belongs to the
  /// returned object only; do not share it across threads.
  IntervalFunction memoized() const;
  IntervalFunction renamed(std::string name) const;

  friend IntervalFunction operator+(const IntervalFunction& f, const IntervalFunction& g);
  friend IntervalFunction operator-(const IntervalFunction& f, const IntervalFunction& g);

  const Spec& spec() const { return *d_; }

 private:
  std::shared_ptr<const Spec> d_;
};

/// k-th forward difference sum_j (-1)^{k-j} C(k,j) f(x + j h).
IntervalFunction finite_difference(const IntervalFunction& f, double h, int k);

/// Sorted union of point lists with near-duplicates (relative 1e-14) removed.
std::vector<double> merge_points(std::vector<double> pts, double scale = 1.0);

}  // namespace kantolab
