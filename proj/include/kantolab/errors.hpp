#pragma once

#include <stdexcept>
#include <string>

namespace kantolab {

/// Quadrature or root bracketing failed on an input where it should not.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A theorem's hypothesis probe failed; the bound is not applicable.
struct HypothesisNotMet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Moment or hybrid moment whose finiteness cannot be established.
struct PotentiallyInfinite : HypothesisNotMet {
  using HypothesisNotMet::HypothesisNotMet;
};

/// Luxemburg bracket never reached I[f/u] <= 1.
struct NotInOrliczSpace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every weak modulus on the lambda grid was infinite.
struct NotInWeakClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kantolab
