#pragma once

#include <string>
#include <vector>

#include "kantolab/interval_function.hpp"
#include "kantolab/orlicz.hpp"

namespace kantolab {

/// Test functions on [0, 1]:
///   const[:c=1]        constant c
///   linear             x
///   sin                sin(2 pi x)
///   abs_pow[:nu=0.5]   |x - 1/2|^nu
///   step               indicator of [0, 1/2]
///   shifted_log        ln(x^{-1/2}), 0 at x = 0
///   sobolev_u[:p=2]    integral from 0 to x of (t ln(1/t))^{-1/p} on (0, 1/2), 0 beyond
IntervalFunction make_corpus(const std::string& name, const Params& params = {});
IntervalFunction parse_corpus(const std::string& text);
std::vector<std::string> corpus_catalog();

}  // namespace kantolab
