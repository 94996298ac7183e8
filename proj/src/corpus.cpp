#include "kantolab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "kantolab/format.hpp"
#include "kantolab/quadrature.hpp"

namespace kantolab {

namespace {

double pick(const std::string& name, const Params& given, const std::string& key, double fallback) {
  double v = fallback;
  for (const auto& [k, val] : given) {
    if (k != key) throw std::invalid_argument("corpus '" + name + "' has no parameter '" + k + "'");
    v = val;
  }
  return v;
}

void no_params(const std::string& name, const Params& given) {
  if (!given.empty()) throw std::invalid_argument("corpus '" + name + "' takes no parameters");
}

// u(x) = integral_0^x (t ln(1/t))^{-1/p} dt on [0, 1/2]: cumulative table on a
// grid that is geometric near 0, completed by local quadrature.
class SobolevPrimitive {
 public:
  explicit SobolevPrimitive(double p) : p_(p) {
    for (int m = 40; m >= 1; --m) nodes_.push_back(std::ldexp(1.0 / 512, -m));
    for (int j = 1; j <= 256; ++j) nodes_.push_back(j / 512.0);
    values_.resize(nodes_.size());
    values_[0] = quad::integrate_singular(density(), 0.0, nodes_[0], true, false, opts()).value;
    for (std::size_t i = 1; i < nodes_.size(); ++i)
      values_[i] = values_[i - 1] + quad::integrate(density(), nodes_[i - 1], nodes_[i], opts()).value;
  }

  double derivative(double x) const {
    if (x <= 0.0 || x >= 0.5) return 0.0;
    return std::pow(x * std::log(1.0 / x), -1.0 / p_);
  }

  double operator()(double x) const {
    if (x <= 0.0) return 0.0;
    x = std::min(x, 0.5);
    if (x < nodes_[0]) return quad::integrate_singular(density(), 0.0, x, true, false, opts()).value;
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x) - 1;
    const auto i = static_cast<std::size_t>(it - nodes_.begin());
    if (nodes_[i] == x) return values_[i];
    return values_[i] + quad::integrate(density(), nodes_[i], x, opts()).value;
  }

 private:
  quad::Integrand density() const {
    return [this](double t) { return derivative(t); };
  }
  static quad::Options opts() {
    quad::Options o;
    o.abs_tol = 1e-13;
    return o;
  }

  double p_;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

}  // namespace

std::vector<std::string> corpus_catalog() {
  return {"const", "linear", "sin", "abs_pow", "step", "shifted_log", "sobolev_u"};
}

IntervalFunction make_corpus(const std::string& name, const Params& params) {
  IntervalFunction::Spec s;
  s.a = 0.0;
  s.b = 1.0;
  s.name = name;
  if (name == "const") {
    const double c = pick(name, params, "c", 1.0);
    s.eval = [c](double) { return c; };
    s.derivative = [](double) { return 0.0; };
    if (c != 1.0) s.name = "const:c=" + format_double(c);
  } else if (name == "linear") {
    no_params(name, params);
    s.eval = [](double x) { return x; };
    s.derivative = [](double) { return 1.0; };
  } else if (name == "sin") {
    no_params(name, params);
    s.eval = [](double x) { return std::sin(2 * std::numbers::pi * x); };
    s.derivative = [](double x) { return 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * x); };
  } else if (name == "abs_pow") {
    const double nu = pick(name, params, "nu", 0.5);
    if (!(nu > 0.0)) throw std::invalid_argument("abs_pow: need nu > 0");
    s.eval = [nu](double x) { return std::pow(std::abs(x - 0.5), nu); };
    s.derivative = [nu](double x) {
      const double d = x - 0.5;
      if (d == 0.0) return nu >= 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
      return (d > 0 ? nu : -nu) * std::pow(std::abs(d), nu - 1.0);
    };
    s.kinks = {0.5};
    if (nu < 1.0) s.derivative_singular = {0.5};
    s.name = "abs_pow:nu=" + format_double(nu);
  } else if (name == "step") {
    no_params(name, params);
    s.eval = [](double x) { return x <= 0.5 ? 1.0 : 0.0; };
    s.kinks = {0.5};
  } else if (name == "shifted_log") {
    no_params(name, params);
    s.eval = [](double x) { return x == 0.0 ? 0.0 : -0.5 * std::log(x); };
    s.derivative = [](double x) { return x == 0.0 ? 0.0 : -0.5 / x; };
    s.singular = {0.0};
  } else if (name == "sobolev_u") {
    const double p = pick(name, params, "p", 2.0);
    if (!(p > 1.0)) throw std::invalid_argument("sobolev_u: need p > 1");
    auto prim = std::make_shared<const SobolevPrimitive>(p);
    s.eval = [prim](double x) { return (*prim)(x); };
    s.derivative = [prim](double x) { return prim->derivative(x); };
    s.kinks = {0.5};
    s.derivative_singular = {0.0};
    if (p != 2.0) s.name = "sobolev_u:p=" + format_double(p);
  } else {
    throw std::invalid_argument("unknown corpus function '" + name + "'");
  }
  return IntervalFunction(std::move(s));
}

IntervalFunction parse_corpus(const std::string& text) {
  auto [name, params] = parse_catalog_id(text);
  return make_corpus(name, params);
}

}  // namespace kantolab
