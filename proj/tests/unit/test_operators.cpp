#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "kantolab/corpus.hpp"
#include "kantolab/errors.hpp"
#include "kantolab/operators.hpp"
#include "kantolab/orlicz.hpp"

using namespace kantolab;

namespace {

double ramp_sigma(double x) { return std::clamp((x + 1.5) / 3.0, 0.0, 1.0); }
double ramp_density(double x) { return 0.5 * (ramp_sigma(x + 1.0) - ramp_sigma(x - 1.0)); }

std::vector<double> grid(int n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST_SUITE("operators") {
  TEST_CASE("cell averages") {
    for (double a : cell_averages(make_corpus("const", {{"c", 2.5}}), 7)) CHECK(a == 2.5);
    const auto lin = cell_averages(make_corpus("linear"), 8);
    for (std::size_t k = 0; k < lin.size(); ++k) CHECK(lin[k] == doctest::Approx((2.0 * k + 1) / 16.0).epsilon(1e-14));
    CHECK(cell_averages(make_corpus("step"), 4)[1] == 1.0);
    CHECK(cell_averages(make_corpus("step"), 4)[2] == 0.0);
    CHECK_THROWS_AS(cell_averages(make_corpus("sin"), 0), std::invalid_argument);
  }

  TEST_CASE("cell averages of a singular function stay within the cell range") {
    const auto avg = cell_averages(make_corpus("shifted_log"), 10);
    // first cell: 10 * integral_0^0.1 of -ln(x)/2 = (1 + ln 10)/2
    CHECK(avg[0] == doctest::Approx(0.5 * (1.0 + std::log(10.0))).epsilon(1e-9));
    for (std::size_t k = 1; k < avg.size(); ++k) {
      CHECK(avg[k] <= -0.5 * std::log(k / 10.0));
      CHECK(avg[k] >= -0.5 * std::log((k + 1) / 10.0));
    }
  }

  TEST_CASE("constants are reproduced exactly") {
    for (const auto& name : kernel_catalog()) {
      const auto k = make_kernel(name);
      for (int n : {1, 5, 33}) {
        const KantorovichOperator op(k, make_corpus("const", {{"c", -1.75}}), n);
        for (double x : grid(37)) CHECK(op(x) == -1.75);
        if (k.has_derivative())
          for (double x : grid(11)) CHECK(op.derivative(x) == 0.0);
      }
    }
  }

  TEST_CASE("ramp operator against an independent summation") {
    const int n = 8;
    const auto f = make_corpus("linear");
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
      const double w = ramp_density(n * 0.5 - k);
      num += w * (2.0 * k + 1) / (2.0 * n);
      den += w;
    }
    CHECK(apply(make_kernel("ramp"), f, n, 0.5) == doctest::Approx(num / den).epsilon(1e-12));
  }

  TEST_CASE("derivative matches finite differences") {
    const auto k = make_kernel("logistic");
    const auto f = make_corpus("sin");
    const KantorovichOperator op(k, f, 16);
    for (double x : {0.37, 0.05, 0.81}) {
      const double fd = (op(x + 1e-6) - op(x - 1e-6)) / 2e-6;
      CHECK(std::abs(op.derivative(x) - fd) < 1e-5);
    }
    CHECK(apply_derivative(k, f, 16, 0.37) == doctest::Approx(op.derivative(0.37)));
    CHECK_THROWS_AS(apply_derivative(make_kernel("ramp"), f, 16, 0.3), HypothesisNotMet);
  }

  TEST_CASE("linearity and the sup bound") {
    const auto k = make_kernel("sigma_theta");
    const auto f = make_corpus("sin"), g = make_corpus("abs_pow");
    const KantorovichOperator kf(k, f, 12), kg(k, g, 12), kh(k, f.scaled(2.0) + g.scaled(-0.5), 12);
    for (double x : grid(25)) {
      CHECK(kh(x) == doctest::Approx(2.0 * kf(x) - 0.5 * kg(x)).epsilon(1e-8));
      CHECK(std::abs(kf(x)) <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("denominator stays above phi(2)") {
    for (const auto& name : kernel_catalog()) {
      const auto k = make_kernel(name);
      const KantorovichOperator op(k, make_corpus("sin"), 9);
      for (double x : grid(200)) CHECK(op.denominator(x) >= k.phi_at_2 - 1e-12);
    }
  }

  TEST_CASE("Steklov functions") {
    const auto c = steklov(make_corpus("const", {{"c", 3.0}}), 2, 0.2);
    CHECK(c(0.4) == doctest::Approx(3.0).epsilon(1e-13));
    const double h = 0.1;
    const auto s = steklov(make_corpus("sin"), 1, h);
    const double tp = 2 * std::numbers::pi;
    for (double x : {0.0, 0.3, 0.95})
      CHECK(std::abs(s(x) - (std::cos(tp * x) - std::cos(tp * (x + h))) / (tp * h)) < 1e-10);
    CHECK(s.derivative(0.3) == doctest::Approx((std::sin(tp * 0.4) - std::sin(tp * 0.3)) / h));
    CHECK_THROWS_AS(steklov(make_corpus("sin"), 3, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(steklov(make_corpus("sin"), 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(steklov(make_corpus("sin"), 2, 0.6), std::invalid_argument);
  }

  TEST_CASE("Steklov approximation improves as h shrinks") {
    const auto phi = make_phi("power", {{"p", 2.0}});
    for (const auto& name : {"sin", "step", "abs_pow"}) {
      const auto f = make_corpus(name);
      double prev = INFINITY;
      for (double h : {0.1, 0.05, 0.025}) {
        const double m = modular(phi, f - steklov(f, 1, h), 1.0).value;
        CHECK(m < prev);
        prev = m;
      }
    }
  }

  TEST_CASE("Hardy-Littlewood maximal function") {
    CHECK(hl_maximal(make_corpus("const", {{"c", -2.0}}), 0.3) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hl_maximal(make_corpus("step"), 0.75) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    const auto f = make_corpus("sin"), g = make_corpus("sin").scaled(1.5);
    for (double x : {0.1, 0.4, 0.77}) {
      CHECK(hl_maximal(f, x) <= hl_maximal(g, x) + 1e-10);
      CHECK(hl_maximal(f, x) >= std::abs(f(x)) - 1e-6);
    }
  }

  TEST_CASE("operator dump") {
    const auto f = make_corpus("sin");
    const KantorovichOperator op(make_kernel("logistic"), f, 4);
    std::ostringstream out;
    const double xs[] = {0.0, 0.5};
    dump_operator(op, f, xs, out);
    CHECK(out.str().rfind("x,f,Knf,dKnf\n", 0) == 0);
  }
}
