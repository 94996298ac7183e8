#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kantolab/format.hpp"
#include "kantolab/interval_function.hpp"
#include "kantolab/quadrature.hpp"

using namespace kantolab;

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre rule of order n is exact for degree 2n-1") {
    for (int n : {1, 2, 5, 10, 32}) {
      const quad::GaussLegendre rule(n);
      const int d = 2 * n - 1;
      const double got = rule.apply([d](double x) { return std::pow(x, d) + std::pow(x, d - 1); }, 0.0, 1.0);
      CHECK(got == doctest::Approx(1.0 / (d + 1) + 1.0 / d).epsilon(1e-13));
    }
  }

  TEST_CASE("weights sum to the interval length") {
    const quad::GaussLegendre rule(20);
    double s = 0.0;
    for (double w : rule.weights()) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("adaptive rule on smooth and kinked integrands") {
    auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    const double pts[] = {-1.0, 0.3, 1.0};
    auto k = quad::integrate([](double x) { return std::abs(x - 0.3); }, pts);
    CHECK(k.value == doctest::Approx(0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7).epsilon(1e-13));
  }

  TEST_CASE("non-finite integrand is flagged") {
    auto r = quad::integrate([](double x) { return x > 0.9 ? INFINITY : 1.0; }, 0.0, 1.0);
    CHECK_FALSE(r.finite);
  }

  TEST_CASE("integrable endpoint singularity converges, 1/x diverges") {
    auto ok = quad::integrate_singular([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, true, false);
    CHECK_FALSE(ok.diverged);
    CHECK(ok.value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(ok.trend.size() == 4);
    auto bad = quad::integrate_singular([](double x) { return 1.0 / x; }, 0.0, 1.0, true, false);
    CHECK(bad.diverged);
    auto both = quad::integrate_singular([](double x) { return 1.0 / std::sqrt(x * (1 - x)); }, 0.0, 1.0, true, true);
    CHECK(both.value == doctest::Approx(std::numbers::pi).epsilon(1e-7));
  }
}

TEST_SUITE("interval_function") {
  TEST_CASE("periodic extension") {
    IntervalFunction f(0.0, 2.0, [](double x) { return x * x; });
    CHECK(f(2.5) == doctest::Approx(0.25));
    CHECK(f(-0.5) == doctest::Approx(2.25));
    CHECK(f.period() == 2.0);
  }

  TEST_CASE("shift, scale, differences") {
    IntervalFunction f(0.0, 1.0, [](double x) { return x; }, [](double) { return 1.0; });
    CHECK(f.shifted(0.25)(0.5) == doctest::Approx(0.75));
    CHECK(f.shifted(0.25)(0.9) == doctest::Approx(0.15));
    CHECK(f.scaled(-2.0)(0.5) == doctest::Approx(-1.0));
    CHECK(finite_difference(f, 0.1, 1)(0.2) == doctest::Approx(0.1));
    CHECK(finite_difference(f, 0.1, 2)(0.2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK((f + f)(0.3) == doctest::Approx(0.6));
    CHECK((f - f)(0.3) == 0.0);
    CHECK(f.derivative_function()(0.4) == 1.0);
  }

  TEST_CASE("breakpoints include periodic images of kinks and the wrap point") {
    IntervalFunction::Spec s;
    s.eval = [](double x) { return x < 0.5 ? 1.0 : 0.0; };
    s.kinks = {0.5};
    IntervalFunction f(std::move(s));
    const auto p = f.breakpoints(0.25, 1.75);
    const std::vector<double> want{0.25, 0.5, 1.0, 1.5, 1.75};
    REQUIRE(p.size() == want.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(want[i]));
  }

  TEST_CASE("a < b is required") {
    CHECK_THROWS(IntervalFunction(1.0, 1.0, [](double) { return 0.0; }));
  }
}

TEST_SUITE("format") {
  TEST_CASE("shortest round-trip doubles") {
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-3.0) == "-3.0");
    CHECK(format_double(1e-20) == "1e-20");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(NAN) == "nan");
  }
  TEST_CASE("csv escaping") {
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"") == "\"q\"\"\"");
    CHECK(csv_escape("plain") == "plain");
  }
}
