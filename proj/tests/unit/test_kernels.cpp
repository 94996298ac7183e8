#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "kantolab/errors.hpp"
#include "kantolab/kernels.hpp"
#include "kantolab/quadrature.hpp"

using namespace kantolab;

namespace {

double ramp_sigma(double x) { return std::clamp((x + 1.5) / 3.0, 0.0, 1.0); }
double ramp_density(double x) { return 0.5 * (ramp_sigma(x + 1.0) - ramp_sigma(x - 1.0)); }

// Brute-force sup over a fine u-grid with a wide k-window.
template <class Term>
double brute_sup(Term term, int kmax, int points) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double u = i / static_cast<double>(points);
    double s = 0.0;
    for (int k = -kmax; k <= kmax; ++k) s += term(u - k);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("ramp density: compact support and value at 0") {
    const auto k = make_kernel("ramp");
    REQUIRE(k.compact());
    CHECK(k.upsilon() == doctest::Approx(2.5));
    CHECK(k(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(k.phi_at_2 == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK_FALSE(k.has_derivative());
  }

  TEST_CASE("logistic density matches its closed form") {
    const auto k = make_kernel("logistic");
    const double e = std::numbers::e;
    for (double x : {0.0, 1.0, -1.0, 3.0, -3.0}) {
      const double closed = (e * e - 1.0) / 2.0 / ((1.0 + std::exp(1.0 + x)) * (1.0 + std::exp(1.0 - x)));
      CHECK(k(x) == doctest::Approx(closed).epsilon(1e-12));
    }
    CHECK_FALSE(k.compact());
    CHECK_THROWS_AS(k.upsilon(), HypothesisNotMet);
  }

  TEST_CASE("sigmoidal probes and the sigma(1) < 1 requirement") {
    for (const auto& name : kernel_catalog()) {
      const auto s = make_sigmoidal(name);
      CAPTURE(name);
      CHECK(s(-1e6) < 1e-3);
      CHECK(s(1e6) > 1 - 1e-3);
      CHECK(s(1.0) < 1.0);
      for (double x : {0.1, 0.7, 2.3, 9.0}) CHECK(s(x) - 0.5 == doctest::Approx(-(s(-x) - 0.5)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_kernel("bspline:s=2"), HypothesisNotMet);
    CHECK(make_sigmoidal("sigma_theta").relaxed_smoothness);
    CHECK_THROWS_AS(make_kernel("nope"), std::invalid_argument);
    CHECK_THROWS_AS(make_kernel("sigma_theta:theta=0.5"), std::invalid_argument);
  }

  TEST_CASE("decay descriptors") {
    const auto st = make_kernel("sigma_theta:theta=5");
    REQUIRE(std::holds_alternative<Decay>(st.support));
    CHECK(std::get<Decay>(st.support).alpha == doctest::Approx(4.0));
    CHECK(make_kernel("bspline:s=4").compact());
    CHECK(make_kernel("bspline:s=4").upsilon() == doctest::Approx(3.0));
  }

  TEST_CASE("density shape: even, nonnegative, unimodal, unit mass") {
    for (const auto& name : kernel_catalog()) {
      CAPTURE(name);
      const auto k = make_kernel(name);
      double prev = 0.0;
      bool shape = true;
      for (int i = 0; i <= 4000; ++i) {
        const double x = -20.0 + 40.0 * i / 4000.0;
        const double v = k(x);
        shape = shape && v >= 0.0 && std::abs(v - k(-x)) <= 1e-15;
        if (x < 0) shape = shape && v >= prev - 1e-15;
        if (x > 0) shape = shape && v <= prev + 1e-15;
        prev = v;
      }
      CHECK(shape);
      const double span[] = {-400.0, -20.0, -3.0, -1.5, -0.5, 0.0, 0.5, 1.5, 3.0, 20.0, 400.0};
      quad::Options o;
      o.abs_tol = 1e-13;
      const auto mass = quad::integrate(k.eval, span, o).value;
      // sigma_theta's algebraic tail beyond 400 carries about 1e-10 of mass
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  TEST_CASE("partition of unity") {
    std::vector<double> grid;
    for (int i = 0; i < 1000; ++i) grid.push_back(i / 999.0);
    CHECK(partition_defect(make_kernel("ramp"), grid) < 1e-12);
    CHECK(partition_defect(make_kernel("logistic"), grid) < 1e-8);
    for (const auto& name : kernel_catalog()) CHECK(partition_defect(make_kernel(name), grid) < 1e-8);
  }

  TEST_CASE("partition defect at 0 matches direct summation") {
    const auto k = make_kernel("logistic");
    double s = 0.0;
    for (int j = -200; j <= 200; ++j) s += k(-static_cast<double>(j));
    const double x0[] = {0.0};
    CHECK(std::abs(partition_defect(k, x0) - std::abs(1.0 - s)) < 1e-14);
  }

  TEST_CASE("moments") {
    for (const auto& name : kernel_catalog()) CHECK(moment(make_kernel(name), 0.0).value == doctest::Approx(1.0).epsilon(1e-8));
    const auto ramp = make_kernel("ramp");
    const double brute = brute_sup([](double t) { return ramp_density(t) * std::abs(t); }, 4, 100000);
    CHECK(moment(ramp, 1.0).value == doctest::Approx(brute).epsilon(1e-8));
    const auto logistic = make_kernel("logistic");
    const double m1 = moment(logistic, 1.0).value;
    CHECK(std::isfinite(m1));
    const int K = tail_truncation(logistic, 1.0);
    double widest = 0.0;
    for (int i = 0; i <= 1000; ++i) widest = std::max(widest, moment_summand(logistic, 1.0, i / 1000.0, 2 * K));
    CHECK(m1 == doctest::Approx(widest).epsilon(1e-8));
  }

  TEST_CASE("moment summand is 1-periodic") {
    const auto k = make_kernel("sigma_theta");
    for (double u : {0.0, 0.13, 0.5, 0.77}) {
      const int K = 400;
      CHECK(moment_summand(k, 1.5, u, K) == doctest::Approx(moment_summand(k, 1.5, u + 1.0, K + 1)).epsilon(1e-12));
    }
  }

  TEST_CASE("algebraic decay: moments of order >= alpha are flagged") {
    const auto k = make_kernel("sigma_theta:theta=5");
    CHECK_NOTHROW(moment(k, 1.0));
    CHECK_THROWS_AS(moment(k, 4.0), PotentiallyInfinite);
    CHECK_THROWS_AS(moment(make_kernel("sigma_theta:theta=3"), 2.0), PotentiallyInfinite);
  }

  TEST_CASE("hybrid moments") {
    const auto id = make_phi("power", {{"p", 1.0}});
    for (const auto& name : kernel_catalog()) {
      const auto k = make_kernel(name);
      CHECK(hybrid_moment(k, id, 0.0, 1.0).value == doctest::Approx(moment(k, 1.0).value).epsilon(1e-10));
    }
    const auto sq = make_phi("power", {{"p", 2.0}});
    const double brute = brute_sup([](double t) { return ramp_density(t) * t * t; }, 4, 100000);
    CHECK(hybrid_moment(make_kernel("ramp"), sq, 0.0, 1.0).value == doctest::Approx(brute).epsilon(1e-8));
    const auto slow = make_phi("exp", {{"rho", 0.25}});
    const auto m = hybrid_moment(make_kernel("logistic"), slow, 0.0, 2.0);
    CHECK(std::isfinite(m.value));
    // phi(|x|^2) = e^{x^2} - 1 outgrows e^{-|x|}
    CHECK_THROWS_AS(hybrid_moment(make_kernel("logistic"), make_phi("exp"), 0.0, 2.0), PotentiallyInfinite);
  }

  TEST_CASE("denominator floor") {
    std::vector<double> grid;
    for (int i = 0; i < 500; ++i) grid.push_back(i / 499.0);
    const auto r = denominator_floor(make_kernel("ramp"), 0.0, 1.0, 10, grid);
    CHECK(r.phi_at_2 == doctest::Approx(1.0 / 12.0));
    CHECK(r.min_sum >= r.phi_at_2 - 1e-12);
    const auto l = denominator_floor(make_kernel("logistic"), 0.0, 1.0, 5, grid);
    CHECK(l.phi_at_2 > 0.0);
    CHECK(l.min_sum >= l.phi_at_2 - 1e-12);
    CHECK_THROWS_AS(denominator_floor(make_kernel("ramp"), 0.0, 0.5, 1, grid), std::invalid_argument);
  }

  TEST_CASE("derivative of the density") {
    const auto k = make_kernel("logistic");
    for (double x : {-2.0, -0.3, 0.0, 0.8, 4.0})
      CHECK(k.derivative(x) == doctest::Approx((k(x + 1e-6) - k(x - 1e-6)) / 2e-6).epsilon(1e-6).scale(1e-9));
  }

  TEST_CASE("kernel dump") {
    std::ostringstream out;
    const double xs[] = {0.0, 1.0};
    dump_kernel(make_kernel("ramp"), xs, out);
    CHECK(out.str().rfind("x,phi,dphi\n", 0) == 0);
    CHECK(out.str().find("nan") != std::string::npos);
  }
}
