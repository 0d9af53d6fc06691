#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ridgeshift/errors.hpp"
#include "ridgeshift/resolvent_solver.hpp"

using namespace ridgeshift;

namespace {

const double kGammas[] = {0.1, 0.5, 1.0, 2.0, 10.0};
const double kLambdas[] = {1e-3, 0.1, 1.0, 10.0};

SpectralModel two_scale() { return SpectralModel({{1.0, 0.5, 0.5}, {0.1, 0.5, 0.5}}); }

}  // namespace

TEST_SUITE("resolvent_solver") {
  TEST_CASE("isotropic golden values at gamma = lambda = 1") {
    const auto s = solve_state(SpectralModel::isotropic(), 1.0, 1.0);
    CHECK(s.nu == doctest::Approx(0.6180339887498948).epsilon(1e-14));
    CHECK(s.nu_prime == doctest::Approx(0.4472135954999579).epsilon(1e-13));
    CHECK(s.m == doctest::Approx(1.0 / (1.0 + s.nu)).epsilon(1e-15));
    REQUIRE(s.g.size() == 1);
    CHECK(s.g[0] == doctest::Approx(1.0 / (s.m + 1.0)).epsilon(1e-15));
  }

  TEST_CASE("vanishing gamma approaches 1 / (1 + lambda)") {
    const auto s = solve_state(SpectralModel::isotropic(), 1e-8, 1.0);
    CHECK(std::abs(s.nu - 0.5) <= 1e-6);
    CHECK(std::abs(closed_form_nu_iso(1e-8, 1.0) - 0.5) <= 1e-6);
  }

  TEST_CASE("vanishing gamma limit for a general spectrum") {
    const SpectralModel m({{0.2, 0.3, 0.3}, {1.0, 0.4, 0.3}, {4.0, 0.3, 0.4}});
    for (double lambda : kLambdas) {
      double limit = 0.0;
      for (const auto& a : m.atoms()) limit += a.weight * a.variance / (a.variance + lambda);
      CHECK(std::abs(solve_state(m, 1e-8, lambda).nu - limit) <= 1e-6);
    }
  }

  TEST_CASE("two-scale golden value") {
    const auto s = solve_state(two_scale(), 1.0, 1.0);
    CHECK(s.nu == doctest::Approx(0.3321105829334326).epsilon(1e-13));
    CHECK(s.nu_prime == doctest::Approx(0.2279056997227762).epsilon(1e-12));
    CHECK(s.nu == doctest::Approx(oracle::damped_nu(two_scale(), 1.0, 1.0)).epsilon(1e-13));
  }

  TEST_CASE("closed form golden values") {
    CHECK(closed_form_nu_iso(1.0, 1.0) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
    CHECK(closed_form_nu_iso(2.0, 1.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(solve_state(SpectralModel::isotropic(), 2.0, 1.0).nu ==
          doctest::Approx(0.7071067811865475).epsilon(1e-14));
    CHECK(solve_state(SpectralModel::isotropic(), 2.0, 1.0).nu_prime ==
          doctest::Approx(0.6035533905932738).epsilon(1e-13));
  }

  TEST_CASE("closed form agrees with the solver on the invariant grid") {
    for (double gamma : kGammas) {
      for (double lambda : kLambdas) {
        CAPTURE(gamma);
        CAPTURE(lambda);
        const double nu = solve_state(SpectralModel::isotropic(), gamma, lambda).nu;
        CHECK(std::abs(nu - closed_form_nu_iso(gamma, lambda)) <= 1e-10);
      }
    }
  }

  TEST_CASE("derivative matches central differences") {
    for (const auto& m : {SpectralModel::isotropic(), two_scale()}) {
      for (double gamma : kGammas) {
        for (double lambda : kLambdas) {
          CAPTURE(gamma);
          CAPTURE(lambda);
          const double analytic = solve_state(m, gamma, lambda).nu_prime;
          const double fd = oracle::nu_prime_fd(m, gamma, lambda);
          CHECK(std::abs(analytic - fd) <= 1e-6 * analytic);
        }
      }
    }
  }

  TEST_CASE("damped fixed point agrees with Newton") {
    SolverOptions damped;
    damped.method = SolverMethod::DampedFixedPoint;
    for (double gamma : kGammas) {
      for (double lambda : {0.1, 1.0, 10.0}) {
        const auto a = solve_state(two_scale(), gamma, lambda);
        const auto b = solve_state(two_scale(), gamma, lambda, damped);
        CHECK(a.nu == doctest::Approx(b.nu).epsilon(1e-11));
        CHECK(a.nu == doctest::Approx(oracle::damped_nu(two_scale(), gamma, lambda)).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("state invariants hold across a wide grid") {
    const SpectralModel m({{0.01, 0.2, 0.5}, {1.0, 0.5, 0.25}, {50.0, 0.3, 0.25}});
    for (double gamma : {1e-6, 1e-2, 0.3, 1.0, 3.0, 1e2, 1e6}) {
      for (double lambda : {1e-8, 1e-4, 1e-2, 1.0, 1e2, 1e8}) {
        CAPTURE(gamma);
        CAPTURE(lambda);
        const auto s = solve_state(m, gamma, lambda);
        CHECK(s.nu > 0.0);
        CHECK(s.nu_prime > 0.0);
        CHECK(s.m > 0.0);
        CHECK(s.m <= 1.0);
        for (double g : s.g) CHECK(g > 0.0);
        CHECK(s.residual <= 1e-12 * std::max(1.0, s.nu));
        double f = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) f += m[i].weight * m[i].variance * s.g[i];
        CHECK(std::abs(s.nu - f) <= 1e-12 * std::max(1.0, s.nu));
        CHECK(resolvent_t2(m, s) * gamma < 1.0);
      }
    }
  }

  TEST_CASE("nu decreases in lambda") {
    for (double gamma : kGammas) {
      double previous = INFINITY;
      for (int i = 0; i <= 40; ++i) {
        const double lambda = std::pow(10.0, -4.0 + 0.2 * i);
        const double nu = solve_state(two_scale(), gamma, lambda).nu;
        CHECK(nu < previous);
        previous = nu;
      }
    }
  }

  TEST_CASE("exhausted budget raises with the residual") {
    SolverOptions tight;
    tight.max_iterations = 1;
    try {
      solve_state(two_scale(), 1.0, 1e-3, tight);
      FAIL("expected NumericFailure");
    } catch (const NumericFailure& e) {
      CHECK(e.last_residual() > 0.0);
    }
  }

  TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(solve_state(two_scale(), 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(solve_state(two_scale(), 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(solve_state(two_scale(), 1.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(solve_state(two_scale(), NAN, 1.0), InvalidArgument);
  }
}
