#include <doctest.h>

#include <cmath>

#include "ridgeshift/errors.hpp"
#include "ridgeshift/finite_sample.hpp"
#include "ridgeshift/random.hpp"
#include "ridgeshift/sweep_engine.hpp"

using namespace ridgeshift;

namespace {

struct Measured {
  double kappa;
  double cos_theta;
  double energy;  // |beta_t|^2 s_t
};

Measured measure(const CoefficientPair& c, std::size_t atom) {
  const auto& b = c.blocks[atom];
  const Eigen::VectorXd x = c.beta.segment(b.offset, b.size);
  const Eigen::VectorXd y = c.beta_tilde.segment(b.offset, b.size);
  return {y.norm() / x.norm(), x.dot(y) / (x.norm() * y.norm()), x.squaredNorm() * b.variance};
}

ProblemSpec iso_problem(double kappa, double gamma, Penalty penalty = Penalty::optimal()) {
  const auto one = SpectralModel::isotropic();
  return ProblemSpec{one, ShiftSpec({{kappa, 1.0}}, one), gamma, 1.0, penalty, 1.0};
}

}  // namespace

TEST_SUITE("finite_sample") {
  TEST_CASE("dimension allocation by largest remainder") {
    const auto blocks = allocate_dimensions(two_scale_spectrum(), 64);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].size == 32);
    CHECK(blocks[1].size == 32);
    CHECK(blocks[1].offset == 32);
    CHECK(blocks[0].variance == 0.1);

    const SpectralModel thirds({{1.0, 1.0 / 3, 0.5}, {2.0, 2.0 / 3, 0.5}});
    const auto t = allocate_dimensions(thirds, 10);
    CHECK(t[0].size == 3);
    CHECK(t[1].size == 7);

    const SpectralModel three({{1.0, 0.25, 0.3}, {2.0, 0.25, 0.3}, {3.0, 0.5, 0.4}});
    const auto r = allocate_dimensions(three, 6);
    CHECK(r[0].size + r[1].size + r[2].size == 6);
    CHECK(r[2].size == 3);

    const auto var = coordinate_variances(blocks);
    CHECK(var.size() == 64);
    CHECK(var[0] == 0.1);
    CHECK(var[63] == 1.0);
  }

  TEST_CASE("planar rotation") {
    Eigen::VectorXd beta(2), draw(2);
    beta << 1.0, 0.0;
    draw << 0.0, 1.0;
    const auto tilde = shifted_coefficient(beta, draw, {1.0, 0.0});
    CHECK(std::abs(tilde[0]) <= 1e-15);
    CHECK(tilde[1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("aligned shifts ignore the draw") {
    Eigen::VectorXd beta(3), draw(3);
    beta << 1.0, -2.0, 0.5;
    draw << 3.0, 1.0, 1.0;
    CHECK(shifted_coefficient(beta, draw, {0.7, -1.0}) == -0.7 * beta);
    CHECK(shifted_coefficient(beta, draw, {0.0, 0.3}).isZero(0.0));
  }

  TEST_CASE("no shift reproduces beta exactly") {
    const auto one = SpectralModel::isotropic();
    const ShiftSpec shift({shift_from_robust_fraction(1.0)}, one);
    const auto c = build_coefficients(one, shift, 16, 3);
    CHECK(c.beta_tilde == c.beta);
  }

  TEST_CASE("two-scale coefficients carry the requested shift") {
    const auto two = two_scale_spectrum();
    const ShiftSpec shift({{0.3, 0.2}, {1.4, -0.6}}, two);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto c = build_coefficients(two, shift, 64, seed, 2.0);
      REQUIRE(c.blocks.size() == 2);
      CHECK(c.blocks[0].size == 32);
      double total = 0.0;
      for (std::size_t t = 0; t < 2; ++t) {
        const auto m = measure(c, t);
        CHECK(std::abs(m.kappa - shift[t].kappa) <= 1e-12);
        CHECK(std::abs(m.cos_theta - shift[t].cos_theta) <= 1e-12);
        CHECK(m.energy == doctest::Approx(two[t].signal_fraction * 2.0).epsilon(1e-12));
        total += m.energy;
      }
      CHECK(total == doctest::Approx(2.0).epsilon(1e-12));
    }
  }

  TEST_CASE("coefficient construction errors") {
    const auto two = two_scale_spectrum();
    CHECK_THROWS_AS(build_coefficients(two, ShiftSpec::identity(two), 3, 0), InvalidArgument);
    // A signal-carrying atom with negligible weight gets no coordinates.
    const SpectralModel lopsided({{1.0, 0.999, 0.5}, {2.0, 0.001, 0.5}});
    CHECK_THROWS_AS(build_coefficients(lopsided, ShiftSpec::identity(lopsided), 8, 0),
                    InvalidArgument);
    // One coordinate leaves no room for a rotated direction.
    const SpectralModel narrow({{1.0, 0.9, 0.5}, {2.0, 0.1, 0.5}});
    const ShiftSpec rotated({{1.0, 1.0}, {1.0, 0.5}}, narrow);
    CHECK_THROWS_AS(build_coefficients(narrow, rotated, 6, 0), InvalidArgument);
    CHECK_NOTHROW(build_coefficients(narrow, ShiftSpec({{1.0, 1.0}, {1.0, -1.0}}, narrow), 6, 0));
  }

  TEST_CASE("empty dataset") {
    const auto one = SpectralModel::isotropic();
    const auto c = build_coefficients(one, ShiftSpec::identity(one), 8, 1);
    const auto d = sample_dataset(one, c.beta, 1.0, 8, 0, 1);
    CHECK(d.samples() == 0);
    CHECK(d.psi.rows() == 8);
    CHECK(d.psi.isZero(0.0));
    CHECK(ridge_fit(d, 1.0).isZero(0.0));
    const auto r = conditional_risk(d, c, 1.0, 1.0);
    CHECK(r.bias == doctest::Approx(c.beta_tilde.squaredNorm()).epsilon(1e-14));
    CHECK(r.variance == 0.0);
  }

  TEST_CASE("empirical covariance concentrates") {
    const auto one = SpectralModel::isotropic();
    const Eigen::VectorXd beta = Eigen::VectorXd::Zero(32);
    const auto d = sample_dataset(one, beta, 1.0, 32, 100000, 5);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(32, 32);
    CHECK((d.psi - eye).norm() / eye.norm() <= 0.05);
    CHECK(d.generator == kGeneratorTag);
    CHECK(d.seed == 5);
  }

  TEST_CASE("datasets are reproducible and psi is symmetric") {
    const auto two = two_scale_spectrum();
    const auto c = build_coefficients(two, ShiftSpec::identity(two), 20, 8);
    const auto a = sample_dataset(two, c.beta, 0.5, 20, 15, 8);
    const auto b = sample_dataset(two, c.beta, 0.5, 20, 15, 8);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.psi == a.psi.transpose());
    CHECK(a.psi.ldlt().vectorD().minCoeff() >= -1e-12);
    const auto other = sample_dataset(two, c.beta, 0.5, 20, 15, 9);
    CHECK(other.x != a.x);
  }

  TEST_CASE("scalar ridge fit") {
    Dataset d;
    d.x = Eigen::MatrixXd::Constant(1, 1, 2.0);
    d.y = Eigen::VectorXd::Constant(1, 3.0);
    d.psi = d.x * d.x.transpose();
    d.variances = Eigen::VectorXd::Ones(1);
    const auto fit = ridge_fit(d, 0.5);
    CHECK(fit[0] == doctest::Approx(6.0 / 4.5).epsilon(1e-15));
  }

  TEST_CASE("ridge fit solves the normal equations") {
    const auto two = two_scale_spectrum();
    const auto c = build_coefficients(two, ShiftSpec::identity(two), 40, 2);
    for (std::size_t n : {10, 40, 200}) {
      const auto d = sample_dataset(two, c.beta, 1.0, 40, n, 2);
      for (double lambda : {1e-6, 1e-2, 1.0}) {
        const Eigen::VectorXd b = ridge_fit(d, lambda);
        const Eigen::VectorXd xy = d.x * d.y;
        const Eigen::MatrixXd lhs =
            d.x * d.x.transpose() + lambda * static_cast<double>(n) * Eigen::MatrixXd::Identity(40, 40);
        CHECK((lhs * b - xy).norm() <= 1e-10 * xy.norm());
      }
    }
  }

  TEST_CASE("heavy shrinkage") {
    const auto one = SpectralModel::isotropic();
    const ShiftSpec shift({{0.8, 0.6}}, one);
    const auto c = build_coefficients(one, shift, 16, 4);
    const auto d = sample_dataset(one, c.beta, 1.0, 16, 32, 4);
    const Eigen::VectorXd b = ridge_fit(d, 1e12);
    const double scale = (d.x * d.y).norm() / (1e12 * 32.0);
    CHECK(b.norm() <= scale * (1.0 + 1e-6));
    const auto r = conditional_risk(d, c, 1e12, 1.0);
    CHECK(r.bias == doctest::Approx(c.beta_tilde.squaredNorm()).epsilon(1e-6));
    CHECK(r.variance <= 1e-6);
  }

  TEST_CASE("summary statistics") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto s = summarize(v);
    CHECK(s.mean == 2.5);
    CHECK(s.count == 4);
    CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-15));
  }

  TEST_CASE("test-set estimate of a perfect predictor is zero") {
    const auto two = two_scale_spectrum();
    const auto c = build_coefficients(two, ShiftSpec({{0.5, 0.3}, {1.0, 1.0}}, two), 16, 6);
    const auto var = coordinate_variances(c.blocks);
    CHECK(empirical_risk_estimate(c.beta_tilde, c, var, 1000, 1).mean == 0.0);
  }

  TEST_CASE("test-set estimate of the zero predictor") {
    const auto two = two_scale_spectrum();
    const auto c = build_coefficients(two, ShiftSpec({{0.5, 0.3}, {1.2, 1.0}}, two), 16, 6);
    const auto var = coordinate_variances(c.blocks);
    const double target = c.beta_tilde.dot(var.asDiagonal() * c.beta_tilde);
    const auto est = empirical_risk_estimate(Eigen::VectorXd::Zero(16), c, var, 1000000, 2);
    CHECK(std::abs(est.mean - target) <= 4.0 / 1000.0 * target);
  }

  TEST_CASE("test-set estimate matches the conditional bias without noise") {
    const auto two = two_scale_spectrum();
    const ShiftSpec shift({{0.7, 0.5}, {1.0, 0.9}}, two);
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto c = build_coefficients(two, shift, 32, seed);
      const auto d = sample_dataset(two, c.beta, 0.0, 32, 48, seed);
      const auto exact = conditional_risk(d, c, 0.3, 0.0);
      const auto est = empirical_risk_estimate(ridge_fit(d, 0.3), c, d.variances, 1000000, seed);
      CHECK(std::abs(est.mean - exact.bias) <= 4.0 * est.std_error);
    }
  }

  TEST_CASE("averaging over noise draws recovers bias plus variance") {
    const auto one = SpectralModel::isotropic();
    const ShiftSpec shift({{0.8, 0.9}}, one);
    const auto c = build_coefficients(one, shift, 24, 11);
    const double noise = 0.5;
    Dataset d = sample_dataset(one, c.beta, noise, 24, 36, 11);
    const Eigen::VectorXd clean = d.x.transpose() * c.beta;
    const auto exact = conditional_risk(d, c, 0.2, noise);

    std::vector<double> estimates;
    for (std::uint64_t draw = 0; draw < 400; ++draw) {
      CounterRng rng(stream_key(1234, draw, StreamPurpose::Noise));
      for (Eigen::Index i = 0; i < d.y.size(); ++i) d.y[i] = clean[i] + std::sqrt(noise) * rng.normal();
      estimates.push_back(
          empirical_risk_estimate(ridge_fit(d, 0.2), c, d.variances, 20000, draw).mean);
    }
    const auto s = summarize(estimates);
    CHECK(std::abs(s.mean - exact.risk()) <= 4.0 * s.std_error);
  }

  TEST_CASE("conditional risk matches theory at P = 256, gamma = 2, lambda = 2") {
    const auto summary = mc_risk(iso_problem(1.0, 2.0, Penalty::fixed(2.0)), 256, 100, 100);
    CHECK(summary.samples == 128);
    CHECK(std::abs(summary.bias.mean - summary.theory.bias) <= 3.0 * summary.bias.std_error);
    // The variance concentrates faster than its O(1/P) finite-size offset, so a
    // relative allowance is added to the statistical one.
    CHECK(std::abs(summary.variance.mean - summary.theory.variance) <=
          std::max(3.0 * summary.variance.std_error, 0.02 * summary.theory.variance));
  }

  TEST_CASE("Monte Carlo error shrinks as P doubles") {
    double previous = INFINITY;
    for (std::size_t dim : {64, 128, 256}) {
      CAPTURE(dim);
      const auto s = mc_risk(iso_problem(1.0, 1.0), dim, 100, 500);
      // The variance gap is resolved by 100 seeds; the total risk is noise-limited.
      const double gap = std::abs(s.variance.mean - s.theory.variance);
      CHECK(gap > 3.0 * s.variance.std_error);
      CHECK(gap < previous);
      previous = gap;
      CHECK(std::abs(s.risk.mean - s.theory.risk) <= 3.0 * s.risk.std_error);
    }
  }

  TEST_CASE("mc summary is deterministic across threads") {
    const auto p = iso_problem(0.6, 1.5);
    McOptions one, many;
    many.threads = 4;
    const auto a = mc_risk(p, 48, 2, 77, one);
    const auto b = mc_risk(p, 48, 2, 77, many);
    REQUIRE(a.per_seed.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(a.per_seed[k].bias == b.per_seed[k].bias);
      CHECK(a.per_seed[k].variance == b.per_seed[k].variance);
    }
    CHECK(a.risk.mean == b.risk.mean);
    CHECK(a.risk.std_error == b.risk.std_error);
  }

  TEST_CASE("boundary shift is flat in finite samples") {
    std::vector<SampleStats> stats;
    for (double gamma : {0.5, 1.0, 2.0}) stats.push_back(mc_risk(iso_problem(0.5, gamma), 256, 100, 40).risk);
    for (std::size_t i = 0; i < stats.size(); ++i) {
      for (std::size_t j = i + 1; j < stats.size(); ++j) {
        const double se = std::hypot(stats[i].std_error, stats[j].std_error);
        CHECK(std::abs(stats[i].mean - stats[j].mean) <= 3.0 * se);
      }
    }
  }

  TEST_CASE("mc argument checks") {
    CHECK_THROWS_AS(mc_risk(iso_problem(1.0, 1.0), 16, 1, 0), InvalidArgument);
  }
}
