#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ridgeshift/asymptotic_risk.hpp"
#include "ridgeshift/problem.hpp"

namespace ridgeshift {

/// Contiguous coordinates [offset, offset + size) carrying one atom.
struct AtomBlock {
  std::size_t offset = 0;
  std::size_t size = 0;
  double variance = 1.0;
};

/// Splits `dim` coordinates over the atoms in canonical order, rounding
/// rho_i * dim by largest remainder (ties go to the lower atom index).
std::vector<AtomBlock> allocate_dimensions(const SpectralModel& spectrum, std::size_t dim);

/// Diagonal of Sigma for an allocation.
Eigen::VectorXd coordinate_variances(std::span<const AtomBlock> blocks);

/// Training and test coefficients with their per-atom subspaces.
struct CoefficientPair {
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_tilde;
  std::vector<AtomBlock> blocks;
};

/// kappa |beta| (cos beta_hat + sin u_hat) with u_hat the unit component of
/// `draw` orthogonal to beta. |cos| = 1 or kappa = 0 gives kappa cos beta and
/// ignores `draw`.
Eigen::VectorXd shifted_coefficient(const Eigen::VectorXd& beta, const Eigen::VectorXd& draw,
                                    AtomShift shift);

/// Random coefficients with |beta_t|^2 s_t = pi_t signal on each atom and the
/// requested per-atom (kappa, cos_theta) between beta and beta_tilde.
/// Throws InvalidArgument when dim < 2 * atoms, when a signal-carrying atom
/// gets no coordinates, or when an atom with |cos_theta| != 1 gets fewer
/// than two.
CoefficientPair build_coefficients(const SpectralModel& spectrum, const ShiftSpec& shift,
                                   std::size_t dim, std::uint64_t seed, double signal = 1.0);

struct Dataset {
  Eigen::MatrixXd x;          // P x N, columns are samples
  Eigen::VectorXd y;          // N
  Eigen::MatrixXd psi;        // X X^T / N, zero when N = 0
  Eigen::VectorXd variances;  // diagonal of Sigma
  std::uint64_t seed = 0;
  std::string generator;

  std::size_t dim() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t samples() const { return static_cast<std::size_t>(x.cols()); }
};

inline constexpr const char* kGeneratorTag = "splitmix64-counter/polar-box-muller";

/// N Gaussian samples x ~ N(0, Sigma) with y = beta^T x + xi, xi ~ N(0, noise_variance).
Dataset sample_dataset(const SpectralModel& spectrum, const Eigen::VectorXd& beta,
                       double noise_variance, std::size_t dim, std::size_t samples,
                       std::uint64_t seed);

/// Rescales covariates to unit variance: x -> Sigma^{-1/2} x.
Dataset whiten(const Dataset& data);
/// Coefficients in whitened coordinates: beta -> Sigma^{1/2} beta.
CoefficientPair whiten(const CoefficientPair& coeffs);

/// (X X^T + lambda N I)^{-1} X Y; zero when N = 0.
Eigen::VectorXd ridge_fit(const Dataset& data, double lambda);

struct ConditionalRisk {
  double bias = 0.0;
  double variance = 0.0;
  double risk() const { return bias + variance; }
};

/// Exact risk given X (expectation over the noise and the test input):
///   B = e^T Sigma e,  e = Psi (Psi + lambda)^{-1} beta - beta_tilde
///   V = sigma^2 / N tr(Sigma Psi (Psi + lambda)^{-2})
ConditionalRisk conditional_risk(const Dataset& data, const CoefficientPair& coeffs,
                                 double lambda, double noise_variance);

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error (sample sd / sqrt(n)) with pairwise summation.
SampleStats summarize(std::span<const double> values);

/// Test-set estimate of E[(beta_hat^T x - beta_tilde^T x)^2] from n_test
/// fresh inputs drawn with the diagonal covariance `variances`.
SampleStats empirical_risk_estimate(const Eigen::VectorXd& beta_hat, const CoefficientPair& coeffs,
                                    const Eigen::VectorXd& variances, std::size_t n_test,
                                    std::uint64_t seed);

struct McOptions {
  /// Fit ridge on whitened covariates and compare with the isotropic theory
  /// of whiten_equivalent().
  bool whiten = false;
  unsigned threads = 1;
  LambdaSearchOptions lambda;
};

struct McSummary {
  std::vector<ConditionalRisk> per_seed;
  SampleStats bias;
  SampleStats variance;
  SampleStats risk;
  std::size_t dim = 0;
  std::size_t samples = 0;
  std::uint64_t base_seed = 0;
  RiskReport theory;
};

/// Monte Carlo over seeds base_seed .. base_seed + n_seeds - 1 at
/// N = round(dim / gamma). Deterministic for any thread count.
McSummary mc_risk(const ProblemSpec& problem, std::size_t dim, std::size_t n_seeds,
                  std::uint64_t base_seed, const McOptions& options = {});

}  // namespace ridgeshift
