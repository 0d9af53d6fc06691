#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ridgeshift/problem.hpp"
#include "ridgeshift/resolvent_solver.hpp"

namespace ridgeshift {

/// Weak: more data helps (kappa cos > 1/2). Strong: more data hurts.
enum class Regime { Weak, Strong, Boundary };

std::string_view to_string(Regime regime) noexcept;

/// Thermodynamic-limit risk. All quantities are in absolute units; divide by
/// `signal` for the normalized risk R / beta^T Sigma beta.
struct RiskReport {
  double bias = 0.0;
  double variance = 0.0;
  double risk = 0.0;
  double lambda_used = 0.0;
  double gamma = 0.0;
  std::optional<Regime> regime;
  SolverState solver;
};

/// Evaluates bias and variance at a resolved penalty. An OPTIMAL penalty is
/// tuned first with optimal_lambda().
RiskReport asymptotic_risk(const ProblemSpec& problem, const SolverOptions& options = {});

/// Same, at an explicit penalty (ignores problem.penalty).
RiskReport asymptotic_risk_at(const ProblemSpec& problem, double lambda,
                              const SolverOptions& options = {});

struct RiskLimits {
  double no_data;        // N = 0
  double infinite_data;  // N -> infinity
};

RiskLimits risk_limits(const SpectralModel& spectrum, const ShiftSpec& shift, double signal = 1.0);

struct LambdaSearchOptions {
  double lambda_min = 1e-8;
  double lambda_max = 1e8;
  double log_tolerance = 1e-10;
  /// Use golden-section search even when the analytic rule applies.
  bool force_numeric = false;
  SolverOptions solver;
};

/// Penalty minimizing in-distribution asymptotic risk. gamma / snr for a
/// single-atom spectrum; otherwise golden-section search over log(lambda).
/// Throws NumericFailure if the minimizer sits on the search bracket.
double optimal_lambda(const SpectralModel& spectrum, double gamma, double snr,
                      const LambdaSearchOptions& options = {});

inline constexpr double kRegimeEpsilon = 1e-12;

Regime classify_regime(double kappa, double cos_theta);

/// Infimum over gamma of the optimally tuned isotropic risk, taken from the
/// N = 0 and N -> infinity endpoints.
double min_risk(double kappa, double cos_theta, double signal = 1.0);

/// Grid minimum of the isotropic risk at lambda = gamma / snr. Used to check
/// min_risk.
double min_risk_scan(double kappa, double cos_theta, double signal, double snr,
                     std::span<const double> gamma_grid, const SolverOptions& options = {});

enum class ProfileShape {
  MonotoneDecreasingInN,  // risk increases with gamma
  MonotoneIncreasingInN,  // risk decreases with gamma
  InteriorMax,
  InteriorMin,
  Flat,
};

std::string_view to_string(ProfileShape shape) noexcept;

struct ProfileReport {
  std::vector<double> gammas;
  std::vector<double> risks;
  std::vector<double> lambdas;
  ProfileShape shape = ProfileShape::Flat;
  double argmin_gamma = NAN;
  double argmax_gamma = NAN;
  double min_risk = NAN;
};

/// Shape of a risk curve sampled on an increasing gamma grid.
///
/// Differences with magnitude at most 1e-9 * max|R| count as zero. Flat when
/// the total variation is below that tolerance; monotone when every
/// remaining difference has one sign. Otherwise the curve is InteriorMax if
/// only its global maximum is interior, InteriorMin if only its global minimum
/// is, and when both or neither are interior, the first turning point seen
/// from the small-gamma (data-rich) end decides.
ProfileShape classify_profile(std::span<const double> risks);

/// Evaluates R on `gamma_grid` (strictly increasing, at least 3 points),
/// re-tuning an OPTIMAL penalty at every gamma. Solver errors are rethrown
/// with the offending gamma in the message.
ProfileReport profile(const ProblemSpec& problem, std::span<const double> gamma_grid,
                      const LambdaSearchOptions& options = {});

}  // namespace ridgeshift
