#include "ridgeshift/asymptotic_risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ridgeshift/errors.hpp"

namespace ridgeshift {
namespace {

// gamma T2 / (1 - gamma T2); at the fixed point this equals both nu'/T1 - 1
// and gamma (nu - lambda nu') without the cancellation of the latter.
double excess_factor(const SpectralModel& spectrum, const SolverState& state) {
  const double gt2 = state.gamma * resolvent_t2(spectrum, state);
  return gt2 / (1.0 - gt2);
}

// In-distribution risk per unit signal: sum pi (lambda g)^2 / (1 - gamma T2)
// for the bias plus gamma T2 / (1 - gamma T2) / snr for the variance.
double in_distribution_risk(const SpectralModel& spectrum, double gamma, double snr,
                            double lambda, const SolverOptions& options) {
  const SolverState state = solve_state(spectrum, gamma, lambda, options);
  const double excess = excess_factor(spectrum, state);
  double bias = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double lg = lambda * state.g[i];
    bias += spectrum[i].signal_fraction * lg * lg;
  }
  return bias * (1.0 + excess) + excess / snr;
}

void check_shift_scalars(double kappa, double cos_theta) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be >= 0");
  if (!(std::abs(cos_theta) <= 1.0)) throw InvalidArgument("|cos_theta| must be <= 1");
}

}  // namespace

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Weak: return "weak";
    case Regime::Strong: return "strong";
    case Regime::Boundary: return "boundary";
  }
  return "?";
}

std::string_view to_string(ProfileShape shape) noexcept {
  switch (shape) {
    case ProfileShape::MonotoneDecreasingInN: return "monotone_decreasing_in_N";
    case ProfileShape::MonotoneIncreasingInN: return "monotone_increasing_in_N";
    case ProfileShape::InteriorMax: return "interior_max";
    case ProfileShape::InteriorMin: return "interior_min";
    case ProfileShape::Flat: return "flat";
  }
  return "?";
}

RiskReport asymptotic_risk_at(const ProblemSpec& problem, double lambda,
                              const SolverOptions& options) {
  problem.validate();
  const auto& spectrum = problem.spectrum;
  const auto& shift = problem.shift;

  RiskReport report;
  report.solver = solve_state(spectrum, problem.gamma, lambda, options);
  const SolverState& st = report.solver;
  const double excess = excess_factor(spectrum, st);

  // Per atom the bias is
  //   lambda^2 nu' g^2 / T1 - 2 lambda g (1 - kc) + 1 - 2 kc + k^2
  // = (m s g - kc)^2 + (k^2 - (kc)^2) + (lambda g)^2 gamma T2 / (1 - gamma T2),
  // a sum of nonnegative terms depending on the shift only through kc and k^2.
  double bias = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double kc = shift[i].kappa * shift[i].cos_theta;
    const double k2 = shift[i].kappa * shift[i].kappa;
    const double fitted = st.m * spectrum[i].variance * st.g[i];
    const double lg = lambda * st.g[i];
    const double miss = fitted - kc;
    const double orthogonal = std::max(0.0, k2 - kc * kc);
    bias += spectrum[i].signal_fraction * (miss * miss + orthogonal + lg * lg * excess);
  }

  report.bias = problem.signal * bias;
  report.variance = problem.noise_variance() * excess;
  report.risk = report.bias + report.variance;
  report.lambda_used = lambda;
  report.gamma = problem.gamma;

  const auto eff = whiten_equivalent(spectrum, shift);
  report.regime = classify_regime(eff.shift[0].kappa, eff.shift[0].cos_theta);
  return report;
}

RiskReport asymptotic_risk(const ProblemSpec& problem, const SolverOptions& options) {
  problem.validate();
  double lambda = 0.0;
  if (problem.penalty.is_optimal()) {
    LambdaSearchOptions search;
    search.solver = options;
    lambda = optimal_lambda(problem.spectrum, problem.gamma, problem.snr, search);
  } else {
    lambda = problem.penalty.value();
  }
  return asymptotic_risk_at(problem, lambda, options);
}

RiskLimits risk_limits(const SpectralModel& spectrum, const ShiftSpec& shift, double signal) {
  if (shift.size() != spectrum.size()) throw InvalidArgument("shift does not match spectrum");
  RiskLimits limits{0.0, 0.0};
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double pi = spectrum[i].signal_fraction;
    const double k = shift[i].kappa;
    const double kc = k * shift[i].cos_theta;
    limits.no_data += pi * k * k;
    limits.infinite_data += pi * (1.0 - 2.0 * kc + k * k);
  }
  limits.no_data *= signal;
  limits.infinite_data *= signal;
  return limits;
}

double optimal_lambda(const SpectralModel& spectrum, double gamma, double snr,
                      const LambdaSearchOptions& options) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidArgument("snr must be positive");

  // Sigma = s I is the identity problem with the penalty rescaled by s.
  if (spectrum.is_isotropic() && !options.force_numeric) {
    return spectrum[0].variance * gamma / snr;
  }

  const auto objective = [&](double log_lambda) {
    return in_distribution_risk(spectrum, gamma, snr, std::exp(log_lambda), options.solver);
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double lower = std::log(options.lambda_min);
  const double upper = std::log(options.lambda_max);
  double a = lower;
  double b = upper;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 500 && b - a > options.log_tolerance; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  const double best = 0.5 * (a + b);
  const double margin = 1e3 * options.log_tolerance;
  if (best - lower < margin || upper - best < margin) {
    std::ostringstream os;
    os << "optimal lambda search hit the bracket [" << options.lambda_min << ", "
       << options.lambda_max << "] at gamma=" << gamma;
    throw NumericFailure(os.str());
  }
  return std::exp(best);
}

Regime classify_regime(double kappa, double cos_theta) {
  check_shift_scalars(kappa, cos_theta);
  const double product = kappa * cos_theta;
  if (product > 0.5 + kRegimeEpsilon) return Regime::Weak;
  if (product < 0.5 - kRegimeEpsilon) return Regime::Strong;
  return Regime::Boundary;
}

double min_risk(double kappa, double cos_theta, double signal) {
  check_shift_scalars(kappa, cos_theta);
  const double no_data = kappa * kappa;
  const double infinite_data = 1.0 - 2.0 * kappa * cos_theta + kappa * kappa;
  return signal * std::min(no_data, infinite_data);
}

double min_risk_scan(double kappa, double cos_theta, double signal, double snr,
                     std::span<const double> gamma_grid, const SolverOptions& options) {
  check_shift_scalars(kappa, cos_theta);
  if (gamma_grid.empty()) throw InvalidArgument("min_risk_scan: empty grid");
  const auto iso = SpectralModel::isotropic();
  ProblemSpec problem{iso, ShiftSpec({{kappa, cos_theta}}, iso), 1.0, snr,
                      Penalty::optimal(), signal};
  double best = INFINITY;
  for (double gamma : gamma_grid) {
    problem.gamma = gamma;
    best = std::min(best, asymptotic_risk_at(problem, gamma / snr, options).risk);
  }
  return best;
}

ProfileShape classify_profile(std::span<const double> risks) {
  if (risks.size() < 2) return ProfileShape::Flat;
  double scale = 0.0;
  for (double r : risks) scale = std::max(scale, std::abs(r));
  const double tol = 1e-9 * scale;

  double variation = 0.0;
  bool up = false;
  bool down = false;
  int first_sign = 0;
  int turn = 0;  // +1 first turning point is a maximum, -1 a minimum
  for (std::size_t i = 1; i < risks.size(); ++i) {
    const double d = risks[i] - risks[i - 1];
    variation += std::abs(d);
    if (std::abs(d) <= tol) continue;
    const int sign = d > 0.0 ? 1 : -1;
    (sign > 0 ? up : down) = true;
    if (first_sign == 0) {
      first_sign = sign;
    } else if (turn == 0 && sign != first_sign) {
      turn = first_sign;
    }
  }
  if (variation < tol || (!up && !down)) return ProfileShape::Flat;
  if (!down) return ProfileShape::MonotoneDecreasingInN;
  if (!up) return ProfileShape::MonotoneIncreasingInN;

  const auto last = risks.size() - 1;
  const auto argmax = static_cast<std::size_t>(
      std::max_element(risks.begin(), risks.end()) - risks.begin());
  const auto argmin = static_cast<std::size_t>(
      std::min_element(risks.begin(), risks.end()) - risks.begin());
  const bool max_inside = argmax != 0 && argmax != last;
  const bool min_inside = argmin != 0 && argmin != last;
  if (max_inside && !min_inside) return ProfileShape::InteriorMax;
  if (min_inside && !max_inside) return ProfileShape::InteriorMin;
  return turn > 0 ? ProfileShape::InteriorMax : ProfileShape::InteriorMin;
}

ProfileReport profile(const ProblemSpec& problem, std::span<const double> gamma_grid,
                      const LambdaSearchOptions& options) {
  problem.validate();
  if (gamma_grid.size() < 3) throw InvalidArgument("profile: grid needs at least 3 points");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > 0.0) || (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))) {
      throw InvalidArgument("profile: grid must be positive and strictly increasing");
    }
  }

  ProfileReport report;
  report.gammas.assign(gamma_grid.begin(), gamma_grid.end());
  ProblemSpec point = problem;
  for (double gamma : gamma_grid) {
    point.gamma = gamma;
    try {
      const double lambda = problem.penalty.is_optimal()
                                ? optimal_lambda(problem.spectrum, gamma, problem.snr, options)
                                : problem.penalty.value();
      const RiskReport r = asymptotic_risk_at(point, lambda, options.solver);
      report.risks.push_back(r.risk);
      report.lambdas.push_back(lambda);
    } catch (const NumericFailure& e) {
      std::ostringstream os;
      os << "profile at gamma=" << gamma << ": " << e.what();
      throw NumericFailure(os.str(), e.last_residual());
    }
  }

  const auto lo = std::min_element(report.risks.begin(), report.risks.end());
  const auto hi = std::max_element(report.risks.begin(), report.risks.end());
  report.argmin_gamma = report.gammas[static_cast<std::size_t>(lo - report.risks.begin())];
  report.argmax_gamma = report.gammas[static_cast<std::size_t>(hi - report.risks.begin())];
  report.min_risk = *lo;
  report.shape = classify_profile(report.risks);
  return report;
}

}  // namespace ridgeshift
