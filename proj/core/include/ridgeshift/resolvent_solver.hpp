#pragma once

#include <vector>

#include "ridgeshift/spectral_model.hpp"

namespace ridgeshift {

enum class SolverMethod {
  /// Newton on h(nu) = nu - F(nu), safeguarded by a bracket that always
  /// contains the root. Default.
  Newton,
  /// nu <- (1 - damping) nu + damping F(nu). Slow where the map is nearly
  /// neutral (small penalty, gamma >= 1).
  DampedFixedPoint,
};

struct SolverOptions {
  SolverMethod method = SolverMethod::Newton;
  double damping = 0.5;
  /// Convergence when |nu - F(nu)| <= tolerance * max(1, nu).
  double tolerance = 1e-12;
  int max_iterations = 100000;
};

/// Resolvent quantities at z = -lambda for a discrete spectrum.
struct SolverState {
  double lambda = 0.0;
  double gamma = 0.0;
  double nu = 0.0;        // nu(-lambda)
  double nu_prime = 0.0;  // d nu / dz at z = -lambda
  double m = 0.0;         // 1 / (1 + gamma nu)
  std::vector<double> g;  // per atom 1 / (m s + lambda)
  double residual = 0.0;  // |nu - sum rho s g|
  int iterations = 0;
};

/// Solves nu = sum_i rho_i s_i / (m s_i + lambda), m = 1 / (1 + gamma nu),
/// for the positive root and evaluates
///   nu' = T1 / (1 - gamma T2),  T1 = sum rho s g^2,  T2 = sum rho (m s g)^2.
/// Throws InvalidArgument for gamma <= 0 or lambda <= 0 and NumericFailure
/// (carrying the last residual) when the iteration budget is exhausted.
SolverState solve_state(const SpectralModel& spectrum, double gamma, double lambda,
                        const SolverOptions& options = {});

/// Closed-form nu for Sigma = I:
///   nu = [sqrt((1 - gamma + lambda)^2 + 4 gamma lambda) - (1 - gamma + lambda)] / (2 gamma lambda),
/// using the conjugate form when 1 - gamma + lambda > 0.
double closed_form_nu_iso(double gamma, double lambda);

/// sum_i rho_i (m s_i g_i)^2 for a solved state.
double resolvent_t2(const SpectralModel& spectrum, const SolverState& state);

}  // namespace ridgeshift
