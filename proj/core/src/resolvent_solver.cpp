#include "ridgeshift/resolvent_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ridgeshift/errors.hpp"

namespace ridgeshift {
namespace {

struct MapValue {
  double f;       // F(nu)
  double slope;   // F'(nu) = gamma T2(nu)
};

MapValue evaluate_map(const SpectralModel& spectrum, double gamma, double lambda, double nu) {
  const double m = 1.0 / (1.0 + gamma * nu);
  double f = 0.0;
  double t2 = 0.0;
  for (const auto& a : spectrum.atoms()) {
    const double g = 1.0 / (m * a.variance + lambda);
    const double msg = m * a.variance * g;
    f += a.weight * a.variance * g;
    t2 += a.weight * msg * msg;
  }
  return {f, gamma * t2};
}

void check_inputs(double gamma, double lambda) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("solver: gamma must be positive and finite");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("solver: lambda must be positive and finite");
  }
}

[[noreturn]] void fail(double gamma, double lambda, int iterations, double residual) {
  std::ostringstream os;
  os << "self-consistent equation did not converge (gamma=" << gamma << ", lambda=" << lambda
     << ") after " << iterations << " iterations, residual " << residual;
  throw NumericFailure(os.str(), residual);
}

}  // namespace

SolverState solve_state(const SpectralModel& spectrum, double gamma, double lambda,
                        const SolverOptions& options) {
  check_inputs(gamma, lambda);

  // F is increasing and concave in nu with F(0) > 0, so h = nu - F(nu) has a
  // single positive root inside [F(0), sum rho s / lambda].
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& a : spectrum.atoms()) {
    lo += a.weight * a.variance / (a.variance + lambda);
    hi += a.weight * a.variance / lambda;
  }

  double nu = lo;
  double residual = 0.0;
  int iteration = 0;
  bool converged = false;
  while (iteration < options.max_iterations) {
    ++iteration;
    const auto [f, slope] = evaluate_map(spectrum, gamma, lambda, nu);
    const double r = nu - f;
    residual = std::abs(r);
    if (!std::isfinite(r)) break;
    if (residual <= options.tolerance * std::max(1.0, nu)) {
      converged = true;
      break;
    }

    if (options.method == SolverMethod::DampedFixedPoint) {
      nu = (1.0 - options.damping) * nu + options.damping * f;
      continue;
    }

    if (r < 0.0) {
      lo = nu;
    } else {
      hi = nu;
    }
    const double dh = 1.0 - slope;
    double next = dh > 0.0 ? nu - r / dh : lo;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (next == nu) break;
    nu = next;
  }
  if (!converged) fail(gamma, lambda, iteration, residual);

  SolverState state;
  state.lambda = lambda;
  state.gamma = gamma;
  state.nu = nu;
  state.m = 1.0 / (1.0 + gamma * nu);
  state.iterations = iteration;
  state.g.reserve(spectrum.size());

  double f = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  for (const auto& a : spectrum.atoms()) {
    const double g = 1.0 / (state.m * a.variance + lambda);
    const double msg = state.m * a.variance * g;
    state.g.push_back(g);
    f += a.weight * a.variance * g;
    t1 += a.weight * a.variance * g * g;
    t2 += a.weight * msg * msg;
  }
  state.residual = std::abs(nu - f);
  state.nu_prime = t1 / (1.0 - gamma * t2);
  return state;
}

double closed_form_nu_iso(double gamma, double lambda) {
  check_inputs(gamma, lambda);
  const double b = 1.0 - gamma + lambda;
  const double root = std::sqrt(b * b + 4.0 * gamma * lambda);
  if (b > 0.0) return 2.0 / (b + root);
  return (root - b) / (2.0 * gamma * lambda);
}

double resolvent_t2(const SpectralModel& spectrum, const SolverState& state) {
  double t2 = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double msg = state.m * spectrum[i].variance * state.g[i];
    t2 += spectrum[i].weight * msg * msg;
  }
  return t2;
}

}  // namespace ridgeshift
