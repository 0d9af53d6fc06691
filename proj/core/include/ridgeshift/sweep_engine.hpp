#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ridgeshift/asymptotic_risk.hpp"
#include "ridgeshift/finite_sample.hpp"
#include "ridgeshift/table.hpp"

namespace ridgeshift {

/// count points from start to stop inclusive, evenly spaced.
std::vector<double> linear_grid(double start, double stop, std::size_t count);
/// count points from start to stop inclusive, evenly spaced in log.
std::vector<double> log_grid(double start, double stop, std::size_t count);
/// 50 log-spaced points on [1e-2, 1e2].
std::vector<double> default_gamma_grid();

/// Two-scale spectrum with s-/s+ = 0.1, rho = pi = 1/2 (s+ = 1).
SpectralModel two_scale_spectrum();
/// Two-scale problem at snr = 1 with in-distribution optimal penalty.
ProblemSpec two_scale_problem(AtomShift low_variance, AtomShift high_variance);

struct SweepOptions {
  unsigned threads = 1;
  LambdaSearchOptions lambda;
};

struct SweepRow {
  std::size_t shift_index = 0;
  double gamma = 0.0;
  std::vector<AtomShift> shift;
  double lambda_used = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double risk = 0.0;
};

/// One row per (shift, gamma), shift-major. The template's penalty policy is
/// applied at every gamma. Solver failures carry the grid coordinates.
std::vector<SweepRow> gamma_sweep(const ProblemSpec& problem, std::span<const double> gamma_grid,
                                  std::span<const ShiftSpec> shifts,
                                  const SweepOptions& options = {});

/// Shape of each shift's curve in a gamma_sweep result.
std::vector<ProfileShape> classify_sweep(std::span<const SweepRow> rows);

struct PhaseRow {
  double kappa = 0.0;
  double cos_theta = 0.0;
  double min_risk = 0.0;
  double no_data = 0.0;
  double infinite_data = 0.0;
  Regime regime = Regime::Boundary;
  bool on_boundary = false;  // |kappa cos_theta - 1/2| <= kRegimeEpsilon
};

/// Isotropic phase diagram, kappa-major.
std::vector<PhaseRow> phase_grid(std::span<const double> kappas, std::span<const double> cosines,
                                 double signal = 1.0);

struct McCompareRow {
  double gamma = 0.0;
  std::size_t samples = 0;
  double lambda_used = 0.0;
  RiskReport theory;
  SampleStats bias;
  SampleStats variance;
  SampleStats risk;
  double z = 0.0;  // (mean R - theory R) / stderr
};

std::vector<McCompareRow> mc_compare(const ProblemSpec& problem, std::span<const double> gamma_grid,
                                     std::size_t dim, std::size_t n_seeds,
                                     std::uint64_t base_seed, const McOptions& options = {});

Table to_table(std::span<const SweepRow> rows, std::size_t atoms);
Table to_table(std::span<const PhaseRow> rows);
Table to_table(std::span<const McCompareRow> rows, const ShiftSpec& shift);

/// Column names for per-atom shift values: "kappa,costheta" for one atom,
/// "kappa_1..kappa_K,costheta_1..costheta_K" otherwise.
std::vector<std::string> shift_columns(std::size_t atoms);

}  // namespace ridgeshift
