#include "ridgeshift/sweep_engine.hpp"

#include <cmath>
#include <sstream>

#include "ridgeshift/errors.hpp"
#include "ridgeshift/parallel.hpp"

namespace ridgeshift {
namespace {

void check_gamma_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("gamma grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw InvalidArgument("gamma grid values must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument("gamma grid must be strictly increasing");
    }
  }
}

void push_shift(std::vector<Cell>& row, std::span<const AtomShift> shift) {
  for (const auto& s : shift) row.emplace_back(s.kappa);
  for (const auto& s : shift) row.emplace_back(s.cos_theta);
}

}  // namespace

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
  if (count == 0) throw InvalidArgument("grid count must be >= 1");
  if (!std::isfinite(start) || !std::isfinite(stop)) throw InvalidArgument("grid bounds must be finite");
  if (count == 1) return {start};
  std::vector<double> grid(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + step * static_cast<double>(i);
  grid.back() = stop;
  return grid;
}

std::vector<double> log_grid(double start, double stop, std::size_t count) {
  if (!(start > 0.0) || !(stop > 0.0)) throw InvalidArgument("log grid bounds must be positive");
  auto exponents = linear_grid(std::log(start), std::log(stop), count);
  for (auto& e : exponents) e = std::exp(e);
  exponents.front() = start;
  if (count > 1) exponents.back() = stop;
  return exponents;
}

std::vector<double> default_gamma_grid() { return log_grid(1e-2, 1e2, 50); }

SpectralModel two_scale_spectrum() {
  return SpectralModel({{0.1, 0.5, 0.5}, {1.0, 0.5, 0.5}});
}

ProblemSpec two_scale_problem(AtomShift low_variance, AtomShift high_variance) {
  auto spectrum = two_scale_spectrum();
  ShiftSpec shift({low_variance, high_variance}, spectrum);
  return ProblemSpec{std::move(spectrum), std::move(shift), 1.0, 1.0, Penalty::optimal(), 1.0};
}

std::vector<SweepRow> gamma_sweep(const ProblemSpec& problem, std::span<const double> gamma_grid,
                                  std::span<const ShiftSpec> shifts, const SweepOptions& options) {
  problem.validate();
  check_gamma_grid(gamma_grid);
  if (shifts.empty()) throw InvalidArgument("sweep needs at least one shift");
  for (const auto& s : shifts) {
    if (s.size() != problem.spectrum.size()) throw InvalidArgument("shift does not match spectrum");
  }

  const std::size_t n_gamma = gamma_grid.size();
  std::vector<SweepRow> rows(shifts.size() * n_gamma);
  parallel_for(rows.size(), options.threads, [&](std::size_t idx) {
    const std::size_t k = idx / n_gamma;
    const double gamma = gamma_grid[idx % n_gamma];
    ProblemSpec point = problem;
    point.shift = shifts[k];
    point.gamma = gamma;
    try {
      const double lambda =
          point.penalty.is_optimal()
              ? optimal_lambda(point.spectrum, gamma, point.snr, options.lambda)
              : point.penalty.value();
      const RiskReport r = asymptotic_risk_at(point, lambda, options.lambda.solver);
      SweepRow& row = rows[idx];
      row.shift_index = k;
      row.gamma = gamma;
      row.shift.assign(shifts[k].shifts().begin(), shifts[k].shifts().end());
      row.lambda_used = lambda;
      row.bias = r.bias;
      row.variance = r.variance;
      row.risk = r.risk;
    } catch (const NumericFailure& e) {
      std::ostringstream os;
      os << "sweep at gamma=" << gamma << ", shift #" << k << ": " << e.what();
      throw NumericFailure(os.str(), e.last_residual());
    }
  });
  return rows;
}

std::vector<ProfileShape> classify_sweep(std::span<const SweepRow> rows) {
  std::vector<ProfileShape> shapes;
  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    std::vector<double> risks;
    while (end < rows.size() && rows[end].shift_index == rows[begin].shift_index) {
      risks.push_back(rows[end].risk);
      ++end;
    }
    shapes.push_back(classify_profile(risks));
    begin = end;
  }
  return shapes;
}

std::vector<PhaseRow> phase_grid(std::span<const double> kappas, std::span<const double> cosines,
                                 double signal) {
  std::vector<PhaseRow> rows;
  rows.reserve(kappas.size() * cosines.size());
  const auto iso = SpectralModel::isotropic();
  for (double kappa : kappas) {
    for (double c : cosines) {
      PhaseRow row;
      row.kappa = kappa;
      row.cos_theta = c;
      row.regime = classify_regime(kappa, c);
      const auto limits = risk_limits(iso, ShiftSpec({{kappa, c}}, iso), signal);
      row.no_data = limits.no_data;
      row.infinite_data = limits.infinite_data;
      row.min_risk = min_risk(kappa, c, signal);
      row.on_boundary = std::abs(kappa * c - 0.5) <= kRegimeEpsilon;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<McCompareRow> mc_compare(const ProblemSpec& problem, std::span<const double> gamma_grid,
                                     std::size_t dim, std::size_t n_seeds,
                                     std::uint64_t base_seed, const McOptions& options) {
  check_gamma_grid(gamma_grid);
  std::vector<McCompareRow> rows;
  rows.reserve(gamma_grid.size());
  for (double gamma : gamma_grid) {
    ProblemSpec point = problem;
    point.gamma = gamma;
    const McSummary s = mc_risk(point, dim, n_seeds, base_seed, options);
    McCompareRow row;
    row.gamma = gamma;
    row.samples = s.samples;
    row.lambda_used = s.theory.lambda_used;
    row.theory = s.theory;
    row.bias = s.bias;
    row.variance = s.variance;
    row.risk = s.risk;
    const double diff = s.risk.mean - s.theory.risk;
    row.z = s.risk.std_error > 0.0 ? diff / s.risk.std_error : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> shift_columns(std::size_t atoms) {
  if (atoms == 1) return {"kappa", "costheta"};
  std::vector<std::string> cols;
  for (std::size_t i = 1; i <= atoms; ++i) cols.push_back("kappa_" + std::to_string(i));
  for (std::size_t i = 1; i <= atoms; ++i) cols.push_back("costheta_" + std::to_string(i));
  return cols;
}

Table to_table(std::span<const SweepRow> rows, std::size_t atoms) {
  Table t;
  t.header = {"shift", "gamma"};
  for (auto& c : shift_columns(atoms)) t.header.push_back(std::move(c));
  for (const char* c : {"lambda_used", "B", "V", "R"}) t.header.emplace_back(c);
  for (const auto& r : rows) {
    std::vector<Cell> row{static_cast<std::int64_t>(r.shift_index), r.gamma};
    push_shift(row, r.shift);
    row.insert(row.end(), {r.lambda_used, r.bias, r.variance, r.risk});
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(std::span<const PhaseRow> rows) {
  Table t;
  t.header = {"kappa", "costheta", "R_min", "R_no_data", "R_infinite_data", "regime", "on_boundary"};
  for (const auto& r : rows) {
    t.rows.push_back({r.kappa, r.cos_theta, r.min_risk, r.no_data, r.infinite_data,
                      std::string(to_string(r.regime)),
                      static_cast<std::int64_t>(r.on_boundary ? 1 : 0)});
  }
  return t;
}

Table to_table(std::span<const McCompareRow> rows, const ShiftSpec& shift) {
  Table t;
  t.header = {"gamma", "N"};
  for (auto& c : shift_columns(shift.size())) t.header.push_back(std::move(c));
  for (const char* c : {"lambda_used", "B_theory", "V_theory", "R_theory", "B_mean", "B_stderr",
                        "V_mean", "V_stderr", "R_mean", "R_stderr", "z", "n_seeds"}) {
    t.header.emplace_back(c);
  }
  for (const auto& r : rows) {
    std::vector<Cell> row{r.gamma, static_cast<std::int64_t>(r.samples)};
    push_shift(row, shift.shifts());
    row.insert(row.end(), {r.lambda_used, r.theory.bias, r.theory.variance, r.theory.risk,
                           r.bias.mean, r.bias.std_error, r.variance.mean, r.variance.std_error,
                           r.risk.mean, r.risk.std_error, r.z});
    row.emplace_back(static_cast<std::int64_t>(r.risk.count));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace ridgeshift
