#include "cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ridgeshift/asymptotic_risk.hpp"
#include "ridgeshift/errors.hpp"
#include "ridgeshift/finite_sample.hpp"
#include "ridgeshift/sweep_engine.hpp"

namespace ridgeshift::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(const std::string& s) {
  Int v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// Raw option text as captured by CLI11; converted and checked in validate().
struct RawArgs {
  std::vector<std::string> gamma;
  std::vector<std::string> kappa;
  std::vector<std::string> costheta;
  std::vector<std::string> robust_q;
  std::string gamma_grid;
  std::string snr;
  std::string signal;
  std::string lambda;
  std::string spectrum;
  std::string preset;
  std::string kappa_grid;
  std::string costheta_grid;
  std::string out;
  std::string config;
  std::string seed;
  std::string threads;
  std::string dim;
  std::string n_seeds;
  std::string max_iters;
  bool whiten = false;
};

struct Registered {
  CLI::App* app;
  Subcommand command;
};

void add_shared(CLI::App* sub, RawArgs& raw) {
  sub->add_option("--gamma", raw.gamma, "aspect ratio P/N (comma list allowed)");
  sub->add_option("--snr", raw.snr, "signal-to-noise ratio");
  sub->add_option("--signal", raw.signal, "beta^T Sigma beta (default 1)");
  sub->add_option("--lambda", raw.lambda, "ridge penalty: positive value or 'optimal'");
  sub->add_option("--spectrum", raw.spectrum, "atoms s,rho,pi[;s,rho,pi...]");
  sub->add_option("--preset", raw.preset, "named spectrum: isotropic | two-scale");
  sub->add_option("--kappa", raw.kappa, "per-atom scaling k1[,k2...]");
  sub->add_option("--costheta", raw.costheta, "per-atom alignment c1[,c2...]");
  sub->add_option("--robust-q", raw.robust_q, "robust feature fraction q in [0,1]");
  sub->add_option("--out", raw.out, "output CSV path (stdout if omitted)");
  sub->add_option("--config", raw.config, "key = value defaults file");
  sub->add_option("--seed", raw.seed, "run seed");
  sub->add_option("--threads", raw.threads, "worker threads (0 = all cores)");
  sub->add_option("--max-iters", raw.max_iters, "solver iteration budget");
}

std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App* sub,
                                      std::vector<std::string>& errors) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return {};

  std::ifstream in(path);
  if (!in) {
    errors.push_back("--config: cannot read '" + path + "'");
    return {};
  }
  const auto on_command_line = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };

  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("--config: line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
      errors.push_back("--config: unknown key '" + key + "' on line " + std::to_string(line_no));
      continue;
    }
    if (on_command_line(key)) continue;
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

std::optional<std::vector<double>> parse_list(const std::string& flag, const std::string& text,
                                              std::vector<std::string>& errors) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) {
    const auto v = to_double(part);
    if (!v) {
      errors.push_back(flag + ": '" + part + "' is not a number");
      return std::nullopt;
    }
    values.push_back(*v);
  }
  return values;
}

std::optional<std::vector<double>> checked_grid(const std::string& flag, const std::string& text,
                                                std::vector<std::string>& errors) {
  try {
    return parse_grid(text);
  } catch (const std::exception& e) {
    errors.push_back(flag + ": " + e.what());
    return std::nullopt;
  }
}

void require_increasing(const std::string& flag, const std::vector<double>& grid,
                        std::vector<std::string>& errors) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) {
      errors.push_back(flag + ": values must be positive");
      return;
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      errors.push_back(flag + ": values must be strictly increasing");
      return;
    }
  }
}

void validate_shifts(const RawArgs& raw, std::size_t atoms, bool many_allowed, RunConfig& cfg,
                     std::vector<std::string>& errors) {
  if (!raw.robust_q.empty() && (!raw.kappa.empty() || !raw.costheta.empty())) {
    errors.push_back("--robust-q: cannot be combined with --kappa/--costheta");
    return;
  }
  if (!raw.robust_q.empty()) {
    for (const auto& text : raw.robust_q) {
      const auto q = to_double(text);
      if (!q || *q < 0.0 || *q > 1.0) {
        errors.push_back("--robust-q: must be a number in [0, 1], got '" + text + "'");
        return;
      }
      cfg.shifts.emplace_back(atoms, shift_from_robust_fraction(*q));
    }
  } else {
    const std::size_t nk = raw.kappa.size();
    const std::size_t nc = raw.costheta.size();
    const std::size_t n = std::max<std::size_t>({nk, nc, 1});
    if ((nk > 1 && nk != n) || (nc > 1 && nc != n)) {
      errors.push_back("--kappa/--costheta: occurrence counts must match (or be 1)");
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> kappas(atoms, 1.0);
      std::vector<double> cosines(atoms, 1.0);
      const auto fill = [&](const std::string& flag, const std::vector<std::string>& src,
                            std::vector<double>& dst) {
        if (src.empty()) return true;
        const auto v = parse_list(flag, src[src.size() == 1 ? 0 : i], errors);
        if (!v) return false;
        if (v->size() == 1) {
          std::fill(dst.begin(), dst.end(), v->front());
        } else if (v->size() == atoms) {
          dst = *v;
        } else {
          errors.push_back(flag + ": expected 1 or " + std::to_string(atoms) + " values, got " +
                           std::to_string(v->size()));
          return false;
        }
        return true;
      };
      if (!fill("--kappa", raw.kappa, kappas) || !fill("--costheta", raw.costheta, cosines)) return;
      std::vector<AtomShift> shift;
      for (std::size_t a = 0; a < atoms; ++a) {
        if (!(kappas[a] >= 0.0)) {
          errors.push_back("--kappa: must be >= 0");
          return;
        }
        if (!(std::abs(cosines[a]) <= 1.0)) {
          errors.push_back("--costheta: must lie in [-1, 1]");
          return;
        }
        shift.push_back({kappas[a], cosines[a]});
      }
      cfg.shifts.push_back(std::move(shift));
    }
  }
  if (!many_allowed && cfg.shifts.size() > 1) {
    errors.push_back("--kappa/--costheta/--robust-q: this subcommand takes a single shift");
  }
}

std::optional<RunConfig> validate(const RawArgs& raw, Subcommand command, const CLI::App* sub,
                                  std::vector<std::string>& errors) {
  RunConfig cfg;
  cfg.command = command;
  const auto given = [&](const char* name) { return sub->count(name) > 0; };

  const auto positive = [&](const char* flag, const std::string& text, double& dst) {
    const auto v = to_double(text);
    if (!v || !(*v > 0.0)) {
      errors.push_back(std::string(flag) + ": must be a positive number, got '" + text + "'");
      return;
    }
    dst = *v;
  };
  if (given("--snr")) positive("--snr", raw.snr, cfg.snr);
  if (given("--signal")) positive("--signal", raw.signal, cfg.signal);

  if (given("--lambda") && raw.lambda != "optimal") {
    const auto v = to_double(raw.lambda);
    if (!v || !(*v > 0.0)) {
      errors.push_back("--lambda: must be 'optimal' or a positive number, got '" + raw.lambda + "'");
    } else {
      cfg.penalty = Penalty::fixed(*v);
    }
  }

  // Gamma values.
  std::vector<double> gammas;
  bool gamma_ok = true;
  for (const auto& text : raw.gamma) {
    const auto v = parse_list("--gamma", text, errors);
    if (!v) {
      gamma_ok = false;
      continue;
    }
    for (double g : *v) {
      if (!(g > 0.0)) {
        errors.push_back("--gamma: must be positive, got " + text);
        gamma_ok = false;
      }
      gammas.push_back(g);
    }
  }
  const bool grid_allowed = command == Subcommand::Sweep || command == Subcommand::Mc;
  if (grid_allowed && given("--gamma-grid")) {
    if (!raw.gamma.empty()) errors.push_back("--gamma-grid: cannot be combined with --gamma");
    if (auto g = checked_grid("--gamma-grid", raw.gamma_grid, errors)) {
      require_increasing("--gamma-grid", *g, errors);
      cfg.gammas = *g;
    }
  } else if (!gammas.empty()) {
    if (gamma_ok && grid_allowed) require_increasing("--gamma", gammas, errors);
    cfg.gammas = gammas;
  } else if (command == Subcommand::Sweep) {
    cfg.gammas = default_gamma_grid();
  } else if (command == Subcommand::Mc) {
    cfg.gammas = {0.5, 1.0, 2.0};
  }

  // Spectrum.
  if (given("--spectrum") && given("--preset")) {
    errors.push_back("--preset: cannot be combined with --spectrum");
  } else if (given("--preset")) {
    if (raw.preset == "two-scale") {
      const SpectralModel preset = two_scale_spectrum();
      cfg.atoms.assign(preset.atoms().begin(), preset.atoms().end());
    } else if (raw.preset != "isotropic") {
      errors.push_back("--preset: unknown preset '" + raw.preset + "' (isotropic, two-scale)");
    }
  } else if (given("--spectrum")) {
    cfg.atoms.clear();
    bool ok = true;
    for (const auto& atom_text : split(raw.spectrum, ';')) {
      const auto v = parse_list("--spectrum", atom_text, errors);
      if (!v || v->size() != 3) {
        if (v) errors.push_back("--spectrum: each atom needs s,rho,pi, got '" + atom_text + "'");
        ok = false;
        break;
      }
      cfg.atoms.push_back({(*v)[0], (*v)[1], (*v)[2]});
    }
    if (ok) {
      try {
        SpectralModel check(cfg.atoms);
      } catch (const InvalidArgument& e) {
        errors.push_back(std::string("--spectrum: ") + e.what());
      }
    }
  }

  validate_shifts(raw, cfg.atoms.size(), command == Subcommand::Sweep, cfg, errors);

  if (command == Subcommand::Phase) {
    const std::string kg = given("--kappa-grid") ? raw.kappa_grid : "0:1.5:31";
    const std::string cg = given("--costheta-grid") ? raw.costheta_grid : "0:1:21";
    if (auto g = checked_grid("--kappa-grid", kg, errors)) {
      if (std::any_of(g->begin(), g->end(), [](double k) { return !(k >= 0.0); })) {
        errors.push_back("--kappa-grid: values must be >= 0");
      }
      cfg.kappa_grid = *g;
    }
    if (auto g = checked_grid("--costheta-grid", cg, errors)) {
      if (std::any_of(g->begin(), g->end(), [](double c) { return !(std::abs(c) <= 1.0); })) {
        errors.push_back("--costheta-grid: values must lie in [-1, 1]");
      }
      cfg.costheta_grid = *g;
    }
  }

  if (given("--out")) {
    if (raw.out.empty()) {
      errors.push_back("--out: empty path");
    } else {
      cfg.out = raw.out;
    }
  }
  if (given("--seed")) {
    if (auto v = to_integer<std::uint64_t>(raw.seed)) {
      cfg.seed = *v;
    } else {
      errors.push_back("--seed: must be a non-negative integer, got '" + raw.seed + "'");
    }
  }
  if (given("--threads")) {
    if (auto v = to_integer<unsigned>(raw.threads)) {
      cfg.threads = *v;
    } else {
      errors.push_back("--threads: must be a non-negative integer, got '" + raw.threads + "'");
    }
  }
  if (given("--max-iters")) {
    auto v = to_integer<int>(raw.max_iters);
    if (v && *v >= 1) {
      cfg.max_iters = *v;
    } else {
      errors.push_back("--max-iters: must be an integer >= 1, got '" + raw.max_iters + "'");
    }
  }
  if (command == Subcommand::Mc) {
    if (given("--dim")) {
      auto v = to_integer<std::size_t>(raw.dim);
      if (v && *v >= 2) {
        cfg.dim = *v;
      } else {
        errors.push_back("--dim: must be an integer >= 2, got '" + raw.dim + "'");
      }
    }
    if (given("--n-seeds")) {
      auto v = to_integer<std::size_t>(raw.n_seeds);
      if (v && *v >= 2) {
        cfg.n_seeds = *v;
      } else {
        errors.push_back("--n-seeds: must be an integer >= 2, got '" + raw.n_seeds + "'");
      }
    }
    cfg.whiten = raw.whiten;
  }

  if (!errors.empty()) return std::nullopt;
  return cfg;
}

// ---------------------------------------------------------------------------

struct Model {
  SpectralModel spectrum;
  std::vector<ShiftSpec> shifts;
};

Model build_model(const RunConfig& cfg) {
  std::vector<std::vector<AtomShift>> shifts = cfg.shifts;
  if (shifts.empty()) shifts.emplace_back(cfg.atoms.size());
  std::optional<SpectralModel> spectrum;
  std::vector<ShiftSpec> canonical;
  for (const auto& s : shifts) {
    auto [model, shift] = make_shifted_model(cfg.atoms, s);
    if (!spectrum) spectrum = std::move(model);
    canonical.push_back(std::move(shift));
  }
  return {std::move(*spectrum), std::move(canonical)};
}

LambdaSearchOptions search_options(const RunConfig& cfg) {
  LambdaSearchOptions opts;
  opts.solver.max_iterations = cfg.max_iters;
  return opts;
}

void emit(const RunConfig& cfg, const Table& table, const std::string& summary, std::ostream& out,
          std::ostream& err) {
  if (cfg.out) {
    write_csv(table, *cfg.out);
    out << summary << " -> " << cfg.out->string() << '\n';
  } else {
    ridgeshift::write_csv(out, table);
    err << summary << '\n';
  }
}

std::string join_shapes(const std::vector<ProfileShape>& shapes) {
  std::string s;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (i) s += ", ";
    s += "#" + std::to_string(i) + " " + std::string(to_string(shapes[i]));
  }
  return s;
}

int run_risk(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Model model = build_model(cfg);
  const auto search = search_options(cfg);
  ProblemSpec problem{model.spectrum, model.shifts.front(), 1.0, cfg.snr, cfg.penalty, cfg.signal};

  Table table;
  table.header = {"gamma"};
  for (auto& c : shift_columns(model.spectrum.size())) table.header.push_back(std::move(c));
  for (const char* c : {"lambda_used", "B", "V", "R"}) table.header.emplace_back(c);
  for (double gamma : cfg.gammas) {
    problem.gamma = gamma;
    const double lambda = problem.penalty.is_optimal()
                              ? optimal_lambda(problem.spectrum, gamma, problem.snr, search)
                              : problem.penalty.value();
    const RiskReport r = asymptotic_risk_at(problem, lambda, search.solver);
    std::vector<Cell> row{gamma};
    for (const auto& s : problem.shift.shifts()) row.emplace_back(s.kappa);
    for (const auto& s : problem.shift.shifts()) row.emplace_back(s.cos_theta);
    row.insert(row.end(), {r.lambda_used, r.bias, r.variance, r.risk});
    table.rows.push_back(std::move(row));
  }
  emit(cfg, table, "risk: " + std::to_string(table.rows.size()) + " rows", out, err);
  return kExitOk;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Model model = build_model(cfg);
  ProblemSpec problem{model.spectrum, model.shifts.front(), 1.0, cfg.snr, cfg.penalty, cfg.signal};
  SweepOptions opts;
  opts.threads = cfg.threads;
  opts.lambda = search_options(cfg);
  const auto rows = gamma_sweep(problem, cfg.gammas, model.shifts, opts);
  std::string summary = "sweep: " + std::to_string(rows.size()) + " rows";
  if (cfg.gammas.size() >= 3) summary += "; shapes: " + join_shapes(classify_sweep(rows));
  emit(cfg, to_table(rows, model.spectrum.size()), summary, out, err);
  return kExitOk;
}

int run_phase(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto rows = phase_grid(cfg.kappa_grid, cfg.costheta_grid, cfg.signal);
  std::size_t weak = 0, strong = 0, boundary = 0;
  for (const auto& r : rows) {
    if (r.regime == Regime::Weak) ++weak;
    if (r.regime == Regime::Strong) ++strong;
    if (r.regime == Regime::Boundary) ++boundary;
  }
  std::ostringstream summary;
  summary << "phase: " << rows.size() << " rows (weak " << weak << ", strong " << strong
          << ", boundary " << boundary << ")";
  emit(cfg, to_table(rows), summary.str(), out, err);
  return kExitOk;
}

int run_mc(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Model model = build_model(cfg);
  ProblemSpec problem{model.spectrum, model.shifts.front(), 1.0, cfg.snr, cfg.penalty, cfg.signal};
  McOptions opts;
  opts.whiten = cfg.whiten;
  opts.threads = cfg.threads;
  opts.lambda = search_options(cfg);
  const auto rows = mc_compare(problem, cfg.gammas, cfg.dim, cfg.n_seeds, cfg.seed, opts);
  double max_z = 0.0;
  for (const auto& r : rows) max_z = std::max(max_z, std::abs(r.z));
  char buf[128];
  std::snprintf(buf, sizeof buf, "mc: %zu rows, P=%zu, %zu seeds, max |z| = %.3f", rows.size(),
                cfg.dim, cfg.n_seeds, max_z);
  emit(cfg, to_table(rows, problem.shift), buf, out, err);
  return kExitOk;
}

int run_whiten(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Model model = build_model(cfg);
  const auto eff = whiten_equivalent(model.spectrum, model.shifts.front());
  const auto limits = risk_limits(eff.spectrum, eff.shift, cfg.signal);
  const AtomShift s = eff.shift[0];
  Table table;
  table.header = {"kappa_eff", "costheta_eff", "R_no_data", "R_infinite_data", "regime"};
  table.rows.push_back({s.kappa, s.cos_theta, limits.no_data, limits.infinite_data,
                        std::string(to_string(classify_regime(s.kappa, s.cos_theta)))});
  char buf[128];
  std::snprintf(buf, sizeof buf, "whiten: kappa_eff=%.10g costheta_eff=%.10g", s.kappa,
                s.cos_theta);
  emit(cfg, table, buf, out, err);
  return kExitOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  auto parts = split(text, ':');
  bool log_spaced = false;
  if (!parts.empty() && parts.front() == "log") {
    log_spaced = true;
    parts.erase(parts.begin());
  }
  if (parts.size() != 3) {
    throw InvalidArgument("grid must be start:stop:count or log:start:stop:count, got '" + text + "'");
  }
  const auto start = to_double(parts[0]);
  const auto stop = to_double(parts[1]);
  const auto count = to_integer<std::size_t>(parts[2]);
  if (!start || !stop) throw InvalidArgument("grid bounds must be numbers, got '" + text + "'");
  if (!count || *count == 0) throw InvalidArgument("grid count must be a positive integer");
  return log_spaced ? log_grid(*start, *stop, *count) : linear_grid(*start, *stop, *count);
}

ParseResult parse(const std::vector<std::string>& args) {
  ParseResult result;
  RawArgs raw;
  CLI::App app{"ridgeshift: ridge regression risk under concept shift", "ridgeshift"};
  app.require_subcommand(1);

  std::vector<Registered> subs;
  const auto add = [&](const char* name, const char* about, Subcommand command) {
    CLI::App* sub = app.add_subcommand(name, about);
    add_shared(sub, raw);
    subs.push_back({sub, command});
    return sub;
  };
  add("risk", "asymptotic bias, variance and risk at each --gamma", Subcommand::Risk);
  CLI::App* sweep = add("sweep", "risk over a gamma grid for one or more shifts", Subcommand::Sweep);
  sweep->add_option("--gamma-grid", raw.gamma_grid, "start:stop:count or log:start:stop:count");
  CLI::App* phase = add("phase", "regime and minimum risk over (kappa, cos theta)", Subcommand::Phase);
  phase->add_option("--kappa-grid", raw.kappa_grid, "default 0:1.5:31");
  phase->add_option("--costheta-grid", raw.costheta_grid, "default 0:1:21");
  CLI::App* mc = add("mc", "Monte Carlo ridge risk against the asymptotic theory", Subcommand::Mc);
  mc->add_option("--dim", raw.dim, "dimension P (default 256)");
  mc->add_option("--n-seeds", raw.n_seeds, "replicates per gamma (default 100)");
  mc->add_option("--gamma-grid", raw.gamma_grid, "start:stop:count or log:start:stop:count");
  mc->add_flag("--whiten", raw.whiten, "fit on whitened covariates");
  add("whiten", "isotropic shift equivalent to ridge on whitened covariates", Subcommand::Whiten);

  // Config defaults are inserted right after the subcommand so that explicit
  // flags are seen as given and config keys never override them.
  std::vector<std::string> argv_tokens = args;
  if (!args.empty()) {
    for (const auto& reg : subs) {
      if (reg.app->get_name() != args.front()) continue;
      auto extra = apply_config(args, reg.app, result.errors);
      argv_tokens.insert(argv_tokens.begin() + 1, extra.begin(), extra.end());
    }
  }
  if (!result.errors.empty()) return result;

  std::vector<const char*> argv{"ridgeshift"};
  for (const auto& t : argv_tokens) argv.push_back(t.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    app.exit(e, help_out, help_err);
    if (e.get_exit_code() == 0) {
      result.help = help_out.str();
    } else {
      result.errors.push_back(e.what());
    }
    return result;
  }

  for (const auto& reg : subs) {
    if (reg.app->parsed()) result.config = validate(raw, reg.command, reg.app, result.errors);
  }
  return result;
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    ridgeshift::write_csv(f, table);
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Subcommand::Risk: return run_risk(config, out, err);
      case Subcommand::Sweep: return run_sweep(config, out, err);
      case Subcommand::Phase: return run_phase(config, out, err);
      case Subcommand::Mc: return run_mc(config, out, err);
      case Subcommand::Whiten: return run_whiten(config, out, err);
    }
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ParseResult parsed = parse(args);
  if (parsed.help) {
    out << *parsed.help;
    return kExitOk;
  }
  if (!parsed.config) {
    for (const auto& e : parsed.errors) err << "usage error: " << e << '\n';
    err << "run 'ridgeshift --help' for usage\n";
    return kExitUsage;
  }
  return run(*parsed.config, out, err);
}

}  // namespace ridgeshift::cli
