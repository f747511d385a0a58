// Command-line front end: convergence tables, LFA scans, the acceptance
// suite, and one-off solves.
//
// Exit codes: 0 success, 1 usage error, 2 divergence or failed criterion.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "macmg/experiment.hpp"
#include "macmg/lfa.hpp"
#include "macmg/multigrid.hpp"
#include "macmg/operators.hpp"

namespace {

using namespace macmg;
namespace ex = macmg::experiment;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailure = 2;

RelaxScheme scheme_or_throw(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) {
    std::string all;
    for (RelaxScheme k : kAllSchemes) all += (all.empty() ? "" : ", ") + std::string(tag(k));
    throw ex::ConfigError("unknown scheme '" + name + "' (expected one of: " + all + ")");
  }
  return *s;
}

void emit(const ex::Table& table, const std::string& out) {
  table.print(std::cout);
  if (!out.empty()) {
    ex::write_csv_file(out, table);
    std::cout << "wrote " << out << '\n';
  }
}

struct TablesArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> kmax;
  std::optional<std::string> out;
  std::optional<int> resolution;
  std::optional<std::string> scheme;
  unsigned threads = 0;
};

int run_tables(const TablesArgs& a) {
  if (!a.config.empty() && !a.preset.empty()) {
    throw ex::ConfigError("--config and --preset are mutually exclusive");
  }
  std::vector<ex::ExperimentConfig> configs =
      !a.config.empty() ? ex::load_config(a.config) : ex::builtin_config(a.preset.empty() ? "all" : a.preset);
  ex::Overrides o;
  o.seed = a.seed;
  o.k_max = a.kmax;
  o.out = a.out;
  o.resolution = a.resolution;
  if (a.scheme) o.scheme = scheme_or_throw(*a.scheme);
  ex::apply(o, configs);

  const ex::TablesReport report = ex::run_tables(configs, a.threads);
  ex::results_table(report.rows).print(std::cout);

  // One CSV per distinct output path, rows in run order.
  std::map<std::string, std::vector<ex::ResultRow>> by_file;
  std::size_t row = 0;
  for (const auto& c : configs) {
    const std::size_t count = c.cycles.size() * c.grid_sizes.size() * c.nus.size();
    for (std::size_t k = 0; k < count; ++k, ++row) {
      if (!c.out.empty()) by_file[c.out].push_back(report.rows[row]);
    }
  }
  for (const auto& [path, rows] : by_file) {
    ex::write_csv_file(path, ex::results_table(rows));
    std::cout << "wrote " << path << '\n';
  }
  if (!report.all_ok()) {
    std::cerr << "one or more runs diverged or failed\n";
    return kFailure;
  }
  return kOk;
}

struct ScanArgs {
  std::vector<std::string> schemes;
  std::string config;
  int resolution = 256;
  bool presets = false;
  std::string out;
  unsigned threads = 0;
};

int run_scan(const ScanArgs& a) {
  std::vector<RelaxScheme> schemes;
  int resolution = a.resolution;
  if (!a.config.empty()) {
    for (const auto& c : ex::load_config(a.config)) {
      schemes.push_back(c.scheme);
      if (c.resolution > 0) resolution = c.resolution;
    }
  }
  for (const auto& s : a.schemes) schemes.push_back(scheme_or_throw(s));
  if (schemes.empty()) schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));

  std::vector<ex::ScanRow> rows;
  if (a.presets) {
    if (resolution < 16) throw ex::ConfigError("--resolution must be at least 16");
    for (RelaxScheme s : schemes) {
      rows.push_back({s, preset(s), lfa::smoothing_factor(s, preset(s), resolution).mu,
                      lfa::analytic_optimum(s), 1, 0.0});
    }
  } else {
    rows = ex::run_lfa_scan(schemes, resolution, a.threads);
  }
  emit(ex::scan_table(rows), a.out);
  return kOk;
}

struct VerifyArgs {
  std::optional<double> qdr_omega;
  std::string transfer = "standard";
  std::uint64_t seed = 1;
  int kmax = 100;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  acceptance::Options o;
  o.qdr_omega = a.qdr_omega;
  o.transfer = a.transfer == "swapped" ? TransferConvention::AxisSwapped : TransferConvention::Standard;
  o.seed = a.seed;
  o.k_max = a.kmax;
  if (o.k_max < 1) throw ex::ConfigError("--kmax must be >= 1");
  const auto results = acceptance::run_all(o, [](const acceptance::Criterion& c) {
    std::cout << acceptance::format_line(c) << std::endl;
  });
  int passed = 0;
  ex::Table table({"id", "criterion", "result", "detail", "seconds"});
  for (const auto& c : results) {
    passed += c.passed;
    table.add_row({std::to_string(c.id), c.name, c.passed ? "PASS" : "FAIL", c.detail,
                   ex::format_fixed(c.seconds, 2)});
  }
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  if (!a.out.empty()) {
    ex::write_csv_file(a.out, table);
    std::cout << "wrote " << a.out << '\n';
  }
  return passed == static_cast<int>(results.size()) ? kOk : kFailure;
}

struct SolveArgs {
  std::string scheme = "qibsr";
  int n = 64;
  std::string cycle = "W";
  int nu = 2;
  std::optional<double> omega, alpha, sigma, omega_j;
  bool preset = false;
  int kmax = 100;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string out;
};

// Smooth periodic solution sampled at each unknown's location.
StaggeredField manufactured(const GridSpec& grid) {
  constexpr double tau = 2.0 * lfa::kPi;
  const double h = grid.h();
  StaggeredField x(grid);
  for (int j = 0; j < grid.n(); ++j) {
    for (int i = 0; i < grid.n(); ++i) {
      x.u(i, j) = std::sin(tau * i * h) * std::cos(tau * (j + 0.5) * h);
      x.v(i, j) = -std::cos(tau * (i + 0.5) * h) * std::sin(tau * j * h);
      x.p(i, j) = std::cos(tau * (i + 0.5) * h) * std::cos(2 * tau * (j + 0.5) * h);
    }
  }
  x.subtract_means();
  return x;
}

int run_solve(const SolveArgs& a) {
  const RelaxScheme scheme = scheme_or_throw(a.scheme);
  const auto kind = parse_cycle_kind(a.cycle);
  if (!kind) throw ex::ConfigError("unknown cycle '" + a.cycle + "' (expected two-grid, V or W)");
  if (a.n < 8 || !is_power_of_two(a.n)) throw ex::ConfigError("--n must be a power of two >= 8");
  if (*kind == CycleKind::TwoGrid && a.n / 2 > kMaxDirectN) {
    throw ex::ConfigError("two-grid needs a dense coarse solve; use --n <= " + std::to_string(2 * kMaxDirectN));
  }
  if (a.nu < 1) throw ex::ConfigError("--nu must be >= 1");
  if (a.kmax < 1) throw ex::ConfigError("--kmax must be >= 1");
  const bool custom = a.omega || a.alpha || a.sigma || a.omega_j;
  if (a.preset && custom) throw ex::ConfigError("--preset cannot be combined with explicit parameters");
  RelaxParams params = preset(scheme);
  if (a.omega) params.omega = *a.omega;
  if (a.alpha) params.alpha = *a.alpha;
  if (a.sigma) params.sigma = *a.sigma;
  if (a.omega_j) params.omega_j = *a.omega_j;
  try {
    validate(params);
  } catch (const std::invalid_argument& e) {
    throw ex::ConfigError(e.what());
  }

  const GridSpec grid(a.n);
  const CycleSpec spec = CycleSpec::split(a.nu, *kind, scheme, params);
  const MultigridSolver solver(spec, grid);
  const StaggeredField exact = manufactured(grid);
  const StaggeredField b = apply_stokes(grid, exact);
  StaggeredField x = random_field(grid, a.seed);

  std::cout << "solve: " << tag(scheme) << " " << tag(*kind) << "-cycle, h = 1/" << a.n
            << ", nu = " << a.nu << " (" << spec.nu1 << "+" << spec.nu2 << "), omega = "
            << params.omega << ", alpha = " << params.alpha << ", sigma = " << params.sigma
            << ", omega_j = " << params.omega_j << "\n";

  ex::Table table({"cycle", "residual", "ratio", "error"});
  const double r0 = norm2(residual(grid, b, x));
  double prev = r0;
  double r = r0;
  int k = 0;
  table.add_row({"0", ex::format_fixed(r0, 12), "", ex::format_fixed(norm2(x - exact), 12)});
  while (k < a.kmax && r > a.tol * r0) {
    x = solver.cycle(b, x);
    ++k;
    r = norm2(residual(grid, b, x));
    char rbuf[32], ebuf[32];
    std::snprintf(rbuf, sizeof rbuf, "%.6e", r);
    std::snprintf(ebuf, sizeof ebuf, "%.6e", norm2(x - exact));
    table.add_row({std::to_string(k), rbuf, ex::format_fixed(r / prev, 4), ebuf});
    prev = r;
    if (!std::isfinite(r) || r > 1e3 * r0) break;
  }
  emit(table, a.out);
  const bool converged = r <= a.tol * r0;
  const double avg = k > 0 ? std::pow(r / r0, 1.0 / k) : 0.0;
  std::cout << (converged ? "converged" : "did not converge") << " after " << k
            << " cycles, mean reduction " << ex::format_fixed(avg, 4) << " per cycle\n";
  return converged ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multigrid for the periodic MAC Stokes system with mass-based block smoothers"};
  app.require_subcommand(1);

  std::string scheme_help = "relaxation scheme:";
  for (RelaxScheme s : kAllSchemes) scheme_help += " " + std::string(tag(s));

  TablesArgs tables;
  auto* t = app.add_subcommand("tables", "measure multigrid convergence factors");
  t->add_option("--config", tables.config, "INI experiment file")->check(CLI::ExistingFile);
  t->add_option("--preset", tables.preset, "built-in experiment set: table1, table2, table3, all");
  t->add_option("--seed", tables.seed, "base seed for the random initial guesses");
  t->add_option("--kmax", tables.kmax, "cycles per measurement");
  t->add_option("--out", tables.out, "CSV output path for every run");
  t->add_option("--resolution", tables.resolution, "theta lattice for the LFA column (0 disables)");
  t->add_option("--scheme", tables.scheme, scheme_help);
  t->add_option("--threads", tables.threads, "worker threads (0 = all cores)");

  ScanArgs scan;
  auto* s = app.add_subcommand("lfa-scan", "search optimal smoothing parameters");
  s->add_option("--scheme", scan.schemes, scheme_help + " (repeatable; default all)");
  s->add_option("--config", scan.config, "INI file whose sections name the schemes")->check(CLI::ExistingFile);
  s->add_option("--resolution", scan.resolution, "theta lattice for the reported mu");
  s->add_flag("--preset", scan.presets, "evaluate the preset parameters instead of searching");
  s->add_option("--out", scan.out, "CSV output path");
  s->add_option("--threads", scan.threads, "worker threads (0 = all cores)");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "run the acceptance suite");
  v->add_option("--qdr-omega", verify.qdr_omega, "override omega in the Q-DR smoothing check");
  v->add_option("--transfer", verify.transfer, "velocity restriction: standard or swapped")
      ->check(CLI::IsMember({"standard", "swapped"}));
  v->add_option("--seed", verify.seed, "seed for random fields");
  v->add_option("--kmax", verify.kmax, "cycles per measurement");
  v->add_option("--out", verify.out, "CSV output path");

  SolveArgs solve;
  auto* so = app.add_subcommand("solve", "solve a manufactured problem and report convergence");
  so->add_option("--scheme", solve.scheme, scheme_help)->capture_default_str();
  so->add_option("--n", solve.n, "grid size (h = 1/n)")->capture_default_str();
  so->add_option("--cycle", solve.cycle, "two-grid, V or W")->capture_default_str();
  so->add_option("--nu", solve.nu, "sweeps per cycle")->capture_default_str();
  so->add_option("--omega", solve.omega);
  so->add_option("--alpha", solve.alpha);
  so->add_option("--sigma", solve.sigma);
  so->add_option("--omega-j", solve.omega_j);
  so->add_flag("--preset", solve.preset, "use the scheme's preset parameters (default)");
  so->add_option("--kmax", solve.kmax, "maximum cycles")->capture_default_str();
  so->add_option("--tol", solve.tol, "relative residual target")->capture_default_str();
  so->add_option("--seed", solve.seed, "seed for the initial guess")->capture_default_str();
  so->add_option("--out", solve.out, "CSV output path for the history");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (t->parsed()) return run_tables(tables);
    if (s->parsed()) return run_scan(scan);
    if (v->parsed()) return run_verify(verify);
    if (so->parsed()) return run_solve(solve);
  } catch (const ex::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
