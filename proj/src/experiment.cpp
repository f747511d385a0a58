#include "macmg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "macmg/lfa.hpp"

namespace macmg::experiment {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing comment introduced by whitespace followed by ';' or '#'.
std::string strip_comment(std::string_view s) {
  for (std::size_t k = 1; k < s.size(); ++k) {
    if ((s[k] == ';' || s[k] == '#') && (s[k - 1] == ' ' || s[k - 1] == '\t')) {
      return trim(s.substr(0, k));
    }
  }
  return trim(s);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

[[noreturn]] void bad(const std::string& where, const std::string& key, const std::string& what) {
  throw ConfigError("[" + where + "] " + key + ": " + what);
}

long long parse_int(const std::string& where, const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    bad(where, key, "'" + text + "' is not an integer");
  }
  if (used != text.size()) bad(where, key, "'" + text + "' is not an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& where, const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    bad(where, key, "'" + text + "' is not an unsigned 64-bit integer");
  }
  if (used != text.size()) bad(where, key, "'" + text + "' is not an unsigned 64-bit integer");
  return v;
}

double parse_double(const std::string& where, const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    bad(where, key, "'" + text + "' is not a number");
  }
  if (used != text.size()) bad(where, key, "'" + text + "' is not a number");
  return v;
}

// Accepts "32" or "1/32".
int parse_grid(const std::string& where, const std::string& text) {
  const std::string body = text.rfind("1/", 0) == 0 ? text.substr(2) : text;
  const long long n = parse_int(where, "grids", body);
  if (n < 8 || n > (1 << 14) || !is_power_of_two(static_cast<int>(n))) {
    bad(where, "grids", "'" + text + "' is not a power of two >= 8");
  }
  return static_cast<int>(n);
}

const std::set<std::string> kKeys = {"scheme", "params", "omega",  "alpha",      "sigma",
                                     "omega_j", "grids", "cycles", "nu",         "seed",
                                     "kmax",    "out",   "resolution"};

// Applies the keys of one ptree level on top of `c`.
void apply_keys(const pt::ptree& tree, const std::string& where, ExperimentConfig& c,
                bool& custom_params, std::optional<std::string>& params_mode) {
  for (const auto& [raw_key, node] : tree) {
    if (!node.empty()) continue;  // a section, handled by the caller
    const std::string key = trim(raw_key);
    const std::string value = strip_comment(node.data());
    if (!kKeys.count(key)) bad(where, key, "unknown key");
    if (key == "scheme") {
      const auto s = parse_scheme(value);
      if (!s) bad(where, key, "unknown scheme '" + value + "'");
      c.scheme = *s;
    } else if (key == "params") {
      if (value != "preset" && value != "custom") bad(where, key, "expected 'preset' or 'custom'");
      params_mode = value;
    } else if (key == "omega" || key == "alpha" || key == "sigma" || key == "omega_j") {
      custom_params = true;
      const double v = parse_double(where, key, value);
      if (key == "omega") c.params.omega = v;
      if (key == "alpha") c.params.alpha = v;
      if (key == "sigma") c.params.sigma = v;
      if (key == "omega_j") c.params.omega_j = v;
    } else if (key == "grids") {
      c.grid_sizes.clear();
      for (const auto& g : split_list(value)) c.grid_sizes.push_back(parse_grid(where, g));
    } else if (key == "cycles") {
      c.cycles.clear();
      for (const auto& k : split_list(value)) {
        const auto kind = parse_cycle_kind(k);
        if (!kind) bad(where, key, "unknown cycle '" + k + "'");
        c.cycles.push_back(*kind);
      }
    } else if (key == "nu") {
      c.nus.clear();
      for (const auto& v : split_list(value)) {
        c.nus.push_back(static_cast<int>(parse_int(where, key, v)));
      }
    } else if (key == "seed") {
      c.seed = parse_u64(where, key, value);
    } else if (key == "kmax") {
      c.k_max = static_cast<int>(parse_int(where, key, value));
    } else if (key == "out") {
      c.out = value;
    } else if (key == "resolution") {
      c.resolution = static_cast<int>(parse_int(where, key, value));
    }
  }
}

// Explicit parameter keys are overrides on top of the scheme's preset.
ExperimentConfig resolve(const pt::ptree* defaults, const pt::ptree& section,
                         const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  bool custom = false;
  std::optional<std::string> mode;
  // Scheme first, so parameter keys land on the right preset.
  ExperimentConfig probe;
  bool unused = false;
  std::optional<std::string> unused_mode;
  if (defaults) apply_keys(*defaults, name, probe, unused, unused_mode);
  apply_keys(section, name, probe, unused, unused_mode);
  c.scheme = probe.scheme;
  c.params = preset(c.scheme);
  if (defaults) apply_keys(*defaults, name, c, custom, mode);
  apply_keys(section, name, c, custom, mode);
  if (mode == "preset" && custom) {
    bad(name, "params", "'preset' cannot be combined with explicit omega/alpha/sigma/omega_j");
  }
  c.params_from_preset = !custom;
  return c;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const std::string& w = c.name;
  if (c.grid_sizes.empty()) bad(w, "grids", "empty grid-size list");
  if (c.cycles.empty()) bad(w, "cycles", "empty cycle list");
  if (c.nus.empty()) bad(w, "nu", "empty nu list");
  for (int n : c.grid_sizes) {
    if (n < 8 || !is_power_of_two(n)) bad(w, "grids", std::to_string(n) + " is not a power of two >= 8");
  }
  for (int nu : c.nus) {
    if (nu < 1 || nu > 64) bad(w, "nu", std::to_string(nu) + " is outside [1, 64]");
  }
  for (CycleKind k : c.cycles) {
    if (k != CycleKind::TwoGrid) continue;
    for (int n : c.grid_sizes) {
      if (n / 2 > kMaxDirectN) {
        bad(w, "grids", "two-grid needs a dense solve on n = " + std::to_string(n / 2) +
                            "; the limit is " + std::to_string(kMaxDirectN));
      }
    }
  }
  if (c.k_max < 1) bad(w, "kmax", "must be >= 1");
  if (c.resolution != 0 && (c.resolution < 16 || c.resolution % 4 != 0)) {
    bad(w, "resolution", "must be 0 or a multiple of 4 that is >= 16");
  }
  if (c.params_from_preset && !(c.params == preset(c.scheme))) {
    bad(w, "params", "preset does not match the built-in values");
  }
  try {
    macmg::validate(c.params);
  } catch (const std::invalid_argument& e) {
    bad(w, "params", e.what());
  }
}

std::vector<ExperimentConfig> parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::vector<ExperimentConfig> out;
  for (const auto& [name, node] : tree) {
    if (node.empty()) continue;
    out.push_back(resolve(&tree, node, trim(name)));
  }
  if (out.empty()) out.push_back(resolve(nullptr, tree, "default"));
  for (const auto& c : out) validate(c);
  return out;
}

std::vector<ExperimentConfig> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

namespace {

ExperimentConfig make(std::string name, RelaxScheme scheme, CycleKind kind, std::vector<int> grids) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.scheme = scheme;
  c.params = preset(scheme);
  c.grid_sizes = std::move(grids);
  c.cycles = {kind};
  c.nus = {1, 2, 3, 4};
  return c;
}

std::vector<ExperimentConfig> table_for(const std::string& name, RelaxScheme scheme, bool w_cycles) {
  std::vector<ExperimentConfig> out;
  out.push_back(make(name + ".two-grid", scheme, CycleKind::TwoGrid, {32, 64}));
  out.push_back(make(name + ".V", scheme, CycleKind::V, {128, 256}));
  if (w_cycles) out.push_back(make(name + ".W", scheme, CycleKind::W, {128, 256}));
  return out;
}

}  // namespace

std::vector<std::string> builtin_config_names() { return {"table1", "table2", "table3", "all"}; }

std::vector<ExperimentConfig> builtin_config(std::string_view name) {
  if (name == "table1") return table_for("table1", RelaxScheme::QDR, false);
  if (name == "table2") return table_for("table2", RelaxScheme::QIBSR, true);
  if (name == "table3") return table_for("table3", RelaxScheme::QSigmaUzawa, true);
  if (name == "all") {
    std::vector<ExperimentConfig> out;
    for (const char* t : {"table1", "table2", "table3"}) {
      auto part = builtin_config(t);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected table1, table2, table3 or all)");
}

void apply(const Overrides& o, std::vector<ExperimentConfig>& configs) {
  for (auto& c : configs) {
    if (o.seed) c.seed = *o.seed;
    if (o.k_max) c.k_max = *o.k_max;
    if (o.out) c.out = *o.out;
    if (o.resolution) c.resolution = *o.resolution;
    if (o.scheme) {
      c.scheme = *o.scheme;
      c.params = preset(c.scheme);
      c.params_from_preset = true;
    }
    validate(c);
  }
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t run_seed(std::uint64_t base, RelaxScheme scheme, CycleKind kind, int n, int nu) {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t field : {static_cast<std::uint64_t>(scheme), static_cast<std::uint64_t>(kind),
                              static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(nu)}) {
    state = out ^ field;
    out = splitmix64(state);
  }
  return out;
}

std::string_view tag(RunStatus status) {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Failed: return "failed";
  }
  return "?";
}

std::optional<double> ResultRow::deviation() const {
  if (!predicted || status != RunStatus::Ok) return std::nullopt;
  return std::abs(rho - *predicted);
}

bool TablesReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const ResultRow& r) { return r.status == RunStatus::Ok; });
}

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a small pool.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  const unsigned t = worker_count(threads, count);
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TablesReport run_tables(const std::vector<ExperimentConfig>& configs, unsigned threads) {
  TablesReport report;
  std::vector<std::optional<double>> mu(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    validate(configs[c]);
    if (configs[c].resolution > 0) {
      mu[c] = lfa::smoothing_factor(configs[c].scheme, configs[c].params, configs[c].resolution).mu;
    }
  }

  struct Job {
    std::size_t config;
    CycleKind kind;
    int n;
    int nu;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (CycleKind k : configs[c].cycles) {
      for (int n : configs[c].grid_sizes) {
        for (int nu : configs[c].nus) jobs.push_back({c, k, n, nu});
      }
    }
  }

  report.rows.resize(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    const ExperimentConfig& c = configs[job.config];
    ResultRow& row = report.rows[i];
    row.experiment = c.name;
    row.scheme = c.scheme;
    row.params = c.params;
    row.kind = job.kind;
    row.n = job.n;
    row.nu = job.nu;
    row.seed = run_seed(c.seed, c.scheme, job.kind, job.n, job.nu);
    if (mu[job.config]) row.predicted = std::pow(*mu[job.config], job.nu);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const CycleSpec spec = CycleSpec::split(job.nu, job.kind, c.scheme, c.params);
      MeasureOptions opts;
      opts.k_max = c.k_max;
      opts.seed = row.seed;
      const RhoMeasurement m = measure_rho(spec, GridSpec(job.n), opts);
      row.rho = m.rho;
      row.k_eff = m.k_eff;
      if (!(m.rho < 1.0)) {
        row.status = RunStatus::Diverged;
        row.message = "rho >= 1";
      }
    } catch (const DivergenceError& e) {
      row.status = RunStatus::Diverged;
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = RunStatus::Failed;
      row.message = e.what();
    }
    row.seconds = seconds_since(t0);
  });
  return report;
}

std::vector<ScanRow> run_lfa_scan(const std::vector<RelaxScheme>& schemes, int resolution,
                                  unsigned threads) {
  if (resolution < 16 || resolution % 4 != 0) {
    throw ConfigError("resolution: must be a multiple of 4 that is >= 16");
  }
  std::vector<ScanRow> rows(schemes.size());
  parallel_for(schemes.size(), threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    lfa::SearchSpec spec = lfa::default_search(schemes[i]);
    spec.report_resolution = resolution;
    const lfa::SearchResult r = lfa::optimize_params(schemes[i], spec);
    rows[i] = {schemes[i], r.params, r.mu, lfa::analytic_optimum(schemes[i]), r.evaluations,
               seconds_since(t0)};
  });
  return rows;
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("Table: row width mismatch");
  rows_.push_back(std::move(row));
}

namespace {

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

}  // namespace

void Table::print(std::ostream& os) const {
  std::vector<std::size_t> width(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells, bool is_header) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) os << "  ";
      const bool right = !is_header && looks_numeric(cells[c]);
      os << (right ? std::right : std::left) << std::setw(static_cast<int>(width[c])) << cells[c];
    }
    os << std::left << '\n';
  };
  line(header_, true);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& r : rows_) line(r, false);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Table::write_csv(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) os << ',';
      os << csv_field(cells[c]);
    }
    os << "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

Table results_table(const std::vector<ResultRow>& rows, bool include_timing) {
  std::vector<std::string> header = {"experiment", "scheme", "omega", "alpha", "sigma", "omega_j",
                                     "cycle", "h", "nu", "rho", "k_eff", "mu^nu", "|rho-mu^nu|"};
  if (include_timing) header.push_back("seconds");
  for (const char* h : {"seed", "status", "message"}) header.emplace_back(h);
  Table t(header);
  for (const auto& r : rows) {
    const bool ok = r.status == RunStatus::Ok;
    std::vector<std::string> cells = {
        r.experiment,
        std::string(tag(r.scheme)),
        format_fixed(r.params.omega, 4),
        format_fixed(r.params.alpha, 4),
        format_fixed(r.params.sigma, 4),
        format_fixed(r.params.omega_j, 4),
        std::string(tag(r.kind)),
        "1/" + std::to_string(r.n),
        std::to_string(r.nu),
        ok ? format_fixed(r.rho, 4) : "",
        ok ? std::to_string(r.k_eff) : "",
        r.predicted ? format_fixed(*r.predicted, 4) : "",
        r.deviation() ? format_fixed(*r.deviation(), 4) : ""};
    if (include_timing) cells.push_back(format_fixed(r.seconds, 3));
    cells.push_back(std::to_string(r.seed));
    cells.emplace_back(tag(r.status));
    cells.push_back(r.message);
    t.add_row(std::move(cells));
  }
  return t;
}

Table scan_table(const std::vector<ScanRow>& rows) {
  Table t({"scheme", "omega", "alpha", "sigma", "omega_j", "mu", "expected", "|mu-expected|",
           "evaluations", "seconds"});
  for (const auto& r : rows) {
    auto used = [&](bool u, double v) { return u ? format_fixed(v, 4) : std::string("-"); };
    t.add_row({std::string(tag(r.scheme)), format_fixed(r.params.omega, 4),
               format_fixed(r.params.alpha, 4), used(uses_sigma(r.scheme), r.params.sigma),
               used(uses_omega_j(r.scheme), r.params.omega_j), format_fixed(r.mu, 5),
               format_fixed(r.expected, 5), format_fixed(std::abs(r.mu - r.expected), 5),
               std::to_string(r.evaluations), format_fixed(r.seconds, 3)});
  }
  return t;
}

void write_csv_file(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  table.write_csv(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace macmg::experiment
