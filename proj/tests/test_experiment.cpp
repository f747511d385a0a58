#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "macmg/experiment.hpp"
#include "macmg/lfa.hpp"

using namespace macmg;
using namespace macmg::experiment;

namespace {

std::vector<ExperimentConfig> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig small(RelaxScheme scheme, std::vector<CycleKind> cycles, std::vector<int> grids,
                       std::vector<int> nus) {
  ExperimentConfig c;
  c.name = "small";
  c.scheme = scheme;
  c.params = preset(scheme);
  c.cycles = std::move(cycles);
  c.grid_sizes = std::move(grids);
  c.nus = std::move(nus);
  c.k_max = 40;
  c.resolution = 0;
  return c;
}

}  // namespace

TEST_CASE("config: a document without sections is one experiment") {
  const auto cs = parse(
      "scheme = qibsr\n"
      "grids = 1/32, 64\n"
      "cycles = two-grid, W\n"
      "nu = 1, 3\n"
      "seed = 7\n"
      "kmax = 50\n"
      "resolution = 0\n");
  REQUIRE(cs.size() == 1);
  const ExperimentConfig& c = cs[0];
  CHECK(c.name == "default");
  CHECK(c.scheme == RelaxScheme::QIBSR);
  CHECK(c.params == preset(RelaxScheme::QIBSR));
  CHECK(c.params_from_preset);
  CHECK(c.grid_sizes == std::vector<int>{32, 64});
  CHECK(c.cycles == std::vector<CycleKind>{CycleKind::TwoGrid, CycleKind::W});
  CHECK(c.nus == std::vector<int>{1, 3});
  CHECK(c.seed == 7);
  CHECK(c.k_max == 50);
  CHECK(c.resolution == 0);
}

TEST_CASE("config: top-level keys are defaults for every section") {
  const auto cs = parse(
      "seed = 3\n"
      "nu = 2\n"
      "[a]\n"
      "scheme = qdr\n"
      "grids = 16\n"
      "cycles = V\n"
      "[b]\n"
      "scheme = quzawa\n"
      "params = custom\n"
      "omega = 1.1\n"
      "grids = 32\n"
      "cycles = W\n"
      "seed = 9\n");
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].name == "a");
  CHECK(cs[0].seed == 3);
  CHECK(cs[0].nus == std::vector<int>{2});
  CHECK(cs[1].name == "b");
  CHECK(cs[1].seed == 9);
  CHECK(cs[1].scheme == RelaxScheme::QSigmaUzawa);
  CHECK_FALSE(cs[1].params_from_preset);
  CHECK(cs[1].params.omega == 1.1);
  // Keys not given keep the scheme's preset values.
  CHECK(cs[1].params.sigma == preset(RelaxScheme::QSigmaUzawa).sigma);
}

TEST_CASE("config: inline comments") {
  const auto cs = parse(
      "scheme = qdr   ; smoother\n"
      "params = preset ; built-in values\n"
      "grids = 1/32, 64 # two sizes\n"
      "cycles = V\n"
      "nu = 1\n");
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].grid_sizes == std::vector<int>{32, 64});
  CHECK(cs[0].params_from_preset);
}

TEST_CASE("config errors") {
  const std::string base = "scheme = qdr\ncycles = V\nnu = 1\n";
  CHECK_THROWS_AS(parse(base + "grids =\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 12\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 32\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 32\nkmax = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 32\nresolution = 18\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 32\nparams = preset\nomega = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 32\nparams = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse(base + "grids = 32\nomega = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("scheme = sor\ngrids = 32\ncycles = V\nnu = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("scheme = qdr\ngrids = 32\ncycles = F\nnu = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("scheme = qdr\ngrids = 32\ncycles = V\nnu = 0\n"), ConfigError);
  // Two-grid needs a dense solve on n/2, which is capped.
  CHECK_THROWS_AS(parse("scheme = qdr\ngrids = 128\ncycles = two-grid\nnu = 1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/macmg.ini"), ConfigError);
}

TEST_CASE("config errors name the offending field") {
  try {
    parse("[run]\nscheme = qdr\ncycles = V\nnu = 1\ngrids =\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("run") != std::string::npos);
    CHECK(what.find("grids") != std::string::npos);
  }
}

TEST_CASE("load_config reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "macmg_test_config.ini";
  {
    std::ofstream f(path);
    f << "[x]\nscheme = qdr\ngrids = 16\ncycles = two-grid\nnu = 1, 2\n";
  }
  const auto cs = load_config(path.string());
  std::filesystem::remove(path);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].nus == std::vector<int>{1, 2});
}

TEST_CASE("built-in table configs") {
  const auto t1 = builtin_config("table1");
  REQUIRE(t1.size() == 2);
  CHECK(t1[0].scheme == RelaxScheme::QDR);
  CHECK(t1[0].cycles == std::vector<CycleKind>{CycleKind::TwoGrid});
  CHECK(t1[0].grid_sizes == std::vector<int>{32, 64});
  CHECK(t1[1].grid_sizes == std::vector<int>{128, 256});
  CHECK(t1[0].nus == std::vector<int>{1, 2, 3, 4});
  CHECK(builtin_config("table2").size() == 3);
  CHECK(builtin_config("table3")[0].scheme == RelaxScheme::QSigmaUzawa);
  CHECK(builtin_config("all").size() == 8);
  for (const auto& c : builtin_config("all")) CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(builtin_config("table4"), ConfigError);
}

TEST_CASE("overrides") {
  auto cs = builtin_config("table1");
  Overrides o;
  o.seed = 99;
  o.k_max = 10;
  o.out = "x.csv";
  o.scheme = RelaxScheme::QIBSR;
  experiment::apply(o, cs);
  for (const auto& c : cs) {
    CHECK(c.seed == 99);
    CHECK(c.k_max == 10);
    CHECK(c.out == "x.csv");
    CHECK(c.scheme == RelaxScheme::QIBSR);
    CHECK(c.params == preset(RelaxScheme::QIBSR));
  }
  Overrides bad;
  bad.resolution = 10;
  CHECK_THROWS_AS(experiment::apply(bad, cs), ConfigError);
}

TEST_CASE("splitmix64 reference values") {
  std::uint64_t state = 0;
  CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
  CHECK(state == 2 * 0x9e3779b97f4a7c15ULL);
}

TEST_CASE("run seeds depend on the run identity only") {
  std::set<std::uint64_t> seen;
  for (RelaxScheme s : {RelaxScheme::QDR, RelaxScheme::QIBSR}) {
    for (CycleKind k : {CycleKind::TwoGrid, CycleKind::V, CycleKind::W}) {
      for (int n : {32, 64}) {
        for (int nu = 1; nu <= 4; ++nu) {
          const std::uint64_t a = run_seed(1, s, k, n, nu);
          CHECK(a == run_seed(1, s, k, n, nu));
          CHECK(a != run_seed(2, s, k, n, nu));
          seen.insert(a);
        }
      }
    }
  }
  CHECK(seen.size() == 2 * 3 * 2 * 4);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("") == "");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(csv_field("cr\r") == "\"cr\r\"");

  Table t({"name", "note"});
  t.add_row({"x", "a,b"});
  std::ostringstream os;
  t.write_csv(os);
  CHECK(os.str() == "name,note\r\nx,\"a,b\"\r\n");
}

TEST_CASE("console tables are aligned") {
  Table t({"name", "value"});
  t.add_row({"a", "1.5"});
  t.add_row({"long-name", "10.25"});
  std::ostringstream os;
  t.print(os);
  CHECK(os.str() ==
        "name       value\n"
        "----------------\n"
        "a            1.5\n"
        "long-name  10.25\n");
}

TEST_CASE("format_fixed") {
  CHECK(format_fixed(0.32759, 3) == "0.328");
  CHECK(format_fixed(1.0, 4) == "1.0000");
}

TEST_CASE("run_tables reproduces the Q-DR two-grid rate") {
  ExperimentConfig c = small(RelaxScheme::QDR, {CycleKind::TwoGrid}, {32}, {1});
  c.k_max = 100;
  c.resolution = 64;
  const TablesReport report = run_tables(std::vector<ExperimentConfig>{c}, 1);
  REQUIRE(report.rows.size() == 1);
  const ResultRow& r = report.rows[0];
  CHECK(r.status == RunStatus::Ok);
  CHECK(r.rho >= 0.308);
  CHECK(r.rho <= 0.348);
  CHECK(r.k_eff == 100);
  REQUIRE(r.predicted);
  CHECK(*r.predicted == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  REQUIRE(r.deviation());
  CHECK(*r.deviation() < 0.02);
  CHECK(report.all_ok());
}

TEST_CASE("run_tables reproduces the Uzawa W-cycle rate") {
  ExperimentConfig c = small(RelaxScheme::QSigmaUzawa, {CycleKind::W}, {128}, {2});
  c.k_max = 100;
  const TablesReport report = run_tables(std::vector<ExperimentConfig>{c}, 1);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].rho >= 0.291);
  CHECK(report.rows[0].rho <= 0.351);
}

TEST_CASE("run_tables is deterministic and ordered") {
  const std::vector<ExperimentConfig> cs = {
      small(RelaxScheme::QDR, {CycleKind::TwoGrid, CycleKind::V}, {16, 32}, {1, 2}),
      small(RelaxScheme::QIBSR, {CycleKind::W}, {16}, {1, 3})};
  const TablesReport one = run_tables(cs, 1);
  const TablesReport two = run_tables(cs, 2);
  const TablesReport again = run_tables(cs, 2);
  REQUIRE(one.rows.size() == 10);
  REQUIRE(two.rows.size() == one.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CAPTURE(i);
    CHECK(one.rows[i].rho == two.rows[i].rho);
    CHECK(two.rows[i].rho == again.rows[i].rho);
    CHECK(one.rows[i].seed == two.rows[i].seed);
    CHECK(one.rows[i].n == two.rows[i].n);
    CHECK(one.rows[i].nu == two.rows[i].nu);
    CHECK(one.rows[i].kind == two.rows[i].kind);
  }
  // Enumeration order: cycle, then grid, then nu.
  CHECK(one.rows[0].kind == CycleKind::TwoGrid);
  CHECK(one.rows[0].n == 16);
  CHECK(one.rows[1].nu == 2);
  CHECK(one.rows[2].n == 32);
  CHECK(one.rows[4].kind == CycleKind::V);
  CHECK(one.rows[8].scheme == RelaxScheme::QIBSR);
}

TEST_CASE("divergent runs are flagged, not fatal") {
  ExperimentConfig c = small(RelaxScheme::QSigmaUzawa, {CycleKind::TwoGrid}, {16}, {1});
  c.params = uzawa_caption_preset();
  c.params_from_preset = false;
  ExperimentConfig ok = small(RelaxScheme::QDR, {CycleKind::TwoGrid}, {16}, {1});
  const TablesReport report = run_tables(std::vector<ExperimentConfig>{c, ok}, 1);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].status == RunStatus::Diverged);
  CHECK_FALSE(report.rows[0].message.empty());
  CHECK(report.rows[1].status == RunStatus::Ok);
  CHECK_FALSE(report.all_ok());

  const Table t = results_table(report.rows, false);
  REQUIRE(t.rows().size() == 2);
  const auto& header = t.header();
  const auto status = std::find(header.begin(), header.end(), "status") - header.begin();
  CHECK(t.rows()[0][status] == tag(RunStatus::Diverged));
  CHECK(std::find(header.begin(), header.end(), "seconds") == header.end());
}

TEST_CASE("lfa scan finds the optimal smoothing factors") {
  const auto rows = run_lfa_scan(
      {RelaxScheme::QDR, RelaxScheme::QSigmaUzawa, RelaxScheme::DiagSigmaUzawaBaseline}, 64, 1);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].scheme == RelaxScheme::QDR);
  CHECK(rows[0].mu == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  CHECK(rows[1].mu == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-3));
  CHECK(rows[2].mu == doctest::Approx(std::sqrt(0.6)).epsilon(1e-3));
  for (const auto& r : rows) {
    CHECK(std::abs(r.mu - r.expected) < 5e-3);
    CHECK(r.evaluations > 0);
  }
  const Table t = scan_table(rows);
  CHECK(t.rows().size() == 3);
  CHECK(t.rows()[0][3] == "-");  // Q-DR has no sigma
}

TEST_CASE("write_csv_file") {
  const auto path = std::filesystem::temp_directory_path() / "macmg_test_table.csv";
  Table t({"a"});
  t.add_row({"1"});
  write_csv_file(path.string(), t);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a\r\n1\r\n");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_csv_file("/nonexistent/dir/x.csv", t), std::runtime_error);
}
