#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "onebit/bench.hpp"
#include "onebit/cli.hpp"

using namespace onebit;
using bench::TrialRow;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"onebit_bench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return bench::cli_run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<TrialRow> read_rows(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::string line;
  REQUIRE(std::getline(is, line));
  REQUIRE(line == bench::csv_header());
  std::vector<TrialRow> rows;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(bench::parse_csv_row(line));
  return rows;
}

}  // namespace

TEST_CASE("csv rows round-trip exactly") {
  TrialRow r;
  r.scheme = "foreach";
  r.n = 6561;
  r.k = 3;
  r.delta = 0.1 + 0.2;  // not exactly representable, must survive the trip
  r.seed = 18446744073709551557ULL;
  r.measurements = 9624;
  r.stage1_size = 5;
  r.squared_error = 3.141592653589793e-7;
  r.success = 1;
  r.build_ms = 0.125;
  r.encode_ms = 17.0 / 3.0;
  r.decode_ms = 1e-17;
  auto back = bench::parse_csv_row(bench::to_csv(r));
  CHECK(back.scheme == r.scheme);
  CHECK(back.n == r.n);
  CHECK(back.k == r.k);
  CHECK(back.delta == r.delta);
  CHECK(back.seed == r.seed);
  CHECK(back.measurements == r.measurements);
  CHECK(back.stage1_size == r.stage1_size);
  CHECK(back.squared_error == r.squared_error);
  CHECK(back.success == r.success);
  CHECK(back.build_ms == r.build_ms);
  CHECK(back.encode_ms == r.encode_ms);
  CHECK(back.decode_ms == r.decode_ms);

  CHECK_THROWS(bench::parse_csv_row("too,few,fields"));
}

TEST_CASE("run_trials is deterministic, also across worker counts") {
  schemes::SchemeConfig cfg;
  cfg.scheme = schemes::SchemeId::support;
  cfg.n = 27;
  cfg.k = 2;
  cfg.seed = 5;
  auto a = bench::run_trials(cfg, {bench::SignalKind::random_sparse, ""}, 8, nullptr, 1);
  auto b = bench::run_trials(cfg, {bench::SignalKind::random_sparse, ""}, 8, nullptr, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == b[i].seed);
    CHECK(a[i].squared_error == b[i].squared_error);
    CHECK(a[i].success == b[i].success);
    CHECK(a[i].stage1_size == b[i].stage1_size);
    CHECK(a[i].measurements == b[i].measurements);
  }
}

TEST_CASE("cli: single-trial l2l2 smoke run succeeds") {
  int rc = run_cli({"--scheme", "l2l2", "--n", "16", "--k", "1", "--delta", "1.0",
                    "--trials", "1", "--signal", "onehot", "--out", "smoke_l2l2.csv"});
  CHECK(rc == 0);
  auto rows = read_rows("smoke_l2l2.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].success == 1);
  CHECK(rows[0].scheme == "l2l2");
  CHECK(rows[0].n == 16);
}

TEST_CASE("cli: exhaustive support sweep covers every pair and succeeds") {
  int rc = run_cli({"--scheme", "support", "--n", "27", "--k", "2", "--trials", "0",
                    "--exhaustive", "--out", "sweep_support.csv"});
  CHECK(rc == 0);
  auto rows = read_rows("sweep_support.csv");
  REQUIRE(rows.size() == 27 * 26 / 2);
  for (const auto& r : rows) {
    CHECK(r.success == 1);
    CHECK(r.stage1_size == 2);
  }
}

TEST_CASE("cli: invalid configurations exit with code 2") {
  CHECK(run_cli({"--n", "16", "--k", "1"}) == 2);                         // no scheme
  CHECK(run_cli({"--scheme", "bogus", "--n", "16", "--k", "1"}) == 2);    // bad scheme
  CHECK(run_cli({"--scheme", "l2l2", "--n", "16", "--k", "1", "--delta", "0"}) == 2);
  CHECK(run_cli({"--scheme", "l2l2", "--n", "16", "--k", "20"}) == 2);    // k > n
  CHECK(run_cli({"--scheme", "l2l2", "--n", "16", "--k", "1", "--exhaustive"}) == 2);
  CHECK(run_cli({"--scheme", "forall", "--n", "4096", "--k", "3", "--exhaustive"}) == 2);
  CHECK(run_cli({"--scheme", "l2l2", "--n", "16", "--k", "1", "--constants",
                 "nope=3"}) == 2);
  CHECK(run_cli({"--scheme", "support", "--n", "27", "--k", "2", "--signal",
                 "file:/does/not/exist", "--out", "x.csv"}) == 2);
}

TEST_CASE("cli: identical seed and flags give byte-identical csv without timings") {
  std::vector<std::string> args{"--scheme", "support", "--n",     "27",
                                "--k",      "2",       "--trials", "6",
                                "--seed",   "42",      "--no-timings"};
  auto a1 = args;
  a1.push_back("--out");
  a1.push_back("det_a.csv");
  auto a2 = args;
  a2.push_back("--out");
  a2.push_back("det_b.csv");
  REQUIRE(run_cli(a1) == 0);
  REQUIRE(run_cli(a2) == 0);
  CHECK(slurp("det_a.csv") == slurp("det_b.csv"));

  // with timings enabled the science columns still agree
  auto t1 = args;
  t1.pop_back();
  t1.push_back("--out");
  t1.push_back("det_c.csv");
  auto t2 = args;
  t2.pop_back();
  t2.push_back("--out");
  t2.push_back("det_d.csv");
  REQUIRE(run_cli(t1) == 0);
  REQUIRE(run_cli(t2) == 0);
  auto rc = read_rows("det_c.csv");
  auto rd = read_rows("det_d.csv");
  REQUIRE(rc.size() == rd.size());
  for (std::size_t i = 0; i < rc.size(); ++i) {
    CHECK(rc[i].seed == rd[i].seed);
    CHECK(rc[i].squared_error == rd[i].squared_error);
    CHECK(rc[i].success == rd[i].success);
  }
}

TEST_CASE("cli: constants overrides reach the scheme config") {
  int rc = run_cli({"--scheme", "foreach", "--n", "81", "--k", "3", "--delta", "0.5",
                    "--trials", "1", "--constants", "c_g=16", "d_rule=proof",
                    "--out", "const_a.csv"});
  REQUIRE(rc == 0);
  auto rows = read_rows("const_a.csv");
  // r' = ceil(16 * 3 / 0.25) = 192 instead of the default 768
  CHECK(rows[0].measurements == 2 * 3 * 12 * 34 + 192);
}

TEST_CASE("cli: dump and load of the measurement matrix") {
  int rc = run_cli({"--scheme", "support", "--n", "27", "--k", "2", "--trials", "1",
                    "--dump-matrix", "dumped.mat", "--out", "dump_run.csv"});
  REQUIRE(rc == 0);
  auto loaded = load_matrix_file("dumped.mat");
  REQUIRE(loaded.kind == LoadedMatrix::Kind::real);
  CHECK(loaded.real.cols == 27);
  CHECK(loaded.real.rows == 2 * 25 * 2);  // +-(B tensor V) with q=5

  CHECK(run_cli({"--load-matrix", "dumped.mat"}) == 0);
  CHECK(run_cli({"--load-matrix", "missing.mat"}) == 2);

  // a dump that would not fit in memory is rejected
  CHECK(run_cli({"--scheme", "l2l2", "--n", "4096", "--k", "4", "--trials", "0",
                 "--dump-matrix", "huge.mat", "--out", "huge.csv"}) == 2);
}

TEST_CASE("cli: verify flags on a loaded binary matrix") {
  auto ks = gt::build_kautz_singleton(14, 2);
  write_matrix_file("ks14.mat", ks);
  CHECK(run_cli({"--load-matrix", "ks14.mat", "--verify-disjunct", "2"}) == 0);
  CHECK(run_cli({"--load-matrix", "ks14.mat", "--verify-list-disjunct", "2", "2"}) == 0);
}

TEST_CASE("scaling report fits exponents on a toy ladder") {
  schemes::SchemeConfig cfg;
  cfg.scheme = schemes::SchemeId::noiseless_foreach;
  cfg.k = 2;
  cfg.delta = 0.5;
  auto rep = bench::scaling_report(cfg, {16, 256}, 3, 11);
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.points[0].n == 16);
  CHECK(rep.points[1].n == 256);
  CHECK(rep.points[0].measurements > 0);
  CHECK_THROWS_AS(bench::scaling_report(cfg, {256, 16}, 3, 11), std::invalid_argument);
  CHECK_THROWS_AS(bench::scaling_report(cfg, {}, 3, 11), std::invalid_argument);
}

TEST_CASE("exhaustive forall sweep asserts the for-all guarantee at tiny scale") {
  schemes::SchemeConfig cfg;
  cfg.scheme = schemes::SchemeId::noiseless_forall;
  cfg.n = 16;
  cfg.k = 2;
  cfg.delta = 0.5;
  cfg.seed = 3;
  auto rows = bench::run_exhaustive(cfg);
  CHECK(rows.size() == (16 * 15 / 2) * 4);  // supports times sign patterns
  int successes = 0;
  for (auto& r : rows) successes += r.success;
  CHECK(successes > static_cast<int>(0.9 * rows.size()));
}
