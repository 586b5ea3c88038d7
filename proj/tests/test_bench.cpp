#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "bcsynth/bench.hpp"

using namespace bcsynth;

#ifndef BENCH_DIR
#define BENCH_DIR "benchmarks"
#endif
#ifndef FIXTURE_DIR
#define FIXTURE_DIR "tests/fixtures"
#endif

namespace {

SynthesisOptions fast_opts() {
  SynthesisOptions o;
  o.seed = 7;
  o.timeout_sec = 60;
  o.validate.n_samples = 20000;
  return o;
}

nlohmann::json scrub_times(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  for (auto& row : j["rows"]) {
    row["time_sec"] = 0;
    row["encode_sec"] = 0;
    row["validate_sec"] = 0;
  }
  return j;
}

}  // namespace

TEST_CASE("problem_files_in lists the bundled corpus") {
  auto files = problem_files_in(BENCH_DIR);
  CHECK(files.size() == 24);
  CHECK(problem_files_in("/nonexistent-dir").empty());
}

TEST_CASE("empty input produces an empty report") {
  BenchReport report = run_bench({}, fast_opts(), 1);
  CHECK(report.rows.empty());
  auto j = nlohmann::json::parse(report.to_json());
  CHECK(j["rows"].is_array());
  CHECK(j["rows"].empty());
}

TEST_CASE("bench rows carry the Table-1 style schema and are deterministic") {
  std::vector<std::string> files{std::string(FIXTURE_DIR) + "/interval.json"};
  BenchReport a = run_bench(files, fast_opts(), 1);
  REQUIRE(a.rows.size() == 1);
  const auto& row = a.rows[0];
  CHECK(row.name == "interval");
  CHECK(row.n_sys == 1);
  CHECK(row.d_flow == 1);
  CHECK(row.d_bc == 1);
  CHECK(row.verified);
  CHECK(row.iterations >= 0);

  // Schema-stable JSON with all Table-1 columns.
  auto j = nlohmann::json::parse(a.to_json());
  const auto& r = j["rows"][0];
  for (const char* key : {"name", "n_sys", "d_flow", "d_bc", "iterations", "time_sec",
                          "verified", "certificate", "status"})
    CHECK(r.contains(key));

  // Same seed, single worker: identical report modulo timing fields.
  BenchReport b = run_bench(files, fast_opts(), 1);
  CHECK(scrub_times(a.to_json()) == scrub_times(b.to_json()));

  // Table text renders one line per row plus the header.
  std::string table = a.table();
  CHECK(table.find("interval") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 2);
}

TEST_CASE("errors are recorded and the harness continues") {
  std::vector<std::string> files{"/nonexistent/p.json",
                                 std::string(FIXTURE_DIR) + "/overlap.json"};
  SynthesisOptions opts = fast_opts();
  opts.timeout_sec = 20;
  BenchReport report = run_bench(files, opts, 1);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].status.find("error") == 0);
  CHECK(!report.rows[1].verified);  // overlapping sets: no certificate exists
  CHECK(report.rows[1].status.find("not-found") == 0);
}
