#pragma once

#include "bcsynth/pipeline.hpp"

namespace bcsynth {

struct BenchRow {
  std::string name;
  int n_sys = 0;
  int d_flow = 0;
  int d_bc = 0;
  int iterations = -1;
  double time_sec = 0.0;  // solve phase only, encode excluded
  bool verified = false;
  std::string certificate;
  std::string status;  // "ok", "not-found", "error: ..."
  PhaseTimes times;
};

struct BenchReport {
  std::uint64_t seed = 0;
  std::vector<BenchRow> rows;

  std::string table() const;
  std::string to_json() const;
};

// Runs every problem file, one row per example; failures are recorded and the
// harness continues. jobs > 1 runs examples in parallel.
BenchReport run_bench(const std::vector<std::string>& files, const SynthesisOptions& base,
                      int jobs);

std::vector<std::string> problem_files_in(const std::string& directory);

}  // namespace bcsynth
