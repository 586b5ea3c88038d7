#pragma once

#include "bcsynth/bnb.hpp"

namespace bcsynth {

struct SynthesisOptions {
  std::string backend = "native";
  std::uint64_t seed = 20210415;
  double timeout_sec = 120.0;
  std::optional<unsigned> lie_order;
  std::optional<int> max_iter;
  std::optional<double> eta;
  std::optional<Encoding> encoding;
  ValidateOptions validate;
};

struct PhaseTimes {
  double encode_sec = 0.0;
  double solve_sec = 0.0;
  double validate_sec = 0.0;
};

struct SynthesisResult {
  bool found = false;
  Certificate certificate;
  ValidationReport report;
  int iterations = -1;
  SearchStats stats;
  IterateTrace trace;
  PhaseTimes times;
  std::string failure_reason;
  std::optional<Certificate> best_invalid;
};

// Full pipeline: encode -> assemble -> DCP inside branch-and-bound ->
// posterior validation.
SynthesisResult synthesize(ProblemSpec spec, const SynthesisOptions& opts);

// Validation-only entry (the `check` subcommand).
ValidationReport check_certificate(const ProblemSpec& spec, const std::string& expr,
                                   unsigned lie_order, const ValidateOptions& opts,
                                   Certificate* out_cert = nullptr);

// certificate.json / report payloads.
std::string certificate_to_json(const SynthesisResult& result, const ProblemSpec& spec);
std::string report_to_json(const ValidationReport& report);

// Writes certificate.json, trace.jsonl and optional SMT-LIB / trajectory
// artifacts under out_dir (created if needed).
void write_artifacts(const std::string& out_dir, const ProblemSpec& spec,
                     const SynthesisResult& result, bool emit_smt, bool emit_traj,
                     std::uint64_t seed);

}  // namespace bcsynth
