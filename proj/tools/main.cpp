#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bcsynth/bench.hpp"
#include "bcsynth/log.hpp"
#include "bcsynth/parse.hpp"
#include "bcsynth/pipeline.hpp"

using namespace bcsynth;

namespace {

void diagnostic(const std::string& kind, const std::string& message) {
  std::cerr << "{\"error\":\"" << kind << "\",\"message\":\"" << message << "\"}\n";
}

struct CommonFlags {
  std::string backend = "native";
  std::uint64_t seed = 20210415;
  double timeout = 120.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--backend", backend, "conic backend (native)");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--timeout-secs", timeout, "per-problem time budget");
  }
};

std::string out_dir_for(const std::string& problem_file, const std::string& base) {
  return base + "/" + std::filesystem::path(problem_file).stem().string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant barrier-certificate synthesis for polynomial ODE systems"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "synthesize and validate a certificate");
  std::string synth_file, synth_out = "out", synth_encoding;
  CommonFlags synth_flags;
  bool emit_smt = false, emit_traj = false;
  unsigned lie_order_flag = 0;
  int max_iter_flag = -1;
  double eta_flag = 0.0;
  synth->add_option("problem", synth_file, "problem JSON file")->required();
  synth_flags.attach(synth);
  synth->add_flag("--emit-smt", emit_smt, "write one SMT-LIB script per condition");
  synth->add_flag("--emit-traj", emit_traj, "write sampled RK4 trajectories as CSV");
  synth->add_option("--encoding", synth_encoding, "sufficient|necessary");
  synth->add_option("--lie-order", lie_order_flag, "override lie_order");
  synth->add_option("--max-iter", max_iter_flag, "override dcp.max_iter");
  synth->add_option("--eta", eta_flag, "override bnb.eta");
  synth->add_option("--out", synth_out, "artifact directory root (default ./out)");

  // --- check ---------------------------------------------------------------
  auto* check = app.add_subcommand("check", "validate a given certificate expression");
  std::string check_file, check_expr;
  unsigned check_order = 0;
  CommonFlags check_flags;
  check->add_option("problem", check_file, "problem JSON file")->required();
  check->add_option("--certificate", check_expr, "candidate B(x) expression")->required();
  check->add_option("--lie-order", check_order, "consecution order (default: problem's)");
  check_flags.attach(check);

  // --- bench ---------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run a directory of problems, report a table");
  std::string bench_dir;
  int jobs = 1;
  std::string bench_json = "out/bench_report.json";
  CommonFlags bench_flags;
  bench->add_option("directory", bench_dir, "directory of problem JSON files")->required();
  bench_flags.attach(bench);
  bench->add_option("--jobs", jobs, "examples run in parallel");
  bench->add_option("--report", bench_json, "report JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      ProblemSpec spec = load_problem(synth_file);
      SynthesisOptions opts;
      opts.backend = synth_flags.backend;
      opts.seed = synth_flags.seed;
      opts.timeout_sec = synth_flags.timeout;
      if (lie_order_flag > 0) opts.lie_order = lie_order_flag;
      if (max_iter_flag > 0) opts.max_iter = max_iter_flag;
      if (eta_flag > 0) opts.eta = eta_flag;
      if (!synth_encoding.empty()) {
        if (synth_encoding == "sufficient")
          opts.encoding = Encoding::Sufficient;
        else if (synth_encoding == "necessary")
          opts.encoding = Encoding::Necessary;
        else
          throw ProblemError("--encoding expects sufficient|necessary");
      }

      SynthesisResult result = synthesize(spec, opts);
      write_artifacts(out_dir_for(synth_file, synth_out), spec, result, emit_smt, emit_traj,
                      opts.seed);
      if (result.found) {
        std::cout << "certificate: B(x) = " << result.certificate.B.str() << "\n"
                  << "iterations: " << result.iterations << "\n"
                  << "validation: " << result.report.summary() << "\n";
        return 0;
      }
      std::cout << "no validated certificate (" << result.failure_reason << ")\n";
      if (result.best_invalid)
        std::cout << "best invalid candidate: " << result.best_invalid->B.str() << "\n";
      return 2;
    }

    if (check->parsed()) {
      ProblemSpec spec = load_problem(check_file);
      ValidateOptions vopts;
      vopts.seed = check_flags.seed;
      unsigned order = check_order > 0 ? check_order : spec.lie_order;
      ValidationReport report;
      try {
        report = check_certificate(spec, check_expr, order, vopts);
      } catch (const ParseError& e) {
        diagnostic("parse", e.what());
        return 1;
      }
      std::cout << report.summary() << "\n";
      return report.pass ? 0 : 2;
    }

    if (bench->parsed()) {
      auto files = problem_files_in(bench_dir);
      SynthesisOptions opts;
      opts.backend = bench_flags.backend;
      opts.seed = bench_flags.seed;
      opts.timeout_sec = bench_flags.timeout;
      BenchReport report = run_bench(files, opts, jobs);
      std::cout << report.table();
      if (!bench_json.empty()) {
        std::filesystem::create_directories(
            std::filesystem::path(bench_json).parent_path());
        std::ofstream out(bench_json);
        out << report.to_json();
        std::cout << "report written to " << bench_json << "\n";
      }
      return 0;
    }
  } catch (const ProblemError& e) {
    diagnostic("problem", e.what());
    return 1;
  } catch (const std::exception& e) {
    diagnostic("internal", e.what());
    return 1;
  }
  return 1;
}
