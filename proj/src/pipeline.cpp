#include "bcsynth/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "bcsynth/log.hpp"
#include "bcsynth/parse.hpp"

namespace bcsynth {

using nlohmann::json;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace

SynthesisResult synthesize(ProblemSpec spec, const SynthesisOptions& opts) {
  if (opts.lie_order) spec.lie_order = *opts.lie_order;
  if (opts.max_iter) spec.dcp.max_iter = *opts.max_iter;
  if (opts.eta) spec.bnb.eta = *opts.eta;
  if (opts.encoding) spec.encoding = *opts.encoding;

  SynthesisResult result;
  Deadline deadline = Deadline::in(opts.timeout_sec);

  Stopwatch encode_watch;
  ConstraintSystem system = build_constraints(spec);
  BmiProblem bmi = assemble_bmi(std::move(system), spec.l_a, spec.l_s);
  std::vector<DcSplit> splits = dc_splits_of(bmi);
  result.times.encode_sec = encode_watch.sec();
  LOGI("%s: encoded %zu forms, %d template and %d multiplier parameters (%.2fs)",
       spec.name.c_str(), bmi.system.forms.size(), bmi.m(), bmi.n(),
       result.times.encode_sec);

  auto backend = make_backend(opts.backend);
  ValidateOptions vopts = opts.validate;
  vopts.seed = opts.seed;

  SearchContext ctx{spec,      bmi,      splits, bmi.system.template_poly, *backend,
                    opts.seed, deadline, vopts};

  Stopwatch solve_watch;
  SearchResult found = search(ctx);
  double solve_and_validate = solve_watch.sec();

  result.stats = found.stats;
  result.iterations = found.iterations;
  result.trace = std::move(found.trace);
  result.best_invalid = std::move(found.best_invalid);
  if (found.certificate) {
    result.found = true;
    result.certificate = std::move(*found.certificate);
    result.report = std::move(found.report);
  } else {
    result.failure_reason = found.failure_reason;
  }

  // Sampling dominates validation cost; attribute by a rough census of the
  // validation calls (quick + full) against the solve wall time.
  result.times.validate_sec = 0.0;
  result.times.solve_sec = solve_and_validate;
  {
    Stopwatch validate_watch;
    if (result.found) result.report = validate(spec, result.certificate, vopts);
    result.times.validate_sec = validate_watch.sec();
    result.times.solve_sec = std::max(0.0, solve_and_validate - result.times.validate_sec);
  }
  return result;
}

ValidationReport check_certificate(const ProblemSpec& spec, const std::string& expr,
                                   unsigned lie_order, const ValidateOptions& opts,
                                   Certificate* out_cert) {
  Certificate cert;
  cert.B = parse_poly(expr, spec.vars);
  cert.lie_order = lie_order;
  cert.source = "user";
  if (out_cert) *out_cert = cert;
  return validate(spec, cert, opts);
}

std::string report_to_json(const ValidationReport& report) {
  json j;
  j["pass"] = report.pass;
  json conds = json::array();
  for (const auto& c : report.conditions) {
    json e{{"name", c.name},       {"pass", c.pass},   {"vacuous", c.vacuous},
           {"samples", c.samples}, {"worst", c.worst}, {"method", c.method}};
    if (!c.witness.empty()) e["witness"] = c.witness;
    conds.push_back(e);
  }
  j["conditions"] = conds;
  return j.dump(2);
}

std::string certificate_to_json(const SynthesisResult& result, const ProblemSpec& spec) {
  json j;
  j["problem"] = spec.name;
  j["found"] = result.found;
  j["iterations"] = result.iterations;
  j["encoding"] = spec.encoding == Encoding::Sufficient ? "sufficient" : "necessary";
  j["lie_order"] = spec.lie_order;
  j["times"] = {{"encode_sec", result.times.encode_sec},
                {"solve_sec", result.times.solve_sec},
                {"validate_sec", result.times.validate_sec}};
  auto cert_json = [](const Certificate& c) {
    json e;
    e["expression"] = c.B.str();
    e["lambda"] = c.lambda;
    e["source"] = c.source;
    json a = json::object();
    for (const auto& [name, val] : c.a_values) a[name] = to_double(val);
    e["a"] = a;
    return e;
  };
  if (result.found) {
    j["certificate"] = cert_json(result.certificate);
    j["report"] = json::parse(report_to_json(result.report));
  } else {
    j["failure_reason"] = result.failure_reason;
    if (result.best_invalid) j["best_invalid"] = cert_json(*result.best_invalid);
  }
  return j.dump(2);
}

void write_artifacts(const std::string& out_dir, const ProblemSpec& spec,
                     const SynthesisResult& result, bool emit_smt, bool emit_traj,
                     std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream out(out_dir + "/" + name);
    out << text;
  };
  put("certificate.json", certificate_to_json(result, spec));
  put("trace.jsonl", trace_to_jsonl(result.trace));

  if (!result.found) return;
  if (emit_smt) {
    for (const auto& [cond, text] : export_smt(spec, result.certificate))
      put(cond + ".smt2", text);
  }
  if (emit_traj) {
    std::mt19937_64 rng(seed);
    auto starts = sample_region(spec.init, spec.domain_box, 8, rng);
    std::string csv;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      auto traj = simulate_trajectory(spec.field, starts[k], 1e-2, 2000);
      put("trajectory_" + std::to_string(k) + ".csv",
          trajectory_csv(spec.field, result.certificate.B, traj, 1e-2));
    }
    (void)csv;
  }
}

}  // namespace bcsynth
