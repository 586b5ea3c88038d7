#include "bcsynth/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <future>
#include <iomanip>
#include <sstream>

#include "bcsynth/log.hpp"

namespace bcsynth {

using nlohmann::json;

std::vector<std::string> problem_files_in(const std::string& directory) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (!fs::is_directory(directory)) return files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

int template_degree(const ProblemSpec& spec) {
  if (spec.tmpl.mode == TemplateConfig::Mode::FullDegree)
    return static_cast<int>(spec.tmpl.degree);
  ParamTable scratch;
  return static_cast<int>(instantiate_template(spec.tmpl, spec.vars, scratch).degree());
}

BenchRow run_one(const std::string& file, const SynthesisOptions& base) {
  BenchRow row;
  try {
    ProblemSpec spec = load_problem(file);
    row.name = spec.name;
    row.n_sys = static_cast<int>(spec.vars->size());
    for (const auto& c : spec.field.components)
      row.d_flow = std::max(row.d_flow, static_cast<int>(c.degree()));
    row.d_bc = template_degree(spec);

    SynthesisResult result = synthesize(spec, base);
    row.iterations = result.iterations;
    row.times = result.times;
    row.time_sec = result.times.solve_sec;
    row.verified = result.found && result.report.pass;
    if (result.found) {
      row.certificate = result.certificate.B.str();
      row.status = "ok";
    } else {
      row.status = "not-found";
      if (!result.failure_reason.empty()) row.status += " (" + result.failure_reason + ")";
    }
  } catch (const std::exception& e) {
    if (row.name.empty()) row.name = std::filesystem::path(file).stem().string();
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

BenchReport run_bench(const std::vector<std::string>& files, const SynthesisOptions& base,
                      int jobs) {
  BenchReport report;
  report.seed = base.seed;
  report.rows.resize(files.size());
  if (jobs < 1) jobs = 1;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      LOGI("bench: running %s", files[i].c_str());
      report.rows[i] = run_one(files[i], base);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::future<void>> pool;
    for (int j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }
  return report;
}

std::string BenchReport::table() const {
  std::ostringstream out;
  out << std::left << std::setw(18) << "example" << std::right << std::setw(6) << "n_sys"
      << std::setw(8) << "d_flow" << std::setw(6) << "d_BC" << std::setw(8) << "iter"
      << std::setw(10) << "time[s]" << std::setw(10) << "verified"
      << "  certificate\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.name << std::right << std::setw(6) << r.n_sys
        << std::setw(8) << r.d_flow << std::setw(6) << r.d_bc << std::setw(8)
        << (r.iterations < 0 ? std::string("-") : std::to_string(r.iterations))
        << std::setw(10) << std::fixed << std::setprecision(2) << r.time_sec
        << std::setw(10) << (r.verified ? "yes" : "no") << "  "
        << (r.verified ? r.certificate : r.status) << "\n";
  }
  return out.str();
}

std::string BenchReport::to_json() const {
  json j;
  j["seed"] = seed;
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"name", r.name},
                   {"n_sys", r.n_sys},
                   {"d_flow", r.d_flow},
                   {"d_bc", r.d_bc},
                   {"iterations", r.iterations},
                   {"time_sec", r.time_sec},
                   {"encode_sec", r.times.encode_sec},
                   {"validate_sec", r.times.validate_sec},
                   {"verified", r.verified},
                   {"certificate", r.certificate},
                   {"status", r.status}});
  }
  j["rows"] = arr;
  return j.dump(2);
}

}  // namespace bcsynth
