#pragma once

#include <mutex>

#include "bcsynth/certcheck.hpp"
#include "bcsynth/dcp.hpp"

namespace bcsynth {

// Axis-aligned box over the template coefficients a.
struct Box {
  Eigen::VectorXd lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double widest_edge(int* index = nullptr) const;
  bool contains(const Eigen::VectorXd& a, double slack = 0.0) const;
  static Box root_of_ball(int m, double l_a);  // bounding box of ||a||^2 <= l_a
};

// Split along the widest edge at its midpoint; ties break toward the lowest
// coordinate index.
std::pair<Box, Box> bisect(const Box& box);

struct SearchStats {
  int nodes = 0;
  int dcp_runs = 0;
  int dcp_iterations = 0;   // cumulative
  int sampled_candidates = 0;
  int dedup_skips = 0;
  int granularity_aborts = 0;
};

struct SearchResult {
  std::optional<Certificate> certificate;
  ValidationReport report;  // of the returned certificate
  int iterations = -1;      // DCP iterations of the run that produced it (root run on failure)
  SearchStats stats;
  IterateTrace trace;  // trace of the producing run (root run on failure)
  std::optional<Certificate> best_invalid;
  std::string failure_reason;
};

struct SearchContext {
  const ProblemSpec& spec;
  const BmiProblem& bmi;
  const std::vector<DcSplit>& splits;
  const ParamPoly& template_poly;
  const ConicBackend& backend;
  std::uint64_t seed = 0;
  Deadline deadline;
  ValidateOptions validate_opts;
  std::size_t candidate_samples = 20000;  // cheap pre-check budget per sampled point
};

// Algorithm-2 search: granularity abort, sample-and-check (sufficient mode),
// global visited-set deduplication, per-node DCP with box-restricted bounds,
// depth-first bisection. Returned certificates always validated.
SearchResult search(const SearchContext& ctx);

// Substitutes a concrete a-point into the template.
Certificate certificate_at(const ProblemSpec& spec, const ConstraintSystem& system,
                           const Eigen::VectorXd& a, const std::string& source,
                           double lambda = 0.0);

}  // namespace bcsynth
