#include "bcsynth/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "bcsynth/log.hpp"

namespace bcsynth {

double Box::widest_edge(int* index) const {
  double best = -1.0;
  int arg = 0;
  for (int i = 0; i < dim(); ++i) {
    double w = hi[i] - lo[i];
    if (w > best) {
      best = w;
      arg = i;
    }
  }
  if (index) *index = arg;
  return best;
}

bool Box::contains(const Eigen::VectorXd& a, double slack) const {
  for (int i = 0; i < dim(); ++i)
    if (a[i] < lo[i] - slack || a[i] > hi[i] + slack) return false;
  return true;
}

Box Box::root_of_ball(int m, double l_a) {
  const double r = std::sqrt(l_a);
  Box b;
  b.lo = Eigen::VectorXd::Constant(m, -r);
  b.hi = Eigen::VectorXd::Constant(m, r);
  return b;
}

std::pair<Box, Box> bisect(const Box& box) {
  int axis = 0;
  box.widest_edge(&axis);
  double mid = 0.5 * (box.lo[axis] + box.hi[axis]);
  Box left = box, right = box;
  left.hi[axis] = mid;
  right.lo[axis] = mid;
  return {left, right};
}

Certificate certificate_at(const ProblemSpec& spec, const ConstraintSystem& system,
                           const Eigen::VectorXd& a, const std::string& source,
                           double lambda) {
  Certificate cert;
  cert.lie_order = spec.lie_order;
  cert.source = source;
  cert.lambda = lambda;
  std::vector<Rat> aval(system.a_count());
  for (std::size_t i = 0; i < system.a_count(); ++i) {
    aval[i] = Rat(a[static_cast<int>(i)]);
    cert.a_values[system.params.a_names[i]] = aval[i];
  }
  std::vector<Rat> sval;
  cert.B = system.template_poly.substitute(aval, sval);
  return cert;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct VisitedSet {
  std::mutex mu;
  std::vector<Eigen::VectorXd> points;  // projections onto a

  void insert(const Eigen::VectorXd& a) {
    std::lock_guard<std::mutex> lock(mu);
    points.push_back(a);
  }
  bool intersects(const Box& box, double radius) {
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& p : points)
      if (box.contains(p, radius)) return true;
    return false;
  }
};

struct Searcher {
  const SearchContext& ctx;
  VisitedSet visited;
  std::mutex state_mu;  // guards everything below when workers > 1
  SearchStats stats;
  int max_depth;
  int fork_depth = 0;
  double r_dedup;

  std::optional<Certificate> found;
  ValidationReport found_report;
  int found_iterations = -1;
  IterateTrace found_trace;

  IterateTrace root_trace;
  int root_iterations = -1;
  bool have_root_trace = false;

  std::optional<Certificate> best_invalid;
  double best_invalid_lambda = -std::numeric_limits<double>::infinity();

  explicit Searcher(const SearchContext& c) : ctx(c) {
    const int m = ctx.bmi.m();
    max_depth = ctx.spec.bnb.max_depth;
    if (max_depth < 0) {
      double ratio = std::max(2.0, 2.0 * ctx.bmi.l_a / ctx.spec.bnb.eta);
      max_depth = static_cast<int>(std::ceil(m * std::log2(ratio)));
    }
    r_dedup = ctx.spec.bnb.eta / 4.0;
    if (ctx.spec.bnb.workers > 1)
      fork_depth = static_cast<int>(std::ceil(std::log2(ctx.spec.bnb.workers)));
  }

  bool done() {
    std::lock_guard<std::mutex> lock(state_mu);
    return found.has_value();
  }

  ValidateOptions quick_opts() const {
    ValidateOptions o = ctx.validate_opts;
    o.n_samples = std::min(o.n_samples, ctx.candidate_samples);
    return o;
  }

  void note_invalid(const Certificate& cert, double lambda) {
    std::lock_guard<std::mutex> lock(state_mu);
    if (lambda > best_invalid_lambda || !best_invalid) {
      best_invalid_lambda = lambda;
      best_invalid = cert;
    }
  }

  bool validate_candidate(const Eigen::VectorXd& a, const std::string& source, double lambda,
                          Certificate* out, ValidationReport* out_report) {
    Certificate cert = certificate_at(ctx.spec, ctx.bmi.system, a, source, lambda);
    ValidationReport quick = validate(ctx.spec, cert, quick_opts());
    if (!quick.pass) {
      note_invalid(cert, lambda);
      return false;
    }
    // Full-budget confirmation before anything is returned.
    ValidationReport full = validate(ctx.spec, cert, ctx.validate_opts);
    if (!full.pass) {
      note_invalid(cert, lambda);
      return false;
    }
    *out = cert;
    *out_report = full;
    return true;
  }

  void set_found(Certificate cert, ValidationReport report, int iterations,
                 IterateTrace trace) {
    std::lock_guard<std::mutex> lock(state_mu);
    if (found) return;
    found = std::move(cert);
    found_report = std::move(report);
    found_iterations = iterations;
    found_trace = std::move(trace);
  }

  bool explore(const Box& box, int depth, std::uint64_t node_id) {
    if (done() || ctx.deadline.expired()) return done();
    {
      std::lock_guard<std::mutex> lock(state_mu);
      stats.nodes += 1;
    }
    std::mt19937_64 rng(splitmix64(ctx.seed ^ splitmix64(node_id)));

    // Granularity abort: partition is fine enough.
    if (box.widest_edge() < ctx.spec.bnb.eta) {
      std::lock_guard<std::mutex> lock(state_mu);
      stats.granularity_aborts += 1;
      return false;
    }

    // Sample-and-check, required for weak completeness under the sufficient
    // encoding (the necessary encoding validates trace points instead).
    if (ctx.spec.encoding == Encoding::Sufficient) {
      const double r2 = ctx.bmi.l_a;
      for (int t = 0; t < ctx.spec.bnb.samples; ++t) {
        Eigen::VectorXd a(box.dim());
        for (int i = 0; i < box.dim(); ++i) {
          std::uniform_real_distribution<double> d(box.lo[i], box.hi[i]);
          a[i] = d(rng);
        }
        if (a.squaredNorm() > r2) continue;  // outside C_a
        {
          std::lock_guard<std::mutex> lock(state_mu);
          stats.sampled_candidates += 1;
        }
        Certificate cert;
        ValidationReport report;
        if (validate_candidate(a, "sample", 0.0, &cert, &report)) {
          LOGI("sample-and-check hit a valid parameter at node %llu",
               static_cast<unsigned long long>(node_id));
          set_found(std::move(cert), std::move(report), 0, IterateTrace{});
          return true;
        }
        if (ctx.deadline.expired()) return false;
      }
    }

    // Skip the local solve when a visited point projects into this node.
    bool run_dcp = !visited.intersects(box, r_dedup);
    if (!run_dcp) {
      std::lock_guard<std::mutex> lock(state_mu);
      stats.dedup_skips += 1;
    }

    if (run_dcp) {
      ParamBox node_box{box.lo, box.hi};
      IterateTrace trace;
      bool have_trace = false;
      try {
        InitialSolution init = initial_solution(ctx.bmi, ctx.spec.dcp, ctx.backend, rng,
                                                node_box, ctx.deadline);
        {
          std::lock_guard<std::mutex> lock(state_mu);
          stats.dcp_runs += 1;
        }
        trace = bmi_dc(ctx.bmi, ctx.splits, init.z, ctx.spec.dcp, ctx.backend, node_box,
                       ctx.deadline);
        have_trace = true;
      } catch (const InitialSolutionError& e) {
        LOGW("node %llu: %s", static_cast<unsigned long long>(node_id), e.what());
      }

      if (have_trace) {
        {
          std::lock_guard<std::mutex> lock(state_mu);
          stats.dcp_iterations += trace.iterations();
          if (!have_root_trace) {
            root_trace = trace;
            root_iterations = trace.iterations();
            have_root_trace = true;
          }
        }
        for (const auto& pt : trace.points) visited.insert(ctx.bmi.a_of(pt.z));

        std::vector<const TracePoint*> to_check;
        if (ctx.spec.encoding == Encoding::Necessary) {
          for (const auto& pt : trace.points) to_check.push_back(&pt);
        } else if (trace.reason == TerminalReason::LambdaNonneg) {
          to_check.push_back(&trace.points.back());
        }
        for (const TracePoint* pt : to_check) {
          Certificate cert;
          ValidationReport report;
          if (validate_candidate(ctx.bmi.a_of(pt->z), "dcp-trace", pt->lambda, &cert,
                                 &report)) {
            set_found(std::move(cert), std::move(report), trace.iterations(), trace);
            return true;
          }
        }
      }
    }

    if (depth >= max_depth) return false;
    auto [left, right] = bisect(box);
    if (depth < fork_depth) {
      auto future = std::async(std::launch::async, [this, right = right, depth, node_id] {
        return explore(right, depth + 1, node_id * 2 + 2);
      });
      bool l = explore(left, depth + 1, node_id * 2 + 1);
      bool r = future.get();
      return l || r;
    }
    if (explore(left, depth + 1, node_id * 2 + 1)) return true;
    return explore(right, depth + 1, node_id * 2 + 2);
  }
};

}  // namespace

SearchResult search(const SearchContext& ctx) {
  Searcher searcher(ctx);
  Box root = Box::root_of_ball(ctx.bmi.m(), ctx.bmi.l_a);
  searcher.explore(root, 0, 1);

  SearchResult result;
  result.stats = searcher.stats;
  result.best_invalid = searcher.best_invalid;
  if (searcher.found) {
    result.certificate = std::move(searcher.found);
    result.report = std::move(searcher.found_report);
    result.iterations = searcher.found_iterations;
    result.trace = std::move(searcher.found_trace);
  } else {
    result.iterations = searcher.root_iterations;
    result.trace = std::move(searcher.root_trace);
    result.failure_reason = ctx.deadline.expired()
                                ? "time budget exhausted"
                                : "search space exhausted to granularity eta";
  }
  return result;
}

}  // namespace bcsynth
