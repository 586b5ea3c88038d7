#pragma once

#include <chrono>
#include <random>

#include "bcsynth/bmi.hpp"
#include "bcsynth/problem.hpp"

namespace bcsynth {

struct InitialSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TerminalReason { Converged, LambdaNonneg, MaxIter, BackendFailure };

std::string to_string(TerminalReason r);

struct TracePoint {
  int k = 0;
  Eigen::VectorXd z;
  double lambda = 0.0;
  double step_norm = 0.0;
  double residual = 0.0;  // eval_bmi at z
  double wall_ms = 0.0;
};

struct IterateTrace {
  std::vector<TracePoint> points;
  TerminalReason reason = TerminalReason::MaxIter;
  std::string message;

  int iterations() const { return static_cast<int>(points.size()) - 1; }
  const TracePoint& last() const { return points.back(); }
};

std::string trace_to_jsonl(const IterateTrace& trace);

struct InitialAttempt {
  double c = 0.0;
  SolveStatus status = SolveStatus::Failed;
  double lambda = 0.0;
  Eigen::VectorXd z;
};

struct InitialSolution {
  Eigen::VectorXd z;
  double c = 0.0;
  std::vector<InitialAttempt> attempts;  // every policy choice tried, in order
};

struct Deadline {
  std::chrono::steady_clock::time_point at;
  static Deadline in(double seconds) {
    return {std::chrono::steady_clock::now() +
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(seconds))};
  }
  double remaining() const {
    return std::chrono::duration<double>(at - std::chrono::steady_clock::now()).count();
  }
  bool expired() const { return remaining() <= 0; }
};

// Eq.-15 program: every multiplier polynomial fixed to the constant c (its
// non-constant coefficients and the Gram-matching null-space parameters to
// zero), leaving an LMI in (lambda, a). The policy tries c = 0, then c = 1,
// then up to 8 uniform random c in (0, 10]; a candidate with lambda >= 0 wins
// immediately, otherwise the best strictly feasible one is kept.
InitialSolution initial_solution(const BmiProblem& p, const DcpConfig& cfg,
                                 const ConicBackend& backend, std::mt19937_64& rng,
                                 const std::optional<ParamBox>& node_box,
                                 const Deadline& deadline);

// The fixed s-vector (c at multiplier-constant slots, zero elsewhere).
Eigen::VectorXd multiplier_constant_vector(const ConstraintSystem& system, double c);

// Algorithm-1 iteration: linearize around z^k, solve the convex subproblem,
// advance. Stops on lambda >= -lambda_tol (success), step < conv_tol,
// max_iter, or backend failure; the returned prefix is feasible either way.
IterateTrace bmi_dc(const BmiProblem& p, const std::vector<DcSplit>& splits,
                    const Eigen::VectorXd& z0, const DcpConfig& cfg,
                    const ConicBackend& backend, const std::optional<ParamBox>& node_box,
                    const Deadline& deadline);

std::vector<DcSplit> dc_splits_of(const BmiProblem& p, double eig_tol = 1e-10);

}  // namespace bcsynth
