#include "bcsynth/dcp.hpp"

#include <json.hpp>

#include <sstream>

#include "bcsynth/log.hpp"

namespace bcsynth {

std::string to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::Converged: return "converged";
    case TerminalReason::LambdaNonneg: return "lambda_nonneg";
    case TerminalReason::MaxIter: return "max_iter";
    case TerminalReason::BackendFailure: return "backend_failure";
  }
  return "?";
}

std::string trace_to_jsonl(const IterateTrace& trace) {
  std::ostringstream out;
  for (const auto& pt : trace.points) {
    nlohmann::json j{{"k", pt.k},
                     {"lambda", pt.lambda},
                     {"dz", pt.step_norm},
                     {"residual", pt.residual},
                     {"wall_ms", pt.wall_ms}};
    out << j.dump() << "\n";
  }
  nlohmann::json fin{{"terminal", to_string(trace.reason)}};
  if (!trace.message.empty()) fin["message"] = trace.message;
  out << fin.dump() << "\n";
  return out.str();
}

Eigen::VectorXd multiplier_constant_vector(const ConstraintSystem& system, double c) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<int>(system.s_count()));
  for (std::size_t j = 0; j < system.s_count(); ++j)
    if (system.params.s_roles[j] == SRole::multiplier_constant) s[static_cast<int>(j)] = c;
  return s;
}

namespace {

SolveOptions lmi_solve_options(const Deadline& deadline) {
  SolveOptions opts;
  opts.tol = 1e-7;
  opts.max_iterations = 60000;
  opts.time_limit_sec = std::clamp(deadline.remaining(), 0.1, 60.0);
  return opts;
}

}  // namespace

InitialSolution initial_solution(const BmiProblem& p, const DcpConfig& cfg,
                                 const ConicBackend& backend, std::mt19937_64& rng,
                                 const std::optional<ParamBox>& node_box,
                                 const Deadline& deadline) {
  std::vector<double> policy;
  if (cfg.init_c) {
    policy.push_back(*cfg.init_c);
  } else {
    policy.push_back(0.0);
    policy.push_back(1.0);
    std::uniform_real_distribution<double> uni(std::nextafter(0.0, 1.0), 10.0);
    for (int i = 0; i < 8; ++i) policy.push_back(uni(rng));
  }

  std::vector<int> s_indices;
  for (int j = 0; j < p.n(); ++j) s_indices.push_back(1 + p.m() + j);

  InitialSolution result;
  bool have_best = false;
  double best_lambda = -std::numeric_limits<double>::infinity();

  for (std::size_t attempt = 0; attempt < policy.size(); ++attempt) {
    double c = policy[attempt];
    Eigen::VectorXd sbar = multiplier_constant_vector(p.system, c);
    LmiProblem lmi = fixed_subset_lmi(p, s_indices, sbar, node_box);
    ConicSolution sol = backend.solve(lmi.conic, lmi_solve_options(deadline));

    InitialAttempt rec;
    rec.c = c;
    rec.status = sol.status;
    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::Inaccurate) {
      rec.z = expand_solution(p, lmi, sol.x, s_indices, sbar);
      rec.lambda = rec.z[0];
      // Independent re-check; a violated point only enters as a perturbed one.
      double resid = eval_bmi(p, rec.z);
      if (resid > 0) {
        rec.z[0] -= resid + 1e-9;
        rec.lambda = rec.z[0];
      }
      LOGD("initial solution attempt c=%.4f lambda=%.6g status=%d", c, rec.lambda,
           static_cast<int>(sol.status));
      if (rec.lambda >= -cfg.lambda_tol) {
        result.z = rec.z;
        result.c = c;
        result.attempts.push_back(std::move(rec));
        return result;
      }
      if (!have_best || rec.lambda > best_lambda) {
        have_best = true;
        best_lambda = rec.lambda;
        result.z = rec.z;
        result.c = c;
      }
    }
    result.attempts.push_back(std::move(rec));
    // The two deterministic choices are always explored; random ones only
    // when nothing strictly feasible has been found yet.
    if (attempt >= 1 && have_best) break;
    if (deadline.expired()) break;
  }

  if (!have_best) {
    std::string tried;
    for (const auto& a : result.attempts)
      tried += (tried.empty() ? "" : ", ") + std::to_string(a.c);
    throw InitialSolutionError("no feasible initial solution; attempted c = {" + tried + "}");
  }
  return result;
}

std::vector<DcSplit> dc_splits_of(const BmiProblem& p, double eig_tol) {
  std::vector<DcSplit> splits;
  splits.reserve(p.system.forms.size());
  for (std::size_t f = 0; f < p.system.forms.size(); ++f)
    splits.push_back(dc_split(kronecker_m_matrix(p.system.forms[f], static_cast<int>(f)),
                              eig_tol));
  return splits;
}

namespace {

// Largest lambda keeping every augmented form negative semidefinite at the
// given (a, s), i.e. min over forms of -eigmax(F_i(a, s)).
double lambda_lift(const BmiProblem& p, const Eigen::VectorXd& z) {
  Eigen::VectorXd a = p.a_of(z), s = p.s_of(z);
  double lift = std::numeric_limits<double>::infinity();
  for (const auto& form : p.system.forms) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(form.eval(a, s),
                                                       Eigen::EigenvaluesOnly);
    lift = std::min(lift, -eig.eigenvalues().maxCoeff());
  }
  return lift;
}

bool within_bounds(const BmiProblem& p, const std::optional<ParamBox>& node_box,
                   const Eigen::VectorXd& z) {
  if (p.a_of(z).squaredNorm() > p.l_a + 1e-12) return false;
  if (p.s_of(z).squaredNorm() > p.l_s + 1e-12) return false;
  if (node_box) {
    Eigen::VectorXd a = p.a_of(z);
    for (int i = 0; i < a.size(); ++i)
      if (a[i] < node_box->lo[i] - 1e-12 || a[i] > node_box->hi[i] + 1e-12) return false;
  }
  return true;
}

}  // namespace

IterateTrace bmi_dc(const BmiProblem& p, const std::vector<DcSplit>& splits,
                    const Eigen::VectorXd& z0, const DcpConfig& cfg,
                    const ConicBackend& backend, const std::optional<ParamBox>& node_box,
                    const Deadline& deadline) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto ms = [&] { return std::chrono::duration<double, std::milli>(clock::now() - t0).count(); };

  IterateTrace trace;
  Eigen::VectorXd zk = z0;

  // Strict feasibility of the starting point: residual < -1e-9, else nudge
  // lambda down (the identity augmentation makes the shift exact).
  double resid0 = eval_bmi(p, zk);
  if (zk[0] < -cfg.lambda_tol && resid0 >= -1e-9) {
    zk[0] -= resid0 + 1e-6;
    resid0 = eval_bmi(p, zk);
  }
  trace.points.push_back({0, zk, zk[0], 0.0, resid0, ms()});

  if (zk[0] >= -cfg.lambda_tol) {
    trace.reason = TerminalReason::LambdaNonneg;
    return trace;
  }

  // Re-deriving the splits at the scale of the current iterate keeps the
  // convex overestimate tight when a- and s-coordinates live at different
  // magnitudes; worthwhile only while the per-form eigenproblems stay small.
  double resplit_cost = 0;
  for (const auto& s : splits) {
    double d = static_cast<double>(s.kron.M.rows());
    resplit_cost += d * d * d;
  }
  const bool adaptive_split = resplit_cost <= 2e8;
  std::vector<DcSplit> local_splits;

  auto splits_for = [&](const Eigen::VectorXd& at) -> const std::vector<DcSplit>& {
    if (!adaptive_split) return splits;
    local_splits.clear();
    for (const auto& s : splits) {
      const auto& kron = s.kron;
      const int c = static_cast<int>(kron.coupled.size());
      if (c == 0) {
        local_splits.push_back(s);
        continue;
      }
      Eigen::VectorXd mag(c);
      for (int kb = 0; kb < c; ++kb) mag[kb] = std::abs(at[kron.coupled[kb]]);
      double top = mag.maxCoeff();
      if (top <= 0) {
        local_splits.push_back(s);
        continue;
      }
      Eigen::VectorXd scale = mag.cwiseMax(std::max(1e-6, 1e-2 * top));
      std::ostringstream dbg;
      dbg << scale.transpose();
      LOGD("  resplit form %d scales: %s", s.kron.form_index, dbg.str().c_str());
      local_splits.push_back(dc_split_scaled(kron, scale, s.eig_tol));
    }
    return local_splits;
  };

  for (int k = 0; k < cfg.max_iter; ++k) {
    if (deadline.expired()) {
      trace.reason = TerminalReason::BackendFailure;
      trace.message = "time budget exhausted";
      return trace;
    }
    LmiProblem lmi = linearize_at(p, splits_for(zk), zk, cfg.delta, node_box);
    ConicSolution sol = backend.solve(lmi.conic, lmi_solve_options(deadline));
    if (sol.status != SolveStatus::Optimal && sol.status != SolveStatus::Inaccurate) {
      trace.reason = TerminalReason::BackendFailure;
      trace.message = "subproblem " + std::to_string(k) + ": " + sol.message;
      return trace;
    }

    Eigen::VectorXd z = sol.x.head(p.dim());
    // The identity augmentation makes the best feasible lambda at (a, s)
    // explicit; lifting to it absorbs solver round-off (and replaces any
    // downward polish a violated point would need).
    z[0] = lambda_lift(p, z) - 1e-9;
    LOGD("  subproblem %d: status=%d raw_lambda=%.10g lifted=%.10g (zk %.10g)", k,
         static_cast<int>(sol.status), sol.x[0], z[0], zk[0]);

    // The convex split over-weights curvature, so the raw step badly
    // under-shoots how far the true feasible set extends. Extend it with
    // exact lambda-lift line searches: first along the subproblem step,
    // then along the two-iterate momentum direction to cut valley zig-zag.
    auto extend = [&](const Eigen::VectorXd& anchor, Eigen::VectorXd dir,
                      Eigen::VectorXd& point) {
      dir[0] = 0.0;
      if (dir.norm() < 1e-14) return;
      auto lifted = [&](double theta, Eigen::VectorXd* out) {
        Eigen::VectorXd cand = anchor + theta * dir;
        if (!within_bounds(p, node_box, cand))
          return -std::numeric_limits<double>::infinity();
        cand[0] = lambda_lift(p, cand) - 1e-9;
        if (out) *out = cand;
        return cand[0];
      };
      double best_theta = 1.0, best_lambda = lifted(1.0, nullptr);
      if (best_lambda < point[0] - 3e-9) return;
      for (double theta = 2.0; theta <= 4096.0; theta *= 2.0) {
        double lam = lifted(theta, nullptr);
        if (lam <= best_lambda - 1e-12) break;
        if (lam >= best_lambda) best_lambda = lam;
        best_theta = theta;  // farthest plateau point: distance breaks ties
      }
      for (double frac : {1.75, 1.5, 1.25}) {
        double lam = lifted(frac * best_theta, nullptr);
        if (lam >= best_lambda - 1e-12) {
          best_theta = frac * best_theta;
          if (lam > best_lambda) best_lambda = lam;
          break;
        }
      }
      if (best_lambda > point[0]) lifted(best_theta, &point);
    };

    for (int round = 0; round < 8; ++round) {
      double before = z[0];
      extend(zk, z - zk, z);
      if (trace.points.size() >= 2) {
        const Eigen::VectorXd& two_back = trace.points[trace.points.size() - 2].z;
        extend(z, z - two_back, z);
      }
      extend(z, z - zk, z);
      if (z[0] - before < 1e-10) break;
    }
    if (z[0] < zk[0]) {
      // Subproblem optimum within solver noise of the current point: hold
      // position; the convergence test retires the run on the zero step.
      z = zk;
    }
    double resid = eval_bmi(p, z);

    double step = (z - zk).norm();
    trace.points.push_back({k + 1, z, z[0], step, resid, ms()});
    LOGD("dcp iteration %d lambda=%.8g step=%.3g residual=%.3g", k + 1, z[0], step, resid);

    if (z[0] >= -cfg.lambda_tol) {
      trace.reason = TerminalReason::LambdaNonneg;
      return trace;
    }
    // The k=0 test is defined as always false (no previous iterate).
    if (k >= 1 && step < cfg.conv_tol) {
      zk = z;
      trace.reason = TerminalReason::Converged;
      return trace;
    }
    zk = z;
  }
  trace.reason = TerminalReason::MaxIter;
  return trace;
}

}  // namespace bcsynth
