// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run as: acceptance <benchmarks-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "bcsynth/bench.hpp"
#include "bcsynth/parse.hpp"

using namespace bcsynth;

namespace {

std::string g_bench_dir = "benchmarks";
int g_failures = 0;

void criterion(int number, const std::string& description, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  std::printf("criterion %2d [%s] %s%s%s\n", number, ok ? "PASS" : "FAIL",
              description.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string bench(const std::string& name) { return g_bench_dir + "/" + name; }

SynthesisOptions default_opts(double timeout) {
  SynthesisOptions o;
  o.seed = 20210415;
  o.timeout_sec = timeout;
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd rand_sym(std::mt19937_64& rng, int p) {
  std::uniform_real_distribution<double> uni(-1, 1);
  Eigen::MatrixXd A(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = uni(rng);
  return 0.5 * (A + A.transpose());
}

BilinearMatrixForm rand_form(std::mt19937_64& rng, int m, int n, int p) {
  std::uniform_real_distribution<double> uni(0, 1);
  BilinearMatrixForm f;
  f.m = m;
  f.n = n;
  f.p = p;
  f.F = rand_sym(rng, p);
  for (int i = 0; i < m; ++i)
    if (uni(rng) < 0.8) f.H[i] = rand_sym(rng, p);
  for (int j = 0; j < n; ++j)
    if (uni(rng) < 0.8) f.G[j] = rand_sym(rng, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (uni(rng) < 0.7) f.Fij[{i, j}] = rand_sym(rng, p);
  return f;
}

double min_eig(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}
double max_eig(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

bool trace_is_sound(const BmiProblem& bmi, const IterateTrace& trace, std::string& detail) {
  for (const auto& pt : trace.points) {
    if (eval_bmi(bmi, pt.z) > 1e-6) {
      detail += " trace point k=" + std::to_string(pt.k) + " violates eval_bmi <= 1e-6;";
      return false;
    }
  }
  for (std::size_t i = 1; i < trace.points.size(); ++i) {
    if (trace.points[i].lambda < trace.points[i - 1].lambda - 1e-9) {
      detail += " objective decreased at k=" + std::to_string(trace.points[i].k) + ";";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_bench_dir = argv[1];

  // 1. Overview reproduction: validated certificate a*x2 with a < 0 in at
  //    most 10 DCP iterations, runtime < 30 s.
  criterion(1, "overview: validated a*x2 certificate, a < 0, <= 10 iterations, < 30 s",
            [&](std::string& detail) {
              auto t0 = std::chrono::steady_clock::now();
              ProblemSpec spec = load_problem(bench("overview.json"));
              SynthesisResult r = synthesize(spec, default_opts(30));
              double secs = seconds_since(t0);
              detail = "iters=" + std::to_string(r.iterations) +
                       " time=" + std::to_string(secs).substr(0, 5) + "s";
              if (!r.found || !r.report.pass) return false;
              detail += " B=" + r.certificate.B.str();
              double a = to_double(r.certificate.a_values.at("a"));
              if (!trace_is_sound(
                      assemble_bmi(build_constraints(spec), spec.l_a, spec.l_s), r.trace,
                      detail))
                return false;
              return a < 0 && r.iterations <= 10 && secs < 30;
            });

  // 2. Zero-iteration rows: the Eq.-15 initial solution already has
  //    lambda >= 0 under some c in {0, 1} and the certificate validates.
  for (const char* name :
       {"lie-der", "lti-stable", "clock", "arch1", "barr-cert3"}) {
    criterion(2, std::string("zero-iteration row ") + name +
                     ": initial solution valid, < 60 s",
              [&, name](std::string& detail) {
                auto t0 = std::chrono::steady_clock::now();
                ProblemSpec spec = load_problem(bench(std::string(name) + ".json"));
                SynthesisResult r = synthesize(spec, default_opts(60));
                double secs = seconds_since(t0);
                detail = "iters=" + std::to_string(r.iterations) +
                         " time=" + std::to_string(secs).substr(0, 5) + "s";
                return r.found && r.report.pass && r.iterations == 0 && secs < 60;
              });
  }

  // 3. High-order Lie capability.
  criterion(3, "lie-high-order: validated at lie_order 2, none at lie_order 1 (equal budget)",
            [&](std::string& detail) {
              ProblemSpec spec = load_problem(bench("lie-high-order.json"));
              SynthesisOptions o2 = default_opts(240);
              o2.lie_order = 2u;
              SynthesisResult r2 = synthesize(spec, o2);
              detail = "order2: found=" + std::to_string(r2.found) +
                       " iters=" + std::to_string(r2.iterations);
              if (!r2.found || !r2.report.pass) return false;
              SynthesisOptions o1 = o2;
              o1.lie_order = 1u;
              SynthesisResult r1 = synthesize(spec, o1);
              detail += " order1: found=" + std::to_string(r1.found);
              return !r1.found;
            });

  // 4. Thm.-5 property suite on 200 random bilinear forms.
  criterion(4, "DC split: M1-M2=M, psd parts, midpoint psd-convexity (200 forms)",
            [&](std::string& detail) {
              std::mt19937_64 rng(41);
              std::uniform_real_distribution<double> mu_dist(0.05, 0.95);
              std::uniform_real_distribution<double> zdist(-1.5, 1.5);
              for (int trial = 0; trial < 200; ++trial) {
                int m = 1 + static_cast<int>(rng() % 4);
                int n = 1 + static_cast<int>(rng() % 4);
                int p = 1 + static_cast<int>(rng() % 6);
                BilinearMatrixForm f = rand_form(rng, m, n, p);
                DcSplit s = dc_split(kronecker_m_matrix(f, 0));
                if ((s.M1 - s.M2 - s.kron.M).lpNorm<Eigen::Infinity>() > 1e-9) {
                  detail = "M1 - M2 != M at trial " + std::to_string(trial);
                  return false;
                }
                if (min_eig(s.M1) < -1e-9 || min_eig(s.M2) < -1e-9) {
                  detail = "negative eigenvalue in a split part at trial " +
                           std::to_string(trial);
                  return false;
                }
                for (int rep = 0; rep < 50; ++rep) {
                  Eigen::VectorXd z1(1 + m + n), z2(1 + m + n);
                  for (int i = 0; i < z1.size(); ++i) z1[i] = zdist(rng);
                  for (int i = 0; i < z2.size(); ++i) z2[i] = zdist(rng);
                  double mu = mu_dist(rng);
                  Eigen::VectorXd zm = mu * z1 + (1 - mu) * z2;
                  Eigen::MatrixXd gp = mu * eval_bplus(f, s, z1) +
                                       (1 - mu) * eval_bplus(f, s, z2) -
                                       eval_bplus(f, s, zm);
                  Eigen::MatrixXd gm = mu * bminus_quad(s, z1) +
                                       (1 - mu) * bminus_quad(s, z2) - bminus_quad(s, zm);
                  if (min_eig(gp) < -1e-8 || min_eig(gm) < -1e-8) {
                    detail = "midpoint convexity violated at trial " + std::to_string(trial);
                    return false;
                  }
                }
              }
              return true;
            });

  // 5. Thm.-6 property suite: QMI vs Schur-block sign agreement.
  criterion(5, "Schur linearization: QMI and LMI max-eigenvalue signs agree (100 instances)",
            [&](std::string& detail) {
              std::mt19937_64 rng(51);
              std::uniform_real_distribution<double> zdist(-1.5, 1.5);
              int checked = 0;
              while (checked < 100) {
                int m = 1 + static_cast<int>(rng() % 3);
                int n = 1 + static_cast<int>(rng() % 3);
                int p = 1 + static_cast<int>(rng() % 4);
                BilinearMatrixForm f = rand_form(rng, m, n, p);
                DcSplit s = dc_split(kronecker_m_matrix(f, 0));
                if (s.nz_rows.empty()) continue;
                Eigen::VectorXd zk(1 + m + n), z(1 + m + n);
                for (int i = 0; i < zk.size(); ++i) zk[i] = zdist(rng);
                for (int i = 0; i < z.size(); ++i) z[i] = zdist(rng);

                Eigen::MatrixXd qmi = eval_bplus(f, s, z) - bminus_quad(s, zk);
                for (int zi : s.kron.coupled)
                  qmi -= (z[zi] - zk[zi]) * bminus_partial(s, zk, zi);

                const int r = static_cast<int>(s.nz_rows.size());
                Eigen::MatrixXd W = Eigen::MatrixXd::Zero(r, p);
                for (std::size_t kb = 0; kb < s.kron.coupled.size(); ++kb)
                  for (int rr = 0; rr < r; ++rr)
                    W.row(rr) += z[s.kron.coupled[kb]] *
                                 s.N.row(s.nz_rows[rr]).segment(static_cast<int>(kb) * p, p);
                Eigen::MatrixXd block(r + p, r + p);
                block.setZero();
                block.topLeftCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
                block.topRightCorner(r, p) = W;
                block.bottomLeftCorner(p, r) = W.transpose();
                block.bottomRightCorner(p, p) = qmi - W.transpose() * W;

                double eq = max_eig(qmi), eb = max_eig(block);
                if (std::abs(eq) <= 1e-8 || std::abs(eb) <= 1e-8) continue;
                if ((eq <= 0) != (eb <= 0)) {
                  detail = "sign disagreement at instance " + std::to_string(checked);
                  return false;
                }
                ++checked;
              }
              return true;
            });

  // 6. Thm.-7 soundness: every trace point feasible, objective monotone, on
  //    fresh DCP runs over a spread of corpus problems.
  criterion(6, "DCP traces: eval_bmi <= 1e-6 per point, lambda non-decreasing",
            [&](std::string& detail) {
              for (const char* name : {"overview", "lie-der", "barr-cert3", "lti-stable"}) {
                ProblemSpec spec = load_problem(bench(std::string(name) + ".json"));
                BmiProblem bmi =
                    assemble_bmi(build_constraints(spec), spec.l_a, spec.l_s);
                auto splits = dc_splits_of(bmi);
                auto backend = make_backend("native");
                std::mt19937_64 rng(61);
                Deadline deadline = Deadline::in(60);
                InitialSolution init = initial_solution(bmi, spec.dcp, *backend, rng,
                                                        std::nullopt, deadline);
                IterateTrace trace = bmi_dc(bmi, splits, init.z, spec.dcp, *backend,
                                            std::nullopt, deadline);
                detail += std::string(name) + ":" + std::to_string(trace.points.size()) + " ";
                if (!trace_is_sound(bmi, trace, detail)) return false;
              }
              return true;
            });

  // 7. Gram exactness on 100 random parameter polynomials.
  criterion(7, "Gram matching: b^T Q b - h is identically zero (100 random ParamPolys)",
            [&](std::string& detail) {
              std::mt19937_64 rng(71);
              std::uniform_int_distribution<int> num(-6, 6);
              std::uniform_int_distribution<int> den(1, 4);
              for (int trial = 0; trial < 100; ++trial) {
                int n = 1 + static_cast<int>(rng() % 3);
                std::vector<std::string> names;
                for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
                auto vars = make_vars(names);
                ParamTable table;
                table.add_a("a0");
                table.add_a("a1");
                table.add_s("s0", SRole::multiplier_coeff, 0);
                table.add_s("s1", SRole::multiplier_coeff, 0);
                auto monos = monomial_basis(static_cast<std::size_t>(n), 4);
                std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
                ParamPoly h(vars);
                for (int t = 0; t < 6; ++t) {
                  ParamExpr e = ParamExpr::constant(rat_of(num(rng), den(rng)));
                  e += ParamExpr::param(ParamGroup::A, static_cast<int>(rng() % 2),
                                        rat_of(num(rng), den(rng)));
                  e += ParamExpr::param(ParamGroup::S, static_cast<int>(rng() % 2),
                                        rat_of(num(rng), den(rng)));
                  ParamExpr cr;
                  cr.cross[{static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)}] =
                      rat_of(num(rng), den(rng));
                  e += cr;
                  h.add_term(monos[pick(rng)], e);
                }
                GramForm g = gram_decompose(h, monomial_basis(static_cast<std::size_t>(n), 2),
                                            table, 0, "acceptance");
                if (!(gram_reconstruct(g, vars) == h)) {
                  detail = "mismatch at trial " + std::to_string(trial);
                  return false;
                }
              }
              return true;
            });

  // 8. Lie/trajectory consistency with halving-step error ratio.
  criterion(8, "central differences match L1B (<= 1e-5 at h = 1e-3, ratio ~ 4)",
            [&](std::string& detail) {
              for (const char* name : {"overview", "barr-cert1"}) {
                ProblemSpec spec = load_problem(bench(std::string(name) + ".json"));
                Poly B = parse_poly("x1 + x2^2", spec.vars);
                Poly L1 = lie_derivative(B, spec.field, 1);
                std::mt19937_64 rng(81);
                auto starts = sample_region(spec.init, spec.domain_box, 4, rng);
                if (starts.empty()) {
                  detail = std::string("no start points for ") + name;
                  return false;
                }
                auto eval = [](const Poly& p, const Eigen::VectorXd& x) {
                  return p.eval(std::span<const double>(x.data(), x.size()));
                };
                for (const auto& x0 : starts) {
                  const double h = 1e-3;
                  auto coarse = simulate_trajectory(spec.field, x0, h, 64);
                  auto fine = simulate_trajectory(spec.field, x0, h / 2, 128);
                  double err_h = 0, err_h2 = 0;
                  for (std::size_t k = 4; k + 4 < coarse.size(); k += 5) {
                    double dc = (eval(B, coarse[k + 1]) - eval(B, coarse[k - 1])) / (2 * h);
                    err_h = std::max(err_h, std::abs(dc - eval(L1, coarse[k])));
                    std::size_t k2 = 2 * k;
                    double df = (eval(B, fine[k2 + 1]) - eval(B, fine[k2 - 1])) / h;
                    err_h2 = std::max(err_h2, std::abs(df - eval(L1, fine[k2])));
                  }
                  if (err_h > 1e-5) {
                    detail = std::string(name) + ": error " + std::to_string(err_h);
                    return false;
                  }
                  double ratio = err_h / std::max(err_h2, 1e-18);
                  if (ratio < 3.0 || ratio > 5.0) {
                    detail = std::string(name) + ": halving ratio " + std::to_string(ratio);
                    return false;
                  }
                }
              }
              return true;
            });

  // 9. Lemma-1 equivalence sampling on three concrete certificates.
  criterion(9, "Def-4 and Eq-5 consecution predicates agree at 10^4 points",
            [&](std::string& detail) {
              ProblemSpec spec = load_problem(bench("overview.json"));
              std::mt19937_64 rng(91);
              std::uniform_real_distribution<double> uni(-3, 3);
              for (const char* expr :
                   {"-0.00363421*x2", "x1^2 + x2^2 - 1", "x1*x2 - 0.25"}) {
                Poly B = parse_poly(expr, spec.vars);
                std::vector<Poly> lies;
                for (unsigned k = 0; k <= 2; ++k)
                  lies.push_back(lie_derivative(B, spec.field, k));
                for (int t = 0; t < 10000; ++t) {
                  Eigen::VectorXd x(2);
                  x << uni(rng), uni(rng);
                  if (def4_consecution_pred(lies, x, 1e-5) !=
                      invariant_condition_pred(lies, x, 1e-5)) {
                    detail = std::string(expr) + " disagreement";
                    return false;
                  }
                }
              }
              return true;
            });

  // 10. Branch-and-bound completeness smoke on the 1-parameter instance.
  criterion(10, "bnb: 1-parameter interval instance solved; overlap instance fails",
            [&](std::string& detail) {
              std::string fixdir = g_bench_dir + "/../tests/fixtures";
              ProblemSpec good = load_problem(fixdir + "/interval.json");
              // Dense grid oracle for the valid interval.
              ConstraintSystem sys = build_constraints(good);
              ValidateOptions vopts;
              vopts.n_samples = 4000;
              double lo = 10, hi = -10;
              for (double a = -2.0; a <= 2.0; a += 0.01) {
                Eigen::VectorXd av(1);
                av << a;
                if (validate(good, certificate_at(good, sys, av, "grid"), vopts).pass) {
                  lo = std::min(lo, a);
                  hi = std::max(hi, a);
                }
              }
              if (!(lo < hi)) {
                detail = "oracle found no valid interval";
                return false;
              }
              if (!(good.bnb.eta < hi - lo)) {
                detail = "eta is not below the interval width";
                return false;
              }
              SynthesisResult found = synthesize(good, default_opts(60));
              detail = "interval=[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
              if (!found.found || !found.report.pass) return false;

              ProblemSpec bad = load_problem(fixdir + "/overlap.json");
              SynthesisResult none = synthesize(bad, default_opts(60));
              if (none.found) {
                detail += " overlap instance unexpectedly solved";
                return false;
              }
              return none.failure_reason.find("granularity") != std::string::npos ||
                     none.failure_reason.find("exhausted") != std::string::npos;
            });

  std::printf("%d criterion failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
