#include "bcsynth/certcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bcsynth/log.hpp"

namespace bcsynth {

namespace {

double eval_at(const Poly& p, const Eigen::VectorXd& x) {
  return p.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::VectorXd uniform_point(const std::vector<Interval>& box, std::mt19937_64& rng) {
  Eigen::VectorXd x(static_cast<int>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    std::uniform_real_distribution<double> d(box[i].lo, box[i].hi);
    x[static_cast<int>(i)] = d(rng);
  }
  return x;
}

bool in_box(const std::vector<Interval>& box, const Eigen::VectorXd& x) {
  for (std::size_t i = 0; i < box.size(); ++i)
    if (x[static_cast<int>(i)] < box[i].lo || x[static_cast<int>(i)] > box[i].hi) return false;
  return true;
}

double region_violation(const std::vector<Poly>& leqs, const Eigen::VectorXd& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : leqs) worst = std::max(worst, eval_at(p, x));
  return worst;
}

}  // namespace

std::vector<Eigen::VectorXd> sample_region(const std::vector<Poly>& leqs,
                                           const std::vector<Interval>& box,
                                           std::size_t want, std::mt19937_64& rng) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(want);

  // Plain rejection first.
  std::size_t budget = std::max<std::size_t>(want, 2000);
  for (std::size_t t = 0; t < budget && out.size() < want; ++t) {
    Eigen::VectorXd x = uniform_point(box, rng);
    if (region_violation(leqs, x) <= 0) out.push_back(std::move(x));
  }
  if (out.size() >= want || out.size() * 50 >= want) {
    // Acceptance rate is workable; top up with rejection only.
    while (out.size() < want) {
      Eigen::VectorXd x = uniform_point(box, rng);
      if (region_violation(leqs, x) <= 0) out.push_back(std::move(x));
    }
    return out;
  }

  // Thin region: descend onto it from random starts, then random-walk inside.
  std::vector<Eigen::VectorXd> seeds = out;
  for (int attempt = 0; attempt < 64 && seeds.size() < 8; ++attempt) {
    Eigen::VectorXd x = uniform_point(box, rng);
    double step = 0.0;
    for (std::size_t i = 0; i < box.size(); ++i)
      step = std::max(step, 0.25 * (box[i].hi - box[i].lo));
    double v = region_violation(leqs, x);
    for (int it = 0; it < 400 && v > 0; ++it) {
      Eigen::VectorXd cand = x;
      std::normal_distribution<double> g(0.0, step);
      for (int i = 0; i < cand.size(); ++i) cand[i] += g(rng);
      if (!in_box(box, cand)) continue;
      double cv = region_violation(leqs, cand);
      if (cv < v) {
        x = cand;
        v = cv;
      } else {
        step *= 0.97;
      }
    }
    if (v <= 0) seeds.push_back(x);
  }
  if (seeds.empty()) return out;

  double walk = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i)
    walk = std::max(walk, 0.05 * (box[i].hi - box[i].lo));
  std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
  Eigen::VectorXd x = seeds[pick(rng)];
  std::size_t rejects = 0;
  while (out.size() < want) {
    Eigen::VectorXd cand = x;
    std::normal_distribution<double> g(0.0, walk);
    for (int i = 0; i < cand.size(); ++i) cand[i] += g(rng);
    if (in_box(box, cand) && region_violation(leqs, cand) <= 0) {
      x = cand;
      out.push_back(x);
      rejects = 0;
    } else if (++rejects > 20) {
      walk *= 0.7;
      rejects = 0;
      if (walk < 1e-9) {
        x = seeds[pick(rng)];
        walk = 1e-3;
      }
    }
  }
  return out;
}

namespace {

// Points on the shell {|g_j(x)| <= eq_tol for all j} inside the box, found by
// sign-change bisection (single g) plus damped Gauss-Newton refinement.
std::vector<Eigen::VectorXd> shell_points(const std::vector<Poly>& gs,
                                          const std::vector<Interval>& box, std::size_t want,
                                          double eq_tol, std::mt19937_64& rng) {
  const int n = static_cast<int>(box.size());
  std::vector<Eigen::VectorXd> out;

  std::vector<std::vector<Poly>> grads;
  for (const auto& g : gs) {
    std::vector<Poly> row;
    for (int v = 0; v < n; ++v) row.push_back(g.derivative(static_cast<std::size_t>(v)));
    grads.push_back(std::move(row));
  }

  auto on_shell = [&](const Eigen::VectorXd& x) {
    for (const auto& g : gs)
      if (std::abs(eval_at(g, x)) > eq_tol) return false;
    return true;
  };

  std::size_t budget = 4 * want + 200;
  for (std::size_t t = 0; t < budget && out.size() < want; ++t) {
    Eigen::VectorXd x = uniform_point(box, rng);
    if (on_shell(x)) {
      out.push_back(std::move(x));
      continue;
    }
    if (gs.size() == 1) {
      // Bisection between opposite signs of the single constraint.
      Eigen::VectorXd y = uniform_point(box, rng);
      double fx = eval_at(gs[0], x), fy = eval_at(gs[0], y);
      if (fx * fy > 0) continue;
      for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd mid = 0.5 * (x + y);
        double fm = eval_at(gs[0], mid);
        if (fx * fm <= 0) {
          y = mid;
          fy = fm;
        } else {
          x = mid;
          fx = fm;
        }
      }
      if (on_shell(x)) out.push_back(x);
      continue;
    }
    // Damped Gauss-Newton toward the joint variety.
    const int k = static_cast<int>(gs.size());
    double mu = 1e-8;
    for (int it = 0; it < 80; ++it) {
      Eigen::VectorXd F(k);
      for (int j = 0; j < k; ++j) F[j] = eval_at(gs[static_cast<std::size_t>(j)], x);
      if (F.lpNorm<Eigen::Infinity>() <= 0.5 * eq_tol) break;
      Eigen::MatrixXd J(k, n);
      for (int j = 0; j < k; ++j)
        for (int v = 0; v < n; ++v)
          J(j, v) = eval_at(grads[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)], x);
      Eigen::MatrixXd JJt = J * J.transpose();
      JJt.diagonal().array() += mu;
      Eigen::VectorXd y = JJt.ldlt().solve(F);
      Eigen::VectorXd dx = -J.transpose() * y;
      if (!dx.allFinite()) break;
      x += dx;
      if (!in_box(box, x)) break;
    }
    if (in_box(box, x) && on_shell(x)) out.push_back(x);
  }
  return out;
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL");
  for (const auto& c : conditions) {
    out << "; " << c.name << "=" << (c.pass ? (c.vacuous ? "vacuous" : "pass") : "fail");
    if (!c.pass && !c.witness.empty()) {
      out << " witness=(";
      for (std::size_t i = 0; i < c.witness.size(); ++i)
        out << (i ? "," : "") << c.witness[i];
      out << ") value=" << c.worst;
    }
  }
  return out.str();
}

ValidationReport validate(const ProblemSpec& spec, const Certificate& cert,
                          const ValidateOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  ValidationReport report;
  const unsigned N = cert.lie_order;

  std::vector<Poly> lies;
  for (unsigned k = 0; k <= N; ++k) lies.push_back(lie_derivative(cert.B, spec.field, k));

  auto record = [&](ConditionVerdict v) { report.conditions.push_back(std::move(v)); };

  // initial: B <= margin on X0 ∩ box.
  {
    ConditionVerdict v;
    v.name = "initial";
    auto pts = sample_region(spec.init, spec.domain_box, opts.n_samples, rng);
    v.samples = pts.size();
    if (pts.empty()) {
      v.vacuous = true;
      LOGW("initial region is empty in the domain box; vacuous pass");
    } else {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& x : pts) {
        double val = eval_at(cert.B, x);
        if (val > worst) {
          worst = val;
          v.witness.assign(x.data(), x.data() + x.size());
        }
      }
      v.worst = worst;
      v.pass = worst <= opts.margin;
    }
    record(std::move(v));
  }

  // consecution order i: L^i B <= margin wherever |L^j B| <= eq_tol, j < i.
  // A shell point sits up to a Gauss-Newton step away from the exact
  // equality variety, so the bound carries the first-order allowance
  // ||grad L^i B|| * ||J^+ r|| on top of the margin; without it the check
  // rejects valid certificates whose L^i B vanishes on the variety.
  const int nv = static_cast<int>(spec.vars->size());
  std::vector<std::vector<Poly>> lie_grads;
  for (const auto& L : lies) {
    std::vector<Poly> row;
    for (int v = 0; v < nv; ++v) row.push_back(L.derivative(static_cast<std::size_t>(v)));
    lie_grads.push_back(std::move(row));
  }
  auto grad_at = [&](unsigned j, const Eigen::VectorXd& x) {
    Eigen::VectorXd g(nv);
    for (int v = 0; v < nv; ++v) g[v] = eval_at(lie_grads[j][static_cast<std::size_t>(v)], x);
    return g;
  };

  for (unsigned i = 1; i <= N; ++i) {
    ConditionVerdict v;
    v.name = "consecution i=" + std::to_string(i);
    std::vector<Poly> chain(lies.begin(), lies.begin() + i);
    std::size_t want = std::max<std::size_t>(64, opts.n_samples / 20);
    auto pts = shell_points(chain, spec.domain_box, want, opts.eq_tol, rng);
    v.samples = pts.size();
    if (pts.empty()) {
      v.vacuous = true;
      LOGW("no points found on the order-%u equality shell; vacuous pass", i);
    } else {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& x : pts) {
        Eigen::MatrixXd J(static_cast<int>(i), nv);
        Eigen::VectorXd r(static_cast<int>(i));
        for (unsigned j = 0; j < i; ++j) {
          J.row(j) = grad_at(j, x).transpose();
          r[static_cast<int>(j)] = eval_at(lies[j], x);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
        double dist = cod.solve(r).norm();
        double allowance = grad_at(i, x).norm() * dist;
        double val = eval_at(lies[i], x) - allowance;
        if (val > worst) {
          worst = val;
          v.witness.assign(x.data(), x.data() + x.size());
        }
      }
      v.worst = worst;
      v.pass = worst <= opts.margin;
    }
    record(std::move(v));
  }

  // separation: B >= margin_strict on Xu ∩ box.
  {
    ConditionVerdict v;
    v.name = "separation";
    auto pts = sample_region(spec.unsafe, spec.domain_box, opts.n_samples, rng);
    v.samples = pts.size();
    if (pts.empty()) {
      v.vacuous = true;
      LOGW("unsafe region is empty in the domain box; vacuous pass");
    } else {
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& x : pts) {
        double val = eval_at(cert.B, x);
        if (val < worst) {
          worst = val;
          v.witness.assign(x.data(), x.data() + x.size());
        }
      }
      v.worst = worst;
      v.pass = worst >= opts.margin_strict;
    }
    record(std::move(v));
  }

  report.pass = std::all_of(report.conditions.begin(), report.conditions.end(),
                            [](const ConditionVerdict& c) { return c.pass; });
  return report;
}

bool def4_consecution_pred(const std::vector<Poly>& lies, const Eigen::VectorXd& x,
                           double eq_tol) {
  std::vector<double> vals;
  for (const auto& L : lies) vals.push_back(eval_at(L, x));
  for (std::size_t i = 1; i < vals.size(); ++i) {
    bool premise = true;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(vals[j]) > eq_tol) premise = false;
    if (premise && vals[i] > eq_tol) return false;
  }
  return true;
}

bool invariant_condition_pred(const std::vector<Poly>& lies, const Eigen::VectorXd& x,
                              double eq_tol) {
  std::vector<double> vals;
  for (const auto& L : lies) vals.push_back(eval_at(L, x));
  if (vals[0] > eq_tol) return true;  // B <= 0 antecedent fails
  for (std::size_t i = 0; i < vals.size(); ++i) {
    bool prefix_zero = true;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(vals[j]) > eq_tol) prefix_zero = false;
    if (prefix_zero && vals[i] < -eq_tol) return true;
  }
  bool all_zero = true;
  for (double v : vals)
    if (std::abs(v) > eq_tol) all_zero = false;
  return all_zero;
}

std::vector<Eigen::VectorXd> simulate_trajectory(const VectorField& f,
                                                 const Eigen::VectorXd& x0, double step,
                                                 std::size_t steps) {
  if (step <= 0) throw std::invalid_argument("step must be positive");
  const int n = static_cast<int>(f.dim());
  auto deriv = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = eval_at(f.components[static_cast<std::size_t>(i)], x);
    return d;
  };
  std::vector<Eigen::VectorXd> traj{x0};
  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    Eigen::VectorXd k1 = deriv(x);
    Eigen::VectorXd k2 = deriv(x + 0.5 * step * k1);
    Eigen::VectorXd k3 = deriv(x + 0.5 * step * k2);
    Eigen::VectorXd k4 = deriv(x + step * k3);
    x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    if (x.norm() > 1e9) break;  // divergence guard
    traj.push_back(x);
  }
  return traj;
}

std::string trajectory_csv(const VectorField& f, const Poly& B,
                           const std::vector<Eigen::VectorXd>& traj, double step) {
  std::ostringstream out;
  out << "t";
  for (const auto& name : *f.vars) out << "," << name;
  out << ",B\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << k * step;
    for (int i = 0; i < traj[k].size(); ++i) out << "," << traj[k][i];
    out << "," << eval_at(B, traj[k]) << "\n";
  }
  return out.str();
}

namespace {

std::string smt_rat(const Rat& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  std::string core = den == 1 ? num.str() : "(/ " + num.str() + " " + den.str() + ")";
  return neg ? "(- " + core + ")" : core;
}

std::string smt_poly(const Poly& p, const std::vector<std::string>& vars) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& [m, c] : p.terms()) {
    std::vector<std::string> factors;
    factors.push_back(smt_rat(c));
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      for (unsigned e = 0; e < m.exps[i]; ++e) factors.push_back(vars[i]);
    if (factors.size() == 1) {
      terms.push_back(factors[0]);
    } else {
      std::string t = "(*";
      for (const auto& f : factors) t += " " + f;
      terms.push_back(t + ")");
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (const auto& t : terms) s += " " + t;
  return s + ")";
}

std::string smt_header(const ProblemSpec& spec) {
  std::string out = "(set-logic QF_NRA)\n";
  for (const auto& v : *spec.vars) out += "(declare-const " + v + " Real)\n";
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> export_smt(const ProblemSpec& spec,
                                                            const Certificate& cert) {
  const auto& vars = *spec.vars;
  std::vector<Poly> lies;
  for (unsigned k = 0; k <= cert.lie_order; ++k)
    lies.push_back(lie_derivative(cert.B, spec.field, k));

  std::vector<std::pair<std::string, std::string>> scripts;

  // initial: exists x in X0 with B(x) > 0.
  {
    std::string s = smt_header(spec);
    s += "; unsat certifies: B <= 0 on the initial set\n(assert (and";
    for (const auto& I : spec.init) s += " (<= " + smt_poly(I, vars) + " 0)";
    s += " (> " + smt_poly(cert.B, vars) + " 0)))\n(check-sat)\n";
    scripts.emplace_back("initial", s);
  }

  // consecution: exists x with the first i derivatives zero and L^i B > 0.
  {
    std::string s = smt_header(spec);
    s += "; unsat certifies: the Lie consecution chain up to order " +
         std::to_string(cert.lie_order) + "\n(assert (or";
    for (unsigned i = 1; i <= cert.lie_order; ++i) {
      s += " (and";
      for (unsigned j = 0; j < i; ++j) s += " (= " + smt_poly(lies[j], vars) + " 0)";
      s += " (> " + smt_poly(lies[i], vars) + " 0))";
    }
    s += "))\n(check-sat)\n";
    scripts.emplace_back("consecution", s);
  }

  // separation: exists x in Xu with B(x) <= 0.
  {
    std::string s = smt_header(spec);
    s += "; unsat certifies: B > 0 on the unsafe set\n(assert (and";
    for (const auto& U : spec.unsafe) s += " (<= " + smt_poly(U, vars) + " 0)";
    s += " (<= " + smt_poly(cert.B, vars) + " 0)))\n(check-sat)\n";
    scripts.emplace_back("separation", s);
  }
  return scripts;
}

}  // namespace bcsynth
