#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcsynth/conic.hpp"

using namespace bcsynth;

namespace {

SolveOptions opts(double tol = 1e-7) {
  SolveOptions o;
  o.tol = tol;
  o.time_limit_sec = 30;
  return o;
}

// maximize lambda s.t. lambda I - D <= 0 for diagonal D, i.e. psd rows
// svec(D - lambda I) >= 0. Optimal lambda = min diag(D).
ConicProblem diag_lmi(const Eigen::VectorXd& d) {
  const int p = static_cast<int>(d.size());
  ConicProblem prob;
  prob.nvars = 1;
  prob.c = Eigen::VectorXd::Constant(1, -1.0);
  prob.cones.psd = {p};
  prob.b = svec(Eigen::MatrixXd(d.asDiagonal()));
  svec_scatter(Eigen::MatrixXd::Identity(p, p), 1.0, 0, 0, prob.entries);
  return prob;
}

}  // namespace

TEST_CASE("svec/smat round-trip preserves inner products") {
  Eigen::MatrixXd A(3, 3), B(3, 3);
  A << 1, 2, 3, 2, 5, -1, 3, -1, 4;
  B << 0, 1, 0, 1, 2, 2, 0, 2, -3;
  CHECK((smat(svec(A), 3) - A).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK(svec(A).dot(svec(B)) == doctest::Approx((A * B).trace()));
}

TEST_CASE("maximize lambda subject to lambda I <= I") {
  ConicSolution sol = make_backend("native")->solve(diag_lmi(Eigen::VectorXd::Ones(3)), opts());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("tightest diagonal entry wins") {
  Eigen::VectorXd d(2);
  d << 1.0, 3.0;
  ConicSolution sol = make_backend("native")->solve(diag_lmi(d), opts());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("second-order cone constraint is respected") {
  // minimize x subject to |x - 3| <= 1 written as a 2-dim SOC: optimal x = 2.
  ConicProblem prob;
  prob.nvars = 1;
  prob.c = Eigen::VectorXd::Constant(1, 1.0);
  prob.cones.soc = {2};
  prob.b = Eigen::VectorXd(2);
  prob.b << 1.0, -3.0;
  prob.entries.emplace_back(1, 0, -1.0);  // s1 = x - 3
  ConicSolution sol = make_backend("native")->solve(prob, opts());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("infeasible nonnegative rows are certified") {
  // x >= 1 and -x >= 1 simultaneously.
  ConicProblem prob;
  prob.nvars = 1;
  prob.c = Eigen::VectorXd::Constant(1, 1.0);
  prob.cones.nonneg = 2;
  prob.b = Eigen::VectorXd(2);
  prob.b << -1.0, -1.0;
  prob.entries.emplace_back(0, 0, -1.0);  // -1 + x >= 0
  prob.entries.emplace_back(1, 0, 1.0);   // -1 - x >= 0
  ConicSolution sol = make_backend("native")->solve(prob, opts(1e-6));
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("violation re-verification matches the reported solution") {
  Eigen::VectorXd d(3);
  d << 2.0, 4.0, 9.0;
  ConicProblem prob = diag_lmi(d);
  ConicSolution sol = make_backend("native")->solve(prob, opts());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(conic_violation(prob, sol.x) <= 1e-6);

  Eigen::VectorXd bad(1);
  bad << 5.0;  // violates lambda <= 2 by 3
  CHECK(conic_violation(prob, bad) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("unknown backend names are rejected") {
  CHECK_THROWS_AS(make_backend("mosek"), std::invalid_argument);
  CHECK(make_backend("native")->name() == "native");
}

TEST_CASE("mixed cone problem solves to tolerance") {
  // maximize lambda s.t. lambda I <= diag(1, 2), |t| <= 0.5 (SOC), t free in
  // the objective with small negative weight; checks multi-cone assembly.
  ConicProblem prob;
  prob.nvars = 2;  // (lambda, t)
  prob.c = Eigen::VectorXd(2);
  prob.c << -1.0, 0.25;
  prob.cones.soc = {2};
  prob.cones.psd = {2};
  Eigen::VectorXd d(2);
  d << 1.0, 2.0;
  std::vector<Eigen::Triplet<double>> tri;
  Eigen::VectorXd b(2 + svec_dim(2));
  b[0] = 0.5;
  b[1] = 0.0;
  tri.emplace_back(1, 1, -1.0);
  Eigen::VectorXd bp = svec(Eigen::MatrixXd(d.asDiagonal()));
  for (int i = 0; i < bp.size(); ++i) b[2 + i] = bp[i];
  svec_scatter(Eigen::MatrixXd::Identity(2, 2), 1.0, 2, 0, tri);
  prob.entries = tri;
  prob.b = b;
  ConicSolution sol = make_backend("native")->solve(prob, opts(1e-7));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.x[1] == doctest::Approx(-0.5).epsilon(1e-4));
}
