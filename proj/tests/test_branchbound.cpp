#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcsynth/bnb.hpp"
#include "bcsynth/parse.hpp"

using namespace bcsynth;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "tests/fixtures"
#endif

namespace {

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

Box make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Box b;
  b.lo = Eigen::VectorXd(static_cast<int>(lo.size()));
  b.hi = Eigen::VectorXd(static_cast<int>(hi.size()));
  int i = 0;
  for (double v : lo) b.lo[i++] = v;
  i = 0;
  for (double v : hi) b.hi[i++] = v;
  return b;
}

}  // namespace

TEST_CASE("bisect splits the widest edge at its midpoint") {
  auto [l, r] = bisect(make_box({0, 0}, {1, 4}));
  CHECK(l.lo[1] == 0);
  CHECK(l.hi[1] == 2);
  CHECK(r.lo[1] == 2);
  CHECK(r.hi[1] == 4);
  CHECK(l.lo[0] == 0);
  CHECK(l.hi[0] == 1);
}

TEST_CASE("bisect tie-breaks toward the lowest coordinate") {
  auto [l, r] = bisect(make_box({0, 0}, {1, 1}));
  CHECK(l.hi[0] == doctest::Approx(0.5));
  CHECK(l.hi[1] == 1.0);
  CHECK(r.lo[0] == doctest::Approx(0.5));
}

TEST_CASE("repeated bisection shrinks the widest edge geometrically") {
  // After d rounds across m coordinates the widest edge is at most
  // initial / 2^floor(d/m); checked by enumeration to depth 6.
  const int m = 2;
  std::vector<Box> level{make_box({0, 0}, {1, 1})};
  for (int depth = 1; depth <= 6; ++depth) {
    std::vector<Box> next;
    for (const auto& b : level) {
      auto [l, r] = bisect(b);
      next.push_back(l);
      next.push_back(r);
    }
    level = std::move(next);
    double bound = 1.0 / std::pow(2.0, depth / m);
    for (const auto& b : level) CHECK(b.widest_edge() <= bound + 1e-12);
  }
}

TEST_CASE("root box is the bounding box of the parameter ball") {
  Box root = Box::root_of_ball(3, 4.0);  // ||a||^2 <= 4 -> radius 2
  CHECK(root.dim() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(root.lo[i] == doctest::Approx(-2.0));
    CHECK(root.hi[i] == doctest::Approx(2.0));
  }
  CHECK(root.contains(Eigen::VectorXd::Zero(3)));
  CHECK(!root.contains(Eigen::VectorXd::Constant(3, 2.5)));
  CHECK(root.contains(Eigen::VectorXd::Constant(3, 2.1), 0.2));
}

TEST_CASE("1-parameter instance with a known valid interval") {
  // Dense grid oracle over a: B = a*x1 - 1 for dx/dt = -x1,
  // X0 = {(x1-1)^2 <= 0.01}, Xu = {x1 >= 2} inside the box [0, 4].
  ProblemSpec spec = load_problem(fixture("interval.json"));
  ConstraintSystem sys = build_constraints(spec);
  BmiProblem bmi = assemble_bmi(sys, spec.l_a, spec.l_s);

  ValidateOptions vopts;
  vopts.n_samples = 4000;
  double lo = 10, hi = -10;
  for (double a = -2.0; a <= 2.0; a += 0.01) {
    Eigen::VectorXd av(1);
    av << a;
    Certificate cert = certificate_at(spec, sys, av, "grid");
    ValidationReport rep = validate(spec, cert, vopts);
    if (rep.pass) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  // The oracle interval is roughly (0.505, 0.909): B <= 0 on X0 needs
  // a <= 1/1.1, B >= eps on [2,4] needs a >= (1+eps)/2.
  REQUIRE(lo < hi);
  CHECK(lo == doctest::Approx(0.505).epsilon(0.05));
  CHECK(hi == doctest::Approx(0.909).epsilon(0.05));
  double width = hi - lo;
  REQUIRE(spec.bnb.eta < width);  // Thm-9 style granularity premise

  auto backend = make_backend("native");
  auto splits = dc_splits_of(bmi);
  SearchContext ctx{spec,  bmi,
                    splits, bmi.system.template_poly,
                    *backend, 99,
                    Deadline::in(60), vopts};
  SearchResult result = search(ctx);
  REQUIRE(result.certificate.has_value());
  double a_found = to_double(result.certificate->a_values.at("a"));
  CHECK(a_found >= lo - 0.02);
  CHECK(a_found <= hi + 0.02);
  CHECK(result.report.pass);

  // Node-bound respect: solving restricted to a sub-box keeps iterates inside.
  ParamBox node{Eigen::VectorXd::Constant(1, 0.6), Eigen::VectorXd::Constant(1, 0.8)};
  std::mt19937_64 rng(5);
  InitialSolution init =
      initial_solution(bmi, spec.dcp, *backend, rng, node, Deadline::in(30));
  IterateTrace trace =
      bmi_dc(bmi, splits, init.z, spec.dcp, *backend, node, Deadline::in(30));
  for (const auto& pt : trace.points) {
    double a = bmi.a_of(pt.z)[0];
    CHECK(a >= 0.6 - 1e-6);
    CHECK(a <= 0.8 + 1e-6);
  }
}

TEST_CASE("overlapping initial and unsafe sets exhaust to granularity") {
  ProblemSpec spec = load_problem(fixture("overlap.json"));
  ConstraintSystem sys = build_constraints(spec);
  BmiProblem bmi = assemble_bmi(sys, spec.l_a, spec.l_s);
  auto backend = make_backend("native");
  auto splits = dc_splits_of(bmi);
  ValidateOptions vopts;
  vopts.n_samples = 2000;
  SearchContext ctx{spec,  bmi,
                    splits, bmi.system.template_poly,
                    *backend, 3,
                    Deadline::in(60), vopts};
  SearchResult result = search(ctx);
  CHECK(!result.certificate.has_value());
  CHECK(result.failure_reason.find("granularity") != std::string::npos);
  CHECK(result.stats.nodes > 1);  // actually recursed before giving up
}
