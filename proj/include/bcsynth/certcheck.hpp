#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bcsynth/problem.hpp"

namespace bcsynth {

struct Certificate {
  Poly B;
  std::map<std::string, Rat> a_values;  // provenance: the synthesized a-point
  unsigned lie_order = 1;
  std::string source;  // "initial-solution", "dcp-trace", "sample", "user"
  double lambda = 0.0;
};

struct ConditionVerdict {
  std::string name;
  bool pass = true;
  bool vacuous = false;  // region ∩ box produced no sample points
  std::size_t samples = 0;
  // Worst sampled value of the checked expression and where it occurred.
  double worst = 0.0;
  std::vector<double> witness;
  std::string method = "sampled";
};

struct ValidationReport {
  bool pass = false;
  std::vector<ConditionVerdict> conditions;
  std::string summary() const;
};

struct ValidateOptions {
  std::size_t n_samples = 100000;
  double margin = 1e-7;         // slack allowed on <=-0 style conditions
  double margin_strict = 1e-7;  // required positivity of B on the unsafe set
  double eq_tol = 1e-5;         // shell half-width for equality sets
  std::uint64_t seed = 20210415;
};

// Posterior sampling check of the three certificate conditions; consecution
// is checked per order on the |L^j B| <= eq_tol shell. Any violation carries
// a witness point. Empty regions yield a vacuous pass with a warning flag.
ValidationReport validate(const ProblemSpec& spec, const Certificate& cert,
                          const ValidateOptions& opts);

// Pointwise tolerance semantics of the two consecution characterizations;
// they must agree at every sampled point on concrete certificates.
bool def4_consecution_pred(const std::vector<Poly>& lies, const Eigen::VectorXd& x,
                           double eq_tol);
bool invariant_condition_pred(const std::vector<Poly>& lies, const Eigen::VectorXd& x,
                              double eq_tol);

// Classical fixed-step RK4; aborts when the state norm exceeds 1e9 and
// returns the truncated prefix.
std::vector<Eigen::VectorXd> simulate_trajectory(const VectorField& f,
                                                 const Eigen::VectorXd& x0, double step,
                                                 std::size_t steps);

std::string trajectory_csv(const VectorField& f, const Poly& B,
                           const std::vector<Eigen::VectorXd>& traj, double step);

// SMT-LIB2 scripts asserting the negation of each certificate condition over
// the reals; unsat answers certify the conditions. One script per condition:
// {"initial", "consecution", "separation"}.
std::vector<std::pair<std::string, std::string>> export_smt(const ProblemSpec& spec,
                                                            const Certificate& cert);

// Uniform + walk-based sampling of {all polys <= 0} ∩ box.
std::vector<Eigen::VectorXd> sample_region(const std::vector<Poly>& leqs,
                                           const std::vector<Interval>& box,
                                           std::size_t want, std::mt19937_64& rng);

}  // namespace bcsynth
