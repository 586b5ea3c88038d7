#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcsynth/param.hpp"
#include "bcsynth/poly.hpp"

namespace bcsynth {

struct ProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Encoding { Sufficient, Necessary };

struct TemplateConfig {
  enum class Mode { FullDegree, Explicit };
  Mode mode = Mode::FullDegree;
  unsigned degree = 1;    // full-degree mode
  std::string poly_text;  // explicit mode
};

struct DcpConfig {
  double delta = -1e-3;  // regularization, must be negative
  double conv_tol = 1e-6;
  int max_iter = 100;
  // Success threshold on lambda; the optimum of a boundary-feasible problem
  // is exactly 0, so the check tolerates solver round-off. The posterior
  // validation remains the gate on any certificate this admits.
  double lambda_tol = 1e-6;
  std::optional<double> init_c;  // fixed Eq.-15 constant; unset = auto policy
};

struct BnbConfig {
  double eta = 0.1;  // granularity: abort a node when its widest edge < eta
  int samples = 16;
  int max_depth = 0;  // 0 = derived default
  int workers = 1;
};

struct Interval {
  double lo = 0, hi = 0;
};

struct ProblemSpec {
  std::string name;
  VarList vars;
  VectorField field;
  std::vector<Poly> init;    // X0 = {all <= 0}
  std::vector<Poly> unsafe;  // Xu = {all <= 0}
  std::vector<Interval> domain_box;  // sampling/plotting only, never encoded
  TemplateConfig tmpl;
  unsigned lie_order = 1;
  unsigned multiplier_degree = 1;
  unsigned sos_degree = 2;  // even cap on assembled constraint degrees
  std::map<std::string, unsigned> sos_degree_overrides;  // initial/consecution/separation
  Rat sep_margin = Rat(1, 100);
  Encoding encoding = Encoding::Sufficient;
  std::optional<Rat> ball_radius;  // L in the necessary encoding
  double l_a = 1.0, l_s = 1.0;     // squared-norm parameter bounds
  bool strict_order = false;       // strengthened consecution on the top order
  DcpConfig dcp;
  BnbConfig bnb;
};

ProblemSpec load_problem(const std::string& path);
ProblemSpec parse_problem_json(const std::string& text, const std::string& name);
std::string problem_to_json(const ProblemSpec& spec);

// Full-degree mode yields one fresh parameter per basis monomial; explicit
// mode parses the given expression, which must be affine in each parameter.
ParamPoly instantiate_template(const TemplateConfig& cfg, const VarList& vars,
                               ParamTable& table);

// Exact substitution by parameter name; every parameter occurring in p must
// be assigned.
Poly substitute_params(const ParamPoly& p, const ParamTable& table,
                       const std::map<std::string, Rat>& values);

}  // namespace bcsynth
