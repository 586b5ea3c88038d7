#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "bcsynth/param.hpp"
#include "bcsynth/problem.hpp"

namespace bcsynth {

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One SOS constraint "h(a,s,x) is SOS", held as the Gram matrix Q with
// b^T Q b = h over the monomial basis b. The matrix constraint fed to the
// optimizer is F(a,s) = -Q(a,s) <= 0.
struct GramForm {
  enum class Kind { Initial, Consecution, Separation, MultiplierPsd };

  Kind kind = Kind::Initial;
  int consec_order = 0;  // i for consecution forms
  std::string origin;
  std::vector<Monomial> basis;
  std::vector<ParamExpr> q;  // p*p row-major, symmetric
  ParamPoly h;

  int p() const { return static_cast<int>(basis.size()); }
  const ParamExpr& at(int i, int j) const { return q[i * p() + j]; }
  ParamExpr& at(int i, int j) { return q[i * p() + j]; }
};

// Constant matrices of the flattened constraint
//   F + sum_i a_i H_i + sum_j s_j G_j + sum_ij a_i s_j F_ij  <= 0.
// Only nonzero coefficient matrices are stored; m and n are the global
// parameter counts so the layout is identical across forms.
struct BilinearMatrixForm {
  int p = 0, m = 0, n = 0;
  std::string origin;
  Eigen::MatrixXd F;
  std::map<int, Eigen::MatrixXd> H;
  std::map<int, Eigen::MatrixXd> G;
  std::map<std::pair<int, int>, Eigen::MatrixXd> Fij;

  Eigen::MatrixXd eval(const Eigen::VectorXd& a, const Eigen::VectorXd& s) const;
};

struct SosMultiplier {
  std::string name;
  int form = -1;  // owning principal form
  std::vector<Monomial> basis;
  std::vector<int> entry_s;  // packed upper triangle (row-major i<=j) -> s index
  ParamPoly poly;            // b^T S b as an s-affine ParamPoly

  int p() const { return static_cast<int>(basis.size()); }
};

struct FreeMultiplier {
  std::string name;
  int form = -1;
  std::vector<Monomial> monos;
  std::vector<int> coeff_s;
  ParamPoly poly;
};

struct ConstraintSystem {
  VarList vars;
  ParamTable params;
  Encoding encoding = Encoding::Sufficient;
  ParamPoly template_poly;       // B(a, x)
  std::vector<ParamPoly> lies;   // L^0 B .. L^N B
  std::vector<GramForm> grams;   // principal forms first, psd side-conditions after
  std::vector<BilinearMatrixForm> forms;  // flattened, parallel to grams
  std::vector<SosMultiplier> sos_multipliers;
  std::vector<FreeMultiplier> free_multipliers;
  int principal_count = 0;

  std::size_t a_count() const { return params.a_count(); }
  std::size_t s_count() const { return params.s_count(); }
};

// Gram-matrix coefficient matching over the given basis. Underdetermined
// monomials get fresh null-space parameters appended to the s group;
// off-diagonal mass is split symmetrically.
GramForm gram_decompose(const ParamPoly& h, std::vector<Monomial> basis, ParamTable& table,
                        int form_index, const std::string& origin);

// Symbolic b^T Q b, for exactness checks against the matched polynomial.
ParamPoly gram_reconstruct(const GramForm& form, const VarList& vars);

BilinearMatrixForm flatten_bilinear(const GramForm& form, int m, int n);

ConstraintSystem build_sufficient_constraints(const ProblemSpec& spec);
ConstraintSystem build_necessary_constraints(const ProblemSpec& spec, const Rat& ball_radius);
ConstraintSystem build_constraints(const ProblemSpec& spec);

// Text dump of every form's coefficient-expression matrix (golden-file aid).
std::string dump_forms(const ConstraintSystem& system);

}  // namespace bcsynth
