#pragma once

#include <optional>

#include "bcsynth/conic.hpp"
#include "bcsynth/sos.hpp"

namespace bcsynth {

// Optimization instance: maximize lambda s.t. F_i(a,s) + lambda I <= 0 for
// every form, with parameter bounds ||a||^2 <= l_a, ||s||^2 <= l_s.
// Decision layout: z = (lambda, a_0..a_{m-1}, s_0..s_{n-1}).
struct BmiProblem {
  ConstraintSystem system;
  double l_a = 1.0, l_s = 1.0;

  int m() const { return static_cast<int>(system.a_count()); }
  int n() const { return static_cast<int>(system.s_count()); }
  int dim() const { return 1 + m() + n(); }

  Eigen::VectorXd a_of(const Eigen::VectorXd& z) const { return z.segment(1, m()); }
  Eigen::VectorXd s_of(const Eigen::VectorXd& z) const { return z.segment(1 + m(), n()); }
};

BmiProblem assemble_bmi(ConstraintSystem system, double l_a, double l_s);

// Max over forms of the largest eigenvalue of F_i(a,s) + lambda I;
// <= 0 means z is feasible.
double eval_bmi(const BmiProblem& p, const Eigen::VectorXd& z);
double eval_form(const BilinearMatrixForm& form, const Eigen::VectorXd& z);

// Kronecker reformulation restricted to the bilinearly-coupled coordinates:
// uncoupled z-indices contribute zero rows/columns to M and are dropped.
struct KroneckerForm {
  int form_index = -1;
  int p = 0;
  std::vector<int> coupled;  // global z indices, a block first then s block
  Eigen::MatrixXd M;         // (|coupled| p) x (|coupled| p), [[0, Gamma], [Gamma^T, 0]]
};

KroneckerForm kronecker_m_matrix(const BilinearMatrixForm& form, int form_index);

// Evaluation through the Kronecker form:
//   (zc o I)^T M (zc o I) + sum_k z_k Lin_k + F,
// which must reproduce eval_form entrywise.
Eigen::MatrixXd eval_kronecker(const BilinearMatrixForm& form, const KroneckerForm& kron,
                               const Eigen::VectorXd& z);

struct DcSplit {
  KroneckerForm kron;
  Eigen::MatrixXd M1, M2;     // M = M1 - M2, both psd
  Eigen::MatrixXd N;          // symmetric square root of M1
  std::vector<int> nz_rows;   // rows of N that are not identically zero
  double eig_tol = 1e-10;
};

DcSplit dc_split(KroneckerForm kron, double eig_tol = 1e-10);


// Quadratic parts of the decomposition, as p x p matrix values.
Eigen::MatrixXd bplus_quad(const DcSplit& split, const Eigen::VectorXd& z);
Eigen::MatrixXd bminus_quad(const DcSplit& split, const Eigen::VectorXd& z);
// B+ / B- of the decomposed form (B+ carries the affine part Omega, F).
Eigen::MatrixXd eval_bplus(const BilinearMatrixForm& form, const DcSplit& split,
                           const Eigen::VectorXd& z);
// d(B-)/dz_k at z (zero for uncoupled k).
Eigen::MatrixXd bminus_partial(const DcSplit& split, const Eigen::VectorXd& z, int z_index);

struct ParamBox {
  Eigen::VectorXd lo, hi;  // over the a block only
};

// Convex subproblem data: block LMIs (one per form), the second-order-cone
// regularization, parameter balls, optional node box, linear objective.
struct LmiProblem {
  ConicProblem conic;
  int m = 0, n = 0;
  int t_index = -1;  // regularization slack column, -1 if absent
  std::vector<int> var_of_col;  // conic column -> global z index (t maps to -1)

  struct BlockMeta {
    int form_index;
    int row_offset;
    int p;
    std::string origin;
  };
  std::vector<BlockMeta> blocks;

  // One line per nonzero: form block row col var coeff (var -1 = constant).
  std::string dump() const;
};

// Schur-complement linearization of every form around zk (Eq.-14 shape):
// maximize lambda + (delta/2) t s.t. per-form LMI blocks, t >= ||z - zk||^2,
// ||a||^2 <= l_a, ||s||^2 <= l_s, a in node_box if given.
LmiProblem linearize_at(const BmiProblem& p, const std::vector<DcSplit>& splits,
                        const Eigen::VectorXd& zk, double delta,
                        const std::optional<ParamBox>& node_box);

// LMI obtained by fixing a subset of z (e.g. all s for the Eq.-15 initial
// program, or all a when re-checking a concrete certificate). Every bilinear
// term must have at least one fixed side.
LmiProblem fixed_subset_lmi(const BmiProblem& p, const std::vector<int>& fixed_indices,
                            const Eigen::VectorXd& fixed_values,
                            const std::optional<ParamBox>& node_box);

// Expands an LMI solution back to a full z vector (fixed entries restored).
Eigen::VectorXd expand_solution(const BmiProblem& p, const LmiProblem& lmi,
                                const Eigen::VectorXd& x,
                                const std::vector<int>& fixed_indices,
                                const Eigen::VectorXd& fixed_values);

}  // namespace bcsynth
