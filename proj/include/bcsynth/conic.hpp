#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace bcsynth {

// Cone program in the form
//   minimize c^T x   s.t.   b - A x in K,
// where K stacks, in row order: {0}^zero, R+^nonneg, second-order cones of
// the listed sizes, then PSD cones given by matrix side (rows in scaled-svec
// layout, sqrt(2) on off-diagonal entries).
struct ConeSpec {
  int zero = 0;
  int nonneg = 0;
  std::vector<int> soc;
  std::vector<int> psd;

  int rows() const;
};

struct ConicProblem {
  int nvars = 0;
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  ConeSpec cones;
};

enum class SolveStatus { Optimal, Infeasible, Inaccurate, Failed };

struct ConicSolution {
  SolveStatus status = SolveStatus::Failed;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double primal_res = 0.0, dual_res = 0.0, gap = 0.0;
  std::string message;
};

struct SolveOptions {
  double tol = 1e-7;
  int max_iterations = 60000;
  double time_limit_sec = 60.0;
};

// Backend contract: one capability (LMI + second-order cone + linear
// objective). Implementations must be reentrant; branch-and-bound workers
// solve distinct problems concurrently.
class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution solve(const ConicProblem& problem, const SolveOptions& opts) const = 0;
};

// Native backend: operator-splitting (ADMM) on the homogeneous self-dual
// embedding, with Ruiz equilibration and over-relaxation.
std::unique_ptr<ConicBackend> make_backend(const std::string& name);

// Largest constraint violation of x: max over cone blocks of the distance to
// K evaluated on b - A x (eigenvalue-based for PSD blocks). Used to
// re-verify solutions independent of the solver's own bookkeeping.
double conic_violation(const ConicProblem& problem, const Eigen::VectorXd& x);

// svec helpers shared by the LMI assembly and the backend.
int svec_dim(int n);
void svec_scatter(const Eigen::MatrixXd& X, double scale, int row_offset, int col,
                  std::vector<Eigen::Triplet<double>>& out);
Eigen::VectorXd svec(const Eigen::MatrixXd& X);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n);

}  // namespace bcsynth
