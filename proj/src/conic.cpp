#include "bcsynth/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace bcsynth {

int svec_dim(int n) { return n * (n + 1) / 2; }

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

Eigen::VectorXd svec(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd v(svec_dim(n));
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v[k++] = i == j ? X(i, i) : kSqrt2 * X(i, j);
  return v;
}

Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  Eigen::MatrixXd X(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double val = v[k++];
      if (i == j) {
        X(i, i) = val;
      } else {
        X(i, j) = X(j, i) = val / kSqrt2;
      }
    }
  return X;
}

void svec_scatter(const Eigen::MatrixXd& X, double scale, int row_offset, int col,
                  std::vector<Eigen::Triplet<double>>& out) {
  const int n = static_cast<int>(X.rows());
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j, ++k) {
      double val = i == j ? X(i, i) : kSqrt2 * X(i, j);
      val *= scale;
      if (val != 0.0) out.emplace_back(row_offset + k, col, val);
    }
}

int ConeSpec::rows() const {
  int r = zero + nonneg;
  for (int q : soc) r += q;
  for (int s : psd) r += svec_dim(s);
  return r;
}

namespace {

// Projection onto the dual cone of K (zero -> free, others self-dual).
void project_dual_cone(const ConeSpec& cones, Eigen::VectorXd& y) {
  int at = cones.zero;  // zero-cone rows: dual is free, leave untouched
  for (int i = 0; i < cones.nonneg; ++i, ++at) y[at] = std::max(0.0, y[at]);
  for (int q : cones.soc) {
    auto seg = y.segment(at, q);
    double t = seg[0];
    double nrm = q > 1 ? seg.tail(q - 1).norm() : 0.0;
    if (nrm <= t) {
      // inside, keep
    } else if (nrm <= -t) {
      seg.setZero();
    } else {
      double alpha = (t + nrm) / 2.0;
      seg[0] = alpha;
      if (q > 1) seg.tail(q - 1) *= alpha / nrm;
    }
    at += q;
  }
  for (int s : cones.psd) {
    const int d = svec_dim(s);
    Eigen::MatrixXd X = smat(y.segment(at, d), s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X);
    Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd proj =
        eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    y.segment(at, d) = svec(proj);
    at += d;
  }
}

// Distance-like violation of s = b - Ax from K, per block in the max norm.
double cone_violation_of(const ConeSpec& cones, const Eigen::VectorXd& s) {
  double worst = 0.0;
  int at = 0;
  for (int i = 0; i < cones.zero; ++i, ++at) worst = std::max(worst, std::abs(s[at]));
  for (int i = 0; i < cones.nonneg; ++i, ++at) worst = std::max(worst, -s[at]);
  for (int q : cones.soc) {
    double t = s[at];
    double nrm = q > 1 ? s.segment(at + 1, q - 1).norm() : 0.0;
    worst = std::max(worst, nrm - t);
    at += q;
  }
  for (int sd : cones.psd) {
    const int d = svec_dim(sd);
    Eigen::MatrixXd X = smat(s.segment(at, d), sd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X);
    worst = std::max(worst, -eig.eigenvalues().minCoeff());
    at += d;
  }
  return worst;
}

struct Scaling {
  Eigen::VectorXd row;  // D
  Eigen::VectorXd col;  // E
  double bscale = 1.0, cscale = 1.0;
};

// Ruiz equilibration with uniform scaling inside each cone block, so scaled
// slacks stay in their cones.
Scaling equilibrate(Eigen::SparseMatrix<double>& A, Eigen::VectorXd& b, Eigen::VectorXd& c,
                    const ConeSpec& cones) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Scaling sc;
  sc.row = Eigen::VectorXd::Ones(m);
  sc.col = Eigen::VectorXd::Ones(n);

  std::vector<std::pair<int, int>> blocks;  // [start, len) per cone block
  {
    int at = 0;
    for (int i = 0; i < cones.zero; ++i, ++at) blocks.push_back({at, 1});
    for (int i = 0; i < cones.nonneg; ++i, ++at) blocks.push_back({at, 1});
    for (int q : cones.soc) {
      blocks.push_back({at, q});
      at += q;
    }
    for (int s : cones.psd) {
      blocks.push_back({at, svec_dim(s)});
      at += svec_dim(s);
    }
  }

  for (int sweep = 0; sweep < 10; ++sweep) {
    Eigen::VectorXd rmax = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd cmax = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
        double v = std::abs(it.value());
        rmax[it.row()] = std::max(rmax[it.row()], v);
        cmax[it.col()] = std::max(cmax[it.col()], v);
      }
    Eigen::VectorXd dr = Eigen::VectorXd::Ones(m);
    for (auto [start, len] : blocks) {
      double blockmax = 0.0;
      for (int i = 0; i < len; ++i) blockmax = std::max(blockmax, rmax[start + i]);
      double f = blockmax > 1e-12 ? 1.0 / std::sqrt(blockmax) : 1.0;
      for (int i = 0; i < len; ++i) dr[start + i] = f;
    }
    Eigen::VectorXd dc(n);
    for (int j = 0; j < n; ++j) dc[j] = cmax[j] > 1e-12 ? 1.0 / std::sqrt(cmax[j]) : 1.0;

    A = dr.asDiagonal() * A * dc.asDiagonal();
    sc.row = sc.row.cwiseProduct(dr);
    sc.col = sc.col.cwiseProduct(dc);
  }

  b = sc.row.asDiagonal() * b;
  c = sc.col.asDiagonal() * c;
  sc.bscale = std::max(b.norm(), 1e-6);
  sc.cscale = std::max(c.norm(), 1e-6);
  b /= sc.bscale;
  c /= sc.cscale;
  return sc;
}

class AdmmBackend final : public ConicBackend {
 public:
  std::string name() const override { return "native"; }

  ConicSolution solve(const ConicProblem& prob, const SolveOptions& opts) const override {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(clock::now() - t0).count();
    };

    const int n = prob.nvars;
    const int m = prob.cones.rows();
    ConicSolution sol;
    if (static_cast<int>(prob.b.size()) != m || static_cast<int>(prob.c.size()) != n) {
      sol.message = "dimension mismatch between cones and data";
      return sol;
    }

    Eigen::SparseMatrix<double> A(m, n);
    A.setFromTriplets(prob.entries.begin(), prob.entries.end());
    Eigen::VectorXd b = prob.b, c = prob.c;
    Scaling sc = equilibrate(A, b, c, prob.cones);
    Eigen::SparseMatrix<double> At = A.transpose();

    // Factor I + A^T A once; (I+Q) solves reduce to it.
    Eigen::MatrixXd normal = Eigen::MatrixXd(At * A);
    normal.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) {
      sol.message = "normal-matrix factorization failed";
      return sol;
    }

    auto solve_M = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
                       Eigen::VectorXd& p, Eigen::VectorXd& q) {
      p = llt.solve(r1 - At * r2);
      q = r2 + A * p;
    };

    Eigen::VectorXd h(n + m);
    h << c, b;
    Eigen::VectorXd gx(n), gy(m);
    solve_M(h.head(n), h.tail(m), gx, gy);
    Eigen::VectorXd g(n + m);
    g << gx, gy;
    const double g_dot_h = 1.0 + h.dot(g);

    auto solve_IQ = [&](const Eigen::VectorXd& wx, const Eigen::VectorXd& wy, double wtau,
                        Eigen::VectorXd& ox, Eigen::VectorXd& oy, double& otau) {
      Eigen::VectorXd r1 = wx - wtau * c;
      Eigen::VectorXd r2 = wy - wtau * b;
      Eigen::VectorXd px(n), py(m);
      solve_M(r1, r2, px, py);
      double corr = (h.head(n).dot(px) + h.tail(m).dot(py)) / g_dot_h;
      ox = px - corr * gx;
      oy = py - corr * gy;
      otau = wtau + c.dot(ox) + b.dot(oy);
    };

    Eigen::VectorXd ux = Eigen::VectorXd::Zero(n), uy = Eigen::VectorXd::Zero(m);
    double utau = 1.0;
    Eigen::VectorXd vy = Eigen::VectorXd::Zero(m);
    double vkappa = 1.0;

    const double alpha = 1.5;
    const double bnorm = prob.b.norm(), cnorm = prob.c.norm();

    auto unscale_x = [&](const Eigen::VectorXd& xs) -> Eigen::VectorXd {
      return sc.bscale * sc.col.asDiagonal() * xs;
    };
    auto unscale_y = [&](const Eigen::VectorXd& ys) -> Eigen::VectorXd {
      return sc.cscale * sc.row.asDiagonal() * ys;
    };
    auto unscale_s = [&](const Eigen::VectorXd& ss) -> Eigen::VectorXd {
      return sc.bscale * sc.row.cwiseInverse().asDiagonal() * ss;
    };

    Eigen::SparseMatrix<double> A0(m, n);
    A0.setFromTriplets(prob.entries.begin(), prob.entries.end());

    double best_max_res = std::numeric_limits<double>::infinity();
    ConicSolution best;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      Eigen::VectorXd tx(n), ty(m);
      double ttau;
      solve_IQ(ux, uy + vy, utau + vkappa, tx, ty, ttau);

      // over-relaxed point
      Eigen::VectorXd rx = alpha * tx + (1 - alpha) * ux;
      Eigen::VectorXd ry = alpha * ty + (1 - alpha) * uy;
      double rtau = alpha * ttau + (1 - alpha) * utau;

      ux = rx;  // free block: projection is the identity
      uy = ry - vy;
      project_dual_cone(prob.cones, uy);
      double newtau = std::max(0.0, rtau - vkappa);

      vy += uy - ry;
      vkappa += newtau - rtau;
      utau = newtau;

      if (it % 25 != 0 && it + 1 != opts.max_iterations) continue;

      if (utau > 1e-9) {
        Eigen::VectorXd xhat = unscale_x(ux / utau);
        Eigen::VectorXd yhat = unscale_y(uy / utau);
        Eigen::VectorXd shat = unscale_s(vy / utau);
        double pri = (A0 * xhat + shat - prob.b).norm() / (1.0 + bnorm);
        double dua = (A0.transpose() * yhat + prob.c).norm() / (1.0 + cnorm);
        double pobj = prob.c.dot(xhat);
        double dobj = -prob.b.dot(yhat);
        double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        double max_res = std::max({pri, dua, gap});
        if (max_res < best_max_res) {
          best_max_res = max_res;
          best.x = xhat;
          best.objective = pobj;
          best.primal_res = pri;
          best.dual_res = dua;
          best.gap = gap;
        }
        if (max_res <= opts.tol) {
          best.status = SolveStatus::Optimal;
          best.iterations = it + 1;
          return best;
        }
      } else {
        // Homogeneous certificates.
        Eigen::VectorXd yhat = unscale_y(uy);
        Eigen::VectorXd xhat = unscale_x(ux);
        Eigen::VectorXd shat = unscale_s(vy);
        double by = prob.b.dot(yhat);
        double cx = prob.c.dot(xhat);
        if (by < -1e-12 &&
            (A0.transpose() * yhat).norm() <= -by * 1e-6 / std::max(1.0, bnorm)) {
          sol.status = SolveStatus::Infeasible;
          sol.iterations = it + 1;
          sol.message = "primal infeasibility certificate";
          return sol;
        }
        if (cx < -1e-12 && (A0 * xhat + shat).norm() <= -cx * 1e-6 / std::max(1.0, cnorm)) {
          sol.status = SolveStatus::Failed;
          sol.iterations = it + 1;
          sol.message = "unbounded objective (dual infeasibility certificate)";
          return sol;
        }
      }

      if (elapsed() > opts.time_limit_sec) break;
      if (!ux.allFinite() || !vy.allFinite()) {
        sol.message = "iterates diverged";
        return sol;
      }
    }

    if (best_max_res < 1e-3) {
      best.status = SolveStatus::Inaccurate;
      best.iterations = it;
      best.message = "residual tolerance not reached";
      return best;
    }
    sol.status = SolveStatus::Failed;
    sol.iterations = it;
    sol.message = "no acceptable point within budget";
    return sol;
  }
};

}  // namespace

std::unique_ptr<ConicBackend> make_backend(const std::string& name) {
  if (name == "native" || name == "admm" || name.empty())
    return std::make_unique<AdmmBackend>();
  throw std::invalid_argument("unknown backend '" + name + "' (available: native)");
}

double conic_violation(const ConicProblem& prob, const Eigen::VectorXd& x) {
  Eigen::SparseMatrix<double> A(prob.cones.rows(), prob.nvars);
  A.setFromTriplets(prob.entries.begin(), prob.entries.end());
  Eigen::VectorXd s = prob.b - A * x;
  return cone_violation_of(prob.cones, s);
}

}  // namespace bcsynth
