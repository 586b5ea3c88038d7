#include "bcsynth/bmi.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace bcsynth {

BmiProblem assemble_bmi(ConstraintSystem system, double l_a, double l_s) {
  if (system.forms.empty()) throw EncodeError("empty constraint system");
  BmiProblem p;
  p.system = std::move(system);
  p.l_a = l_a;
  p.l_s = l_s;
  return p;
}

double eval_form(const BilinearMatrixForm& form, const Eigen::VectorXd& z) {
  Eigen::VectorXd a = z.segment(1, form.m);
  Eigen::VectorXd s = z.segment(1 + form.m, form.n);
  Eigen::MatrixXd B = form.eval(a, s);
  B.diagonal().array() += z[0];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

double eval_bmi(const BmiProblem& p, const Eigen::VectorXd& z) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& form : p.system.forms) worst = std::max(worst, eval_form(form, z));
  return worst;
}

KroneckerForm kronecker_m_matrix(const BilinearMatrixForm& form, int form_index) {
  KroneckerForm k;
  k.form_index = form_index;
  k.p = form.p;

  std::set<int> a_used, s_used;
  for (const auto& [ij, mat] : form.Fij) {
    (void)mat;
    a_used.insert(ij.first);
    s_used.insert(ij.second);
  }
  for (int ai : a_used) k.coupled.push_back(1 + ai);
  for (int sj : s_used) k.coupled.push_back(1 + form.m + sj);

  const int c = static_cast<int>(k.coupled.size());
  const int ca = static_cast<int>(a_used.size());
  k.M = Eigen::MatrixXd::Zero(c * k.p, c * k.p);
  std::map<int, int> a_pos, s_pos;
  {
    int at = 0;
    for (int ai : a_used) a_pos[ai] = at++;
    for (int sj : s_used) s_pos[sj] = at++;
  }
  for (const auto& [ij, mat] : form.Fij) {
    int r = a_pos[ij.first];
    int col = s_pos[ij.second];
    k.M.block(r * k.p, col * k.p, k.p, k.p) += 0.5 * mat;
    k.M.block(col * k.p, r * k.p, k.p, k.p) += 0.5 * mat.transpose();
  }
  (void)ca;
  return k;
}

Eigen::MatrixXd eval_kronecker(const BilinearMatrixForm& form, const KroneckerForm& kron,
                               const Eigen::VectorXd& z) {
  const int p = form.p;
  const int c = static_cast<int>(kron.coupled.size());
  Eigen::MatrixXd out = form.F;
  for (const auto& [i, Hi] : form.H) out += z[1 + i] * Hi;
  for (const auto& [j, Gj] : form.G) out += z[1 + form.m + j] * Gj;
  for (int kb = 0; kb < c; ++kb)
    for (int lb = 0; lb < c; ++lb) {
      double zk = z[kron.coupled[kb]];
      double zl = z[kron.coupled[lb]];
      if (zk == 0.0 || zl == 0.0) continue;
      out += zk * zl * kron.M.block(kb * p, lb * p, p, p);
    }
  return out;
}

DcSplit dc_split(KroneckerForm kron, double eig_tol) {
  DcSplit split;
  split.eig_tol = eig_tol;
  const int dim = static_cast<int>(kron.M.rows());
  split.M1 = Eigen::MatrixXd::Zero(dim, dim);
  split.M2 = Eigen::MatrixXd::Zero(dim, dim);
  split.N = Eigen::MatrixXd::Zero(dim, dim);
  if (dim > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kron.M);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("eigendecomposition failed in dc_split");
    Eigen::VectorXd d = eig.eigenvalues();
    for (int i = 0; i < dim; ++i)
      if (std::abs(d[i]) < eig_tol) d[i] = 0.0;
    Eigen::VectorXd dpos = d.cwiseMax(0.0);
    Eigen::VectorXd dneg = dpos - d;
    const Eigen::MatrixXd& V = eig.eigenvectors();
    split.M1 = V * dpos.asDiagonal() * V.transpose();
    split.M2 = V * dneg.asDiagonal() * V.transpose();
    split.N = V * dpos.cwiseSqrt().asDiagonal() * V.transpose();
    for (int r = 0; r < dim; ++r)
      if (split.N.row(r).lpNorm<Eigen::Infinity>() > eig_tol) split.nz_rows.push_back(r);
  }
  split.kron = std::move(kron);
  return split;
}


namespace {

Eigen::MatrixXd quad_of(const Eigen::MatrixXd& Mq, const KroneckerForm& kron,
                        const Eigen::VectorXd& z) {
  const int p = kron.p;
  const int c = static_cast<int>(kron.coupled.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  for (int kb = 0; kb < c; ++kb)
    for (int lb = 0; lb < c; ++lb) {
      double w = z[kron.coupled[kb]] * z[kron.coupled[lb]];
      if (w != 0.0) out += w * Mq.block(kb * p, lb * p, p, p);
    }
  return out;
}

}  // namespace

Eigen::MatrixXd bplus_quad(const DcSplit& split, const Eigen::VectorXd& z) {
  return quad_of(split.M1, split.kron, z);
}

Eigen::MatrixXd bminus_quad(const DcSplit& split, const Eigen::VectorXd& z) {
  return quad_of(split.M2, split.kron, z);
}

Eigen::MatrixXd eval_bplus(const BilinearMatrixForm& form, const DcSplit& split,
                           const Eigen::VectorXd& z) {
  Eigen::MatrixXd out = form.F;
  for (const auto& [i, Hi] : form.H) out += z[1 + i] * Hi;
  for (const auto& [j, Gj] : form.G) out += z[1 + form.m + j] * Gj;
  out += bplus_quad(split, z);
  return out;
}

Eigen::MatrixXd bminus_partial(const DcSplit& split, const Eigen::VectorXd& z, int z_index) {
  const int p = split.kron.p;
  const int c = static_cast<int>(split.kron.coupled.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  for (int kb = 0; kb < c; ++kb) {
    if (split.kron.coupled[kb] != z_index) continue;
    for (int lb = 0; lb < c; ++lb) {
      double zl = z[split.kron.coupled[lb]];
      if (zl == 0.0) continue;
      Eigen::MatrixXd blk = split.M2.block(kb * p, lb * p, p, p);
      out += zl * (blk + blk.transpose());
    }
  }
  return out;
}

namespace {

struct LmiBuilder {
  const BmiProblem& p;
  LmiProblem lmi;
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> bvals;
  int row = 0;

  explicit LmiBuilder(const BmiProblem& prob) : p(prob) {}

  void nonneg_row(double rhs, const std::vector<std::pair<int, double>>& coefs) {
    // rhs - sum coef*w >= 0
    bvals.push_back(rhs);
    for (auto [colv, cf] : coefs)
      if (cf != 0.0) triplets.emplace_back(row, colv, cf);
    ++row;
    lmi.conic.cones.nonneg += 1;
  }

  // ||w_cols - shift|| <= radius_expr where radius_expr = r0 - sum rc*w.
  void soc_ball(double r0, const std::vector<std::pair<int, double>>& rcoefs,
                const std::vector<int>& cols, const Eigen::VectorXd& shift) {
    bvals.push_back(r0);
    for (auto [colv, cf] : rcoefs)
      if (cf != 0.0) triplets.emplace_back(row, colv, cf);
    ++row;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      bvals.push_back(-shift[static_cast<int>(i)]);
      triplets.emplace_back(row, cols[i], -1.0);
      ++row;
    }
    lmi.conic.cones.soc.push_back(static_cast<int>(cols.size()) + 1);
  }

  // Rotated-cone encoding of t >= ||w_cols - shift||^2 as a standard SOC.
  void soc_quad_slack(int t_col, const std::vector<int>& cols, const Eigen::VectorXd& shift) {
    bvals.push_back(0.5);
    triplets.emplace_back(row, t_col, -0.5);
    ++row;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      bvals.push_back(-shift[static_cast<int>(i)]);
      triplets.emplace_back(row, cols[i], -1.0);
      ++row;
    }
    bvals.push_back(-0.5);
    triplets.emplace_back(row, t_col, -0.5);
    ++row;
    lmi.conic.cones.soc.push_back(static_cast<int>(cols.size()) + 2);
  }

  // Block constraint A0 + sum_k w_k Ak <= 0.
  void psd_block(int form_index, const std::string& origin, const Eigen::MatrixXd& A0,
                 const std::vector<std::pair<int, Eigen::MatrixXd>>& var_coefs) {
    const int pdim = static_cast<int>(A0.rows());
    lmi.blocks.push_back({form_index, row, pdim, origin});
    Eigen::VectorXd b0 = svec(-A0);
    for (int k = 0; k < b0.size(); ++k) bvals.push_back(b0[k]);
    for (const auto& [colv, Ak] : var_coefs) svec_scatter(Ak, 1.0, row, colv, triplets);
    row += svec_dim(pdim);
    lmi.conic.cones.psd.push_back(pdim);
  }

  void finalize(const Eigen::VectorXd& c) {
    lmi.conic.nvars = static_cast<int>(c.size());
    lmi.conic.c = c;
    lmi.conic.b = Eigen::Map<Eigen::VectorXd>(bvals.data(), static_cast<int>(bvals.size()));
    lmi.conic.entries = std::move(triplets);
  }
};

}  // namespace

LmiProblem linearize_at(const BmiProblem& p, const std::vector<DcSplit>& splits,
                        const Eigen::VectorXd& zk, double delta,
                        const std::optional<ParamBox>& node_box) {
  if (static_cast<std::size_t>(zk.size()) != static_cast<std::size_t>(p.dim()))
    throw std::invalid_argument("linearize_at: zk dimension mismatch");
  if (splits.size() != p.system.forms.size())
    throw std::invalid_argument("linearize_at: one DC split per form required");

  const int m = p.m(), n = p.n();
  const int nvars = 1 + m + n + 1;  // (lambda, a, s, t)
  LmiBuilder b(p);
  b.lmi.m = m;
  b.lmi.n = n;
  b.lmi.t_index = 1 + m + n;
  b.lmi.var_of_col.resize(nvars);
  for (int i = 0; i < 1 + m + n; ++i) b.lmi.var_of_col[i] = i;
  b.lmi.var_of_col[b.lmi.t_index] = -1;

  // Node box rows first (nonneg cone), then balls and the regularization
  // cone, then the PSD blocks.
  if (node_box) {
    for (int i = 0; i < m; ++i) {
      b.nonneg_row(node_box->hi[i], {{1 + i, 1.0}});    // hi - a_i >= 0
      b.nonneg_row(-node_box->lo[i], {{1 + i, -1.0}});  // a_i - lo >= 0
    }
  }

  std::vector<int> a_cols(m), s_cols(n), z_cols(1 + m + n);
  for (int i = 0; i < m; ++i) a_cols[i] = 1 + i;
  for (int j = 0; j < n; ++j) s_cols[j] = 1 + m + j;
  for (int i = 0; i < 1 + m + n; ++i) z_cols[i] = i;

  if (m > 0) b.soc_ball(std::sqrt(p.l_a), {}, a_cols, Eigen::VectorXd::Zero(m));
  if (n > 0) b.soc_ball(std::sqrt(p.l_s), {}, s_cols, Eigen::VectorXd::Zero(n));
  b.soc_quad_slack(b.lmi.t_index, z_cols, zk);

  for (std::size_t f = 0; f < p.system.forms.size(); ++f) {
    const auto& form = p.system.forms[f];
    const auto& split = splits[f];
    const int pdim = form.p;
    const int r = static_cast<int>(split.nz_rows.size());

    // Bottom-right affine part C(z).
    Eigen::MatrixXd C0 = form.F - bminus_quad(split, zk);
    std::vector<std::pair<int, Eigen::MatrixXd>> coefs;
    std::map<int, Eigen::MatrixXd> lin;
    lin[0] = Eigen::MatrixXd::Identity(pdim, pdim);  // lambda I
    for (const auto& [i, Hi] : form.H) lin[1 + i] = Hi;
    for (const auto& [j, Gj] : form.G) lin[1 + m + j] = Gj;
    for (int zi : split.kron.coupled) {
      Eigen::MatrixXd Dk = bminus_partial(split, zk, zi);
      C0 += zk[zi] * Dk;
      auto it = lin.find(zi);
      if (it == lin.end())
        lin[zi] = -Dk;
      else
        it->second -= Dk;
    }

    if (r == 0) {
      coefs.reserve(lin.size());
      for (auto& [zi, mat] : lin) coefs.emplace_back(zi, std::move(mat));
      b.psd_block(static_cast<int>(f), form.origin, C0, coefs);
      continue;
    }

    // Schur block [[-I, W(z)], [W(z)^T, C(z)]] with W(z) = (N (z o I))
    // restricted to the nonzero rows of N.
    const int dim = r + pdim;
    Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(dim, dim);
    A0.topLeftCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
    A0.bottomRightCorner(pdim, pdim) = C0;

    std::map<int, Eigen::MatrixXd> blockcoef;
    for (auto& [zi, mat] : lin) {
      Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
      full.bottomRightCorner(pdim, pdim) = mat;
      blockcoef.emplace(zi, std::move(full));
    }
    const int c = static_cast<int>(split.kron.coupled.size());
    for (int kb = 0; kb < c; ++kb) {
      int zi = split.kron.coupled[kb];
      Eigen::MatrixXd W = Eigen::MatrixXd::Zero(r, pdim);
      for (int rr = 0; rr < r; ++rr)
        W.row(rr) = split.N.row(split.nz_rows[rr]).segment(kb * pdim, pdim);
      auto [it, inserted] = blockcoef.emplace(zi, Eigen::MatrixXd::Zero(dim, dim));
      it->second.topRightCorner(r, pdim) += W;
      it->second.bottomLeftCorner(pdim, r) += W.transpose();
    }
    coefs.reserve(blockcoef.size());
    for (auto& [zi, mat] : blockcoef) coefs.emplace_back(zi, std::move(mat));
    b.psd_block(static_cast<int>(f), form.origin, A0, coefs);
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvars);
  c[0] = -1.0;                       // maximize lambda
  c[b.lmi.t_index] = -0.5 * delta;   // delta < 0: penalize step length
  b.finalize(c);
  return b.lmi;
}

LmiProblem fixed_subset_lmi(const BmiProblem& p, const std::vector<int>& fixed_indices,
                            const Eigen::VectorXd& fixed_values,
                            const std::optional<ParamBox>& node_box) {
  const int m = p.m(), n = p.n();
  const int zdim = p.dim();
  std::vector<double> fixed(zdim, 0.0);
  std::vector<bool> is_fixed(zdim, false);
  for (std::size_t k = 0; k < fixed_indices.size(); ++k) {
    is_fixed[fixed_indices[k]] = true;
    fixed[fixed_indices[k]] = fixed_values[static_cast<int>(k)];
  }
  if (is_fixed[0]) throw std::invalid_argument("lambda cannot be fixed");

  LmiBuilder b(p);
  b.lmi.m = m;
  b.lmi.n = n;
  b.lmi.t_index = -1;
  std::vector<int> col_of_z(zdim, -1);
  int ncols = 0;
  for (int zi = 0; zi < zdim; ++zi)
    if (!is_fixed[zi]) col_of_z[zi] = ncols++;
  b.lmi.var_of_col.resize(ncols);
  for (int zi = 0; zi < zdim; ++zi)
    if (col_of_z[zi] >= 0) b.lmi.var_of_col[col_of_z[zi]] = zi;

  if (node_box) {
    for (int i = 0; i < m; ++i) {
      if (col_of_z[1 + i] < 0) continue;
      b.nonneg_row(node_box->hi[i], {{col_of_z[1 + i], 1.0}});
      b.nonneg_row(-node_box->lo[i], {{col_of_z[1 + i], -1.0}});
    }
  }

  auto add_ball = [&](int base, int count, double radius_sq) {
    std::vector<int> cols;
    double used = 0.0;
    for (int i = 0; i < count; ++i) {
      if (col_of_z[base + i] >= 0)
        cols.push_back(col_of_z[base + i]);
      else
        used += fixed[base + i] * fixed[base + i];
    }
    if (cols.empty()) return;
    double rem = radius_sq - used;
    if (rem < 0) rem = 0;
    b.soc_ball(std::sqrt(rem), {}, cols, Eigen::VectorXd::Zero(static_cast<int>(cols.size())));
  };
  add_ball(1, m, p.l_a);
  add_ball(1 + m, n, p.l_s);

  for (std::size_t f = 0; f < p.system.forms.size(); ++f) {
    const auto& form = p.system.forms[f];
    const int pdim = form.p;
    Eigen::MatrixXd A0 = form.F;
    std::map<int, Eigen::MatrixXd> lin;
    auto acc = [&](int zi, const Eigen::MatrixXd& mat) {
      auto [it, inserted] = lin.emplace(zi, mat);
      if (!inserted) it->second += mat;
    };
    acc(0, Eigen::MatrixXd::Identity(pdim, pdim));
    for (const auto& [i, Hi] : form.H) {
      if (is_fixed[1 + i])
        A0 += fixed[1 + i] * Hi;
      else
        acc(1 + i, Hi);
    }
    for (const auto& [j, Gj] : form.G) {
      if (is_fixed[1 + m + j])
        A0 += fixed[1 + m + j] * Gj;
      else
        acc(1 + m + j, Gj);
    }
    for (const auto& [ij, Fm] : form.Fij) {
      const int za = 1 + ij.first, zs = 1 + m + ij.second;
      if (is_fixed[za] && is_fixed[zs]) {
        A0 += fixed[za] * fixed[zs] * Fm;
      } else if (is_fixed[za]) {
        if (fixed[za] != 0.0) acc(zs, fixed[za] * Fm);
      } else if (is_fixed[zs]) {
        if (fixed[zs] != 0.0) acc(za, fixed[zs] * Fm);
      } else {
        throw std::invalid_argument("fixed_subset_lmi: bilinear term with both sides free");
      }
    }
    std::vector<std::pair<int, Eigen::MatrixXd>> coefs;
    for (auto& [zi, mat] : lin) coefs.emplace_back(col_of_z[zi], std::move(mat));
    b.psd_block(static_cast<int>(f), form.origin, A0, coefs);
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(ncols);
  c[col_of_z[0]] = -1.0;
  b.finalize(c);
  return b.lmi;
}

Eigen::VectorXd expand_solution(const BmiProblem& p, const LmiProblem& lmi,
                                const Eigen::VectorXd& x,
                                const std::vector<int>& fixed_indices,
                                const Eigen::VectorXd& fixed_values) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(p.dim());
  for (std::size_t k = 0; k < fixed_indices.size(); ++k)
    z[fixed_indices[k]] = fixed_values[static_cast<int>(k)];
  for (std::size_t colv = 0; colv < lmi.var_of_col.size(); ++colv) {
    int zi = lmi.var_of_col[colv];
    if (zi >= 0) z[zi] = x[static_cast<int>(colv)];
  }
  return z;
}

std::string LmiProblem::dump() const {
  // Sparse text layout: form block row col var coeff, with var = -1 for the
  // constant matrix. Rows/cols are within-block, 1-based.
  std::ostringstream out;
  for (const auto& blk : blocks) {
    const int d = svec_dim(blk.p);
    std::map<std::pair<int, int>, std::map<int, double>> cells;
    Eigen::VectorXd b0 = conic.b.segment(blk.row_offset, d);
    Eigen::MatrixXd A0 = -smat(b0, blk.p);
    for (int i = 0; i < blk.p; ++i)
      for (int j = i; j < blk.p; ++j)
        if (A0(i, j) != 0.0) cells[{i, j}][-1] = A0(i, j);
    for (const auto& t : conic.entries) {
      if (t.row() < blk.row_offset || t.row() >= blk.row_offset + d) continue;
      int k = t.row() - blk.row_offset, i = 0;
      while (k >= blk.p - i) k -= blk.p - i, ++i;
      int j = i + k;
      double v = t.value();
      if (i != j) v /= 1.4142135623730951;
      int var = var_of_col[t.col()];
      cells[{i, j}][var] = v;
    }
    for (const auto& [rc, vars] : cells)
      for (const auto& [var, v] : vars)
        out << blk.form_index << " " << blk.origin << " " << rc.first + 1 << " "
            << rc.second + 1 << " " << var << " " << v << "\n";
  }
  return out.str();
}

}  // namespace bcsynth
