#include "bcsynth/param.hpp"

#include <sstream>

namespace bcsynth {

ParamExpr ParamExpr::param(ParamGroup g, int idx, Rat coeff) {
  ParamExpr e;
  if (coeff == 0) return e;
  if (g == ParamGroup::A)
    e.a_lin.emplace(idx, std::move(coeff));
  else
    e.s_lin.emplace(idx, std::move(coeff));
  return e;
}

namespace {

template <typename K>
void merge_into(std::map<K, Rat>& dst, const std::map<K, Rat>& src, int sign) {
  for (const auto& [k, v] : src) {
    if (v == 0) continue;
    auto [it, inserted] = dst.emplace(k, sign > 0 ? v : Rat(-v));
    if (!inserted) {
      it->second += sign > 0 ? v : Rat(-v);
      if (it->second == 0) dst.erase(it);
    }
  }
}

}  // namespace

ParamExpr& ParamExpr::operator+=(const ParamExpr& o) {
  c += o.c;
  merge_into(a_lin, o.a_lin, +1);
  merge_into(s_lin, o.s_lin, +1);
  merge_into(cross, o.cross, +1);
  return *this;
}

ParamExpr& ParamExpr::operator-=(const ParamExpr& o) {
  c -= o.c;
  merge_into(a_lin, o.a_lin, -1);
  merge_into(s_lin, o.s_lin, -1);
  merge_into(cross, o.cross, -1);
  return *this;
}

ParamExpr ParamExpr::operator-() const {
  ParamExpr e;
  e.c = -c;
  for (const auto& [k, v] : a_lin) e.a_lin.emplace(k, -v);
  for (const auto& [k, v] : s_lin) e.s_lin.emplace(k, -v);
  for (const auto& [k, v] : cross) e.cross.emplace(k, -v);
  return e;
}

ParamExpr ParamExpr::scaled(const Rat& k) const {
  ParamExpr e;
  if (k == 0) return e;
  e.c = c * k;
  for (const auto& [i, v] : a_lin) e.a_lin.emplace(i, v * k);
  for (const auto& [i, v] : s_lin) e.s_lin.emplace(i, v * k);
  for (const auto& [i, v] : cross) e.cross.emplace(i, v * k);
  return e;
}

ParamExpr operator*(const ParamExpr& x, const ParamExpr& y) {
  const bool bad = (!x.a_lin.empty() && !y.a_lin.empty()) ||
                   (!x.s_lin.empty() && !y.s_lin.empty()) ||
                   (!x.cross.empty() && !y.is_constant()) ||
                   (!y.cross.empty() && !x.is_constant());
  if (bad)
    throw std::invalid_argument(
        "product leaves the bilinear class (same-group quadratic term)");

  ParamExpr r;
  r.c = x.c * y.c;
  for (const auto& [i, v] : x.a_lin) {
    if (Rat cv = v * y.c; cv != 0) r.a_lin[i] += cv;
  }
  for (const auto& [j, v] : x.s_lin) {
    if (Rat cv = v * y.c; cv != 0) r.s_lin[j] += cv;
  }
  for (const auto& [ij, v] : x.cross) {
    if (Rat cv = v * y.c; cv != 0) r.cross[ij] += cv;
  }
  for (const auto& [i, v] : y.a_lin) {
    if (Rat cv = v * x.c; cv != 0) r.a_lin[i] += cv;
  }
  for (const auto& [j, v] : y.s_lin) {
    if (Rat cv = v * x.c; cv != 0) r.s_lin[j] += cv;
  }
  for (const auto& [ij, v] : y.cross) {
    if (Rat cv = v * x.c; cv != 0) r.cross[ij] += cv;
  }
  for (const auto& [i, vx] : x.a_lin)
    for (const auto& [j, vy] : y.s_lin)
      if (Rat cv = vx * vy; cv != 0) r.cross[{i, j}] += cv;
  for (const auto& [j, vx] : x.s_lin)
    for (const auto& [i, vy] : y.a_lin)
      if (Rat cv = vx * vy; cv != 0) r.cross[{i, j}] += cv;

  auto prune = [](auto& m) {
    for (auto it = m.begin(); it != m.end();)
      it = it->second == 0 ? m.erase(it) : std::next(it);
  };
  prune(r.a_lin);
  prune(r.s_lin);
  prune(r.cross);
  return r;
}

Rat ParamExpr::eval_exact(std::span<const Rat> a, std::span<const Rat> s) const {
  Rat acc = c;
  for (const auto& [i, v] : a_lin) acc += v * a[i];
  for (const auto& [j, v] : s_lin) acc += v * s[j];
  for (const auto& [ij, v] : cross) acc += v * a[ij.first] * s[ij.second];
  return acc;
}

double ParamExpr::eval(std::span<const double> a, std::span<const double> s) const {
  double acc = to_double(c);
  for (const auto& [i, v] : a_lin) acc += to_double(v) * a[i];
  for (const auto& [j, v] : s_lin) acc += to_double(v) * s[j];
  for (const auto& [ij, v] : cross) acc += to_double(v) * a[ij.first] * s[ij.second];
  return acc;
}

std::string ParamExpr::str(const ParamTable& table) const {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const Rat& v, const std::string& sym) {
    Rat a = v;
    if (first) {
      if (a < 0) { out << "-"; a = -a; }
    } else {
      out << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    if (sym.empty()) {
      out << to_string(a);
    } else {
      if (a != 1) out << to_string(a) << "*";
      out << sym;
    }
  };
  if (c != 0) emit(c, "");
  for (const auto& [i, v] : a_lin) emit(v, table.a_names[i]);
  for (const auto& [j, v] : s_lin) emit(v, table.s_names[j]);
  for (const auto& [ij, v] : cross)
    emit(v, table.a_names[ij.first] + "*" + table.s_names[ij.second]);
  if (first) out << "0";
  return out.str();
}

ParamPoly ParamPoly::from_poly(const Poly& p) {
  ParamPoly r(p.vars());
  for (const auto& [m, c] : p.terms()) r.terms_.emplace(m, ParamExpr::constant(c));
  return r;
}

ParamPoly ParamPoly::constant(VarList vars, ParamExpr e) {
  ParamPoly r(std::move(vars));
  r.add_term(Monomial(r.nvars()), e);
  return r;
}

void ParamPoly::add_term(const Monomial& m, const ParamExpr& e) {
  if (e.is_zero()) return;
  auto [it, inserted] = terms_.emplace(m, e);
  if (!inserted) {
    it->second += e;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

ParamPoly& ParamPoly::operator+=(const ParamPoly& o) {
  if (!vars_) vars_ = o.vars_;
  for (const auto& [m, e] : o.terms_) add_term(m, e);
  return *this;
}

ParamPoly& ParamPoly::operator-=(const ParamPoly& o) {
  if (!vars_) vars_ = o.vars_;
  for (const auto& [m, e] : o.terms_) add_term(m, -e);
  return *this;
}

ParamPoly ParamPoly::operator-() const {
  ParamPoly r(vars_);
  for (const auto& [m, e] : terms_) r.terms_.emplace(m, -e);
  return r;
}

ParamPoly operator*(const ParamPoly& a, const ParamPoly& b) {
  ParamPoly r(a.vars_ ? a.vars_ : b.vars_);
  for (const auto& [ma, ea] : a.terms_)
    for (const auto& [mb, eb] : b.terms_) r.add_term(ma * mb, ea * eb);
  return r;
}

ParamPoly ParamPoly::mul_poly(const Poly& p) const {
  ParamPoly r(vars_);
  for (const auto& [m, e] : terms_)
    for (const auto& [mp, cp] : p.terms()) r.add_term(m * mp, e.scaled(cp));
  return r;
}

ParamPoly ParamPoly::scaled(const Rat& k) const {
  ParamPoly r(vars_);
  if (k == 0) return r;
  for (const auto& [m, e] : terms_) r.terms_.emplace(m, e.scaled(k));
  return r;
}

ParamPoly ParamPoly::derivative(std::size_t var) const {
  ParamPoly r(vars_);
  for (const auto& [m, e] : terms_) {
    if (m.exps[var] == 0) continue;
    Monomial d(m);
    d.exps[var] -= 1;
    r.add_term(d, e.scaled(Rat(m.exps[var])));
  }
  return r;
}

Poly ParamPoly::substitute(std::span<const Rat> a, std::span<const Rat> s) const {
  Poly r(vars_);
  for (const auto& [m, e] : terms_) r.add_term(m, e.eval_exact(a, s));
  return r;
}

std::string ParamPoly::str(const ParamTable& table) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, e] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << "(" << e.str(table) << ")";
    if (!m.is_one()) out << "*" << monomial_to_string(m, *vars_);
  }
  return out.str();
}

ParamPoly lie_derivative(const ParamPoly& B, const VectorField& f, unsigned k) {
  if (f.dim() != B.nvars())
    throw std::invalid_argument("vector field dimension does not match polynomial arity");
  ParamPoly cur = B;
  for (unsigned step = 0; step < k; ++step) {
    ParamPoly next(B.vars());
    for (std::size_t i = 0; i < f.dim(); ++i) next += cur.derivative(i).mul_poly(f.components[i]);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace bcsynth
