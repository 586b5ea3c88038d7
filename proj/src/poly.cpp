#include "bcsynth/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bcsynth {

std::string monomial_to_string(const Monomial& m, const std::vector<std::string>& vars) {
  std::string out;
  for (std::size_t i = 0; i < m.exps.size(); ++i) {
    if (m.exps[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += vars[i];
    if (m.exps[i] > 1) out += "^" + std::to_string(m.exps[i]);
  }
  return out.empty() ? "1" : out;
}

Poly Poly::constant(VarList vars, Rat c) {
  Poly p(std::move(vars));
  p.add_term(Monomial(p.nvars()), c);
  return p;
}

Poly Poly::variable(VarList vars, std::size_t index) {
  Poly p(std::move(vars));
  if (index >= p.nvars()) throw std::out_of_range("variable index out of range");
  Monomial m(p.nvars());
  m.exps[index] = 1;
  p.add_term(m, Rat(1));
  return p;
}

Poly Poly::monomial(VarList vars, Monomial m, Rat c) {
  Poly p(std::move(vars));
  if (m.nvars() != p.nvars()) throw std::invalid_argument("monomial arity mismatch");
  p.add_term(m, c);
  return p;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r(vars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  check_compatible(o);
  if (!vars_) vars_ = o.vars_;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_compatible(o);
  if (!vars_) vars_ = o.vars_;
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  a.check_compatible(b);
  Poly r(a.vars_ ? a.vars_ : b.vars_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Poly Poly::scaled(const Rat& c) const {
  Poly r(vars_);
  if (c == 0) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

Poly Poly::mul_term(const Monomial& m, const Rat& c) const {
  Poly r(vars_);
  if (c == 0) return r;
  for (const auto& [mm, v] : terms_) r.terms_.emplace(mm * m, v * c);
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly r = Poly::constant(vars_, Rat(1));
  Poly base = *this;
  while (e > 0) {
    if (e & 1u) r = r * base;
    base = base * base;
    e >>= 1u;
  }
  return r;
}

Poly Poly::derivative(std::size_t var) const {
  Poly r(vars_);
  for (const auto& [m, c] : terms_) {
    if (m.exps[var] == 0) continue;
    Monomial d(m);
    d.exps[var] -= 1;
    r.add_term(d, c * Rat(m.exps[var]));
  }
  return r;
}

double Poly::eval(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = to_double(c);
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      for (unsigned e = 0; e < m.exps[i]; ++e) t *= x[i];
    acc += t;
  }
  return acc;
}

Rat Poly::eval_exact(std::span<const Rat> x) const {
  Rat acc(0);
  for (const auto& [m, c] : terms_) {
    Rat t = c;
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      for (unsigned e = 0; e < m.exps[i]; ++e) t *= x[i];
    acc += t;
  }
  return acc;
}

Poly Poly::substitute(const std::vector<Poly>& substitutions) const {
  if (substitutions.size() != nvars())
    throw std::invalid_argument("substitution arity mismatch");
  VarList target = substitutions.empty() ? vars_ : substitutions.front().vars();
  Poly acc(target);
  for (const auto& [m, c] : terms_) {
    Poly t = Poly::constant(target, c);
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      if (m.exps[i] > 0) t = t * substitutions[i].pow(m.exps[i]);
    acc += t;
  }
  return acc;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat a = c;
    if (first) {
      if (a < 0) { out << "-"; a = -a; }
    } else {
      out << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    const bool unit = (a == 1);
    if (m.is_one()) {
      out << to_string(a);
    } else {
      if (!unit) out << to_string(a) << "*";
      out << monomial_to_string(m, *vars_);
    }
  }
  return out.str();
}

Poly lie_derivative(const Poly& B, const VectorField& f, unsigned k) {
  if (f.dim() != B.nvars())
    throw std::invalid_argument("vector field dimension does not match polynomial arity");
  Poly cur = B;
  for (unsigned step = 0; step < k; ++step) {
    Poly next(B.vars());
    for (std::size_t i = 0; i < f.dim(); ++i) next += cur.derivative(i) * f.components[i];
    cur = std::move(next);
  }
  return cur;
}

namespace {

void enumerate_degree(std::size_t nvars, unsigned deg, std::size_t pos, Monomial& cur,
                      std::vector<Monomial>& out) {
  if (pos + 1 == nvars) {
    cur.exps[pos] = deg;
    out.push_back(cur);
    cur.exps[pos] = 0;
    return;
  }
  for (unsigned e = deg; e + 1 > 0; --e) {
    cur.exps[pos] = e;
    enumerate_degree(nvars, deg - e, pos + 1, cur, out);
    if (e == 0) break;
  }
  cur.exps[pos] = 0;
}

}  // namespace

std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned d) {
  std::vector<Monomial> out;
  Monomial cur(nvars);
  for (unsigned deg = 0; deg <= d; ++deg) {
    std::vector<Monomial> block;
    if (nvars == 0) {
      if (deg == 0) block.push_back(Monomial());
    } else {
      enumerate_degree(nvars, deg, 0, cur, block);
    }
    std::sort(block.begin(), block.end(), [](const Monomial& a, const Monomial& b) {
      return grevlex_less(b, a);  // descending within the degree block
    });
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

}  // namespace bcsynth
