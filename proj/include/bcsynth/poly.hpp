#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bcsynth/monomial.hpp"
#include "bcsynth/rational.hpp"

namespace bcsynth {

// Shared, immutable variable context. Polynomials over the same VarList are
// compatible; mixing contexts of different arity is an error.
using VarList = std::shared_ptr<const std::vector<std::string>>;

inline VarList make_vars(std::vector<std::string> names) {
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}

// Sparse multivariate polynomial with exact rational coefficients.
// Invariant: no zero coefficients stored; terms kept in grevlex order with
// the leading term first.
class Poly {
 public:
  using TermMap = std::map<Monomial, Rat, GrevlexGreater>;

  Poly() = default;
  explicit Poly(VarList vars) : vars_(std::move(vars)) {}

  static Poly constant(VarList vars, Rat c);
  static Poly variable(VarList vars, std::size_t index);
  static Poly monomial(VarList vars, Monomial m, Rat c);

  const VarList& vars() const { return vars_; }
  std::size_t nvars() const { return vars_ ? vars_->size() : 0; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }
  unsigned degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

  Rat coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rat(0) : it->second;
  }
  Rat constant_term() const { return coeff(Monomial(nvars())); }

  // Leading term in grevlex order. Precondition: !is_zero().
  const std::pair<const Monomial, Rat>& leading() const { return *terms_.begin(); }

  void add_term(const Monomial& m, const Rat& c);

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rat& c) const;
  Poly mul_term(const Monomial& m, const Rat& c) const;
  Poly pow(unsigned e) const;

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly derivative(std::size_t var) const;

  double eval(std::span<const double> x) const;
  Rat eval_exact(std::span<const Rat> x) const;

  // Substitutes substitutions[i] for variable i; all substitutions share the
  // target polynomial context.
  Poly substitute(const std::vector<Poly>& substitutions) const;

  std::string str() const;

 private:
  void check_compatible(const Poly& o) const {
    if (nvars() != o.nvars())
      throw std::invalid_argument("polynomial arity mismatch");
  }

  VarList vars_;
  TermMap terms_;
};

struct VectorField {
  VarList vars;
  std::vector<Poly> components;  // one per state variable

  std::size_t dim() const { return components.size(); }
};

// k-th Lie derivative of B along f, computed exactly:
//   L^0 B = B,  L^k B = <d/dx L^{k-1} B, f>.
Poly lie_derivative(const Poly& B, const VectorField& f, unsigned k);

// All monomials over nvars variables of total degree <= d, ordered degree
// ascending and grevlex-descending within each degree block, so the vector
// starts with 1. Size C(nvars + d, nvars).
std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned d);

}  // namespace bcsynth
