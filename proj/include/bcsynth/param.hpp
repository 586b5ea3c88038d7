#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcsynth/poly.hpp"

namespace bcsynth {

// Synthesis parameters come in two groups: the template coefficients `a` and
// the multiplier/Gram coefficients `s`. Expressions are kept bilinear: degree
// at most one in each group, no a_i*a_j or s_i*s_j products.
enum class ParamGroup { A, S };

enum class SRole {
  multiplier_constant,  // constant term of a multiplier polynomial (Eq.-15 slot)
  multiplier_coeff,     // non-constant coefficient of a free multiplier
  gram_entry,           // entry of an SOS multiplier Gram matrix
  aux_null_space,       // Gram-matching null-space parameter
};

// Names and roles of all synthesis parameters; index order defines the
// z = (lambda, a, s) layout used by the BMI machinery.
struct ParamTable {
  std::vector<std::string> a_names;
  std::vector<std::string> s_names;
  std::vector<SRole> s_roles;
  std::vector<int> s_form;  // owning constraint-form index, -1 if none

  std::size_t a_count() const { return a_names.size(); }
  std::size_t s_count() const { return s_names.size(); }

  int add_a(std::string name) {
    a_names.push_back(std::move(name));
    return static_cast<int>(a_names.size()) - 1;
  }
  int add_s(std::string name, SRole role, int form) {
    s_names.push_back(std::move(name));
    s_roles.push_back(role);
    s_form.push_back(form);
    return static_cast<int>(s_names.size()) - 1;
  }
  std::optional<int> find_a(const std::string& name) const {
    for (std::size_t i = 0; i < a_names.size(); ++i)
      if (a_names[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }
};

// c + sum_i a_lin[i]*a_i + sum_j s_lin[j]*s_j + sum_{ij} cross[(i,j)]*a_i*s_j,
// all coefficients exact rationals.
struct ParamExpr {
  Rat c{0};
  std::map<int, Rat> a_lin;
  std::map<int, Rat> s_lin;
  std::map<std::pair<int, int>, Rat> cross;

  static ParamExpr constant(Rat v) {
    ParamExpr e;
    e.c = std::move(v);
    return e;
  }
  static ParamExpr param(ParamGroup g, int idx, Rat coeff = Rat(1));

  bool is_zero() const { return c == 0 && a_lin.empty() && s_lin.empty() && cross.empty(); }
  bool is_constant() const { return a_lin.empty() && s_lin.empty() && cross.empty(); }
  bool has_a() const { return !a_lin.empty() || !cross.empty(); }
  bool has_s() const { return !s_lin.empty() || !cross.empty(); }

  ParamExpr& operator+=(const ParamExpr& o);
  ParamExpr& operator-=(const ParamExpr& o);
  friend ParamExpr operator+(ParamExpr a, const ParamExpr& b) { return a += b; }
  friend ParamExpr operator-(ParamExpr a, const ParamExpr& b) { return a -= b; }
  ParamExpr operator-() const;
  ParamExpr scaled(const Rat& k) const;

  // Product of two bilinear expressions; throws if the result would leave the
  // bilinear class (same-group quadratic term).
  friend ParamExpr operator*(const ParamExpr& x, const ParamExpr& y);

  friend bool operator==(const ParamExpr& x, const ParamExpr& y) {
    return x.c == y.c && x.a_lin == y.a_lin && x.s_lin == y.s_lin && x.cross == y.cross;
  }

  Rat eval_exact(std::span<const Rat> a, std::span<const Rat> s) const;
  double eval(std::span<const double> a, std::span<const double> s) const;

  std::string str(const ParamTable& table) const;
};

// Polynomial in x whose coefficients are ParamExprs.
class ParamPoly {
 public:
  using TermMap = std::map<Monomial, ParamExpr, GrevlexGreater>;

  ParamPoly() = default;
  explicit ParamPoly(VarList vars) : vars_(std::move(vars)) {}

  static ParamPoly from_poly(const Poly& p);
  static ParamPoly constant(VarList vars, ParamExpr e);

  const VarList& vars() const { return vars_; }
  std::size_t nvars() const { return vars_ ? vars_->size() : 0; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const { return terms_.empty() ? 0 : terms_.begin()->first.degree(); }

  void add_term(const Monomial& m, const ParamExpr& e);

  ParamPoly& operator+=(const ParamPoly& o);
  ParamPoly& operator-=(const ParamPoly& o);
  friend ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
  friend ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }
  ParamPoly operator-() const;
  friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b);
  ParamPoly mul_poly(const Poly& p) const;
  ParamPoly scaled(const Rat& k) const;

  friend bool operator==(const ParamPoly& a, const ParamPoly& b) { return a.terms_ == b.terms_; }

  ParamPoly derivative(std::size_t var) const;

  // Exact substitution of parameter values; the result is a concrete Poly.
  Poly substitute(std::span<const Rat> a, std::span<const Rat> s) const;

  std::string str(const ParamTable& table) const;

 private:
  VarList vars_;
  TermMap terms_;
};

// Lie derivative along a concrete field; coefficients stay in the same
// bilinear class since differentiation is linear.
ParamPoly lie_derivative(const ParamPoly& B, const VectorField& f, unsigned k);

}  // namespace bcsynth
