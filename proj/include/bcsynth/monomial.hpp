#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace bcsynth {

// Exponent vector; the ambient variable list lives in the owning polynomial.
struct Monomial {
  std::vector<unsigned> exps;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps(nvars, 0u) {}
  explicit Monomial(std::vector<unsigned> e) : exps(std::move(e)) {}

  std::size_t nvars() const { return exps.size(); }
  unsigned degree() const { return std::accumulate(exps.begin(), exps.end(), 0u); }
  bool is_one() const { return degree() == 0; }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps == b.exps; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

  Monomial operator*(const Monomial& o) const {
    Monomial r(*this);
    for (std::size_t i = 0; i < exps.size(); ++i) r.exps[i] += o.exps[i];
    return r;
  }

  bool divides(const Monomial& o) const {
    for (std::size_t i = 0; i < exps.size(); ++i)
      if (exps[i] > o.exps[i]) return false;
    return true;
  }

  // Requires divides(o) == false is UB-free: caller checks.
  Monomial quotient_of(const Monomial& num) const {
    Monomial r(num);
    for (std::size_t i = 0; i < exps.size(); ++i) r.exps[i] -= exps[i];
    return r;
  }

  static Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    for (std::size_t i = 0; i < r.exps.size(); ++i)
      if (b.exps[i] > r.exps[i]) r.exps[i] = b.exps[i];
    return r;
  }
};

// Graded reverse lexicographic order: compare total degree first; on ties the
// monomial whose last nonzero exponent difference is negative is the larger.
inline bool grevlex_less(const Monomial& a, const Monomial& b) {
  unsigned da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  for (std::size_t i = a.exps.size(); i-- > 0;) {
    if (a.exps[i] != b.exps[i]) return a.exps[i] > b.exps[i];
  }
  return false;
}

struct GrevlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_less(b, a); }
};

std::string monomial_to_string(const Monomial& m, const std::vector<std::string>& vars);

}  // namespace bcsynth
