#include "bcsynth/groebner.hpp"

#include <algorithm>
#include <set>

namespace bcsynth {

Poly normal_form(const Poly& p, const std::vector<Poly>& divisors) {
  Poly rem(p.vars());
  Poly work = p;
  while (!work.is_zero()) {
    const auto& [lm, lc] = work.leading();
    bool reduced = false;
    for (const Poly& d : divisors) {
      if (d.is_zero()) continue;
      const auto& [dm, dc] = d.leading();
      if (dm.divides(lm)) {
        work -= d.mul_term(dm.quotient_of(lm), lc / dc);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      rem.add_term(lm, lc);
      Poly lead(p.vars());
      lead.add_term(lm, lc);
      work -= lead;
    }
  }
  return rem;
}

namespace {

Poly s_polynomial(const Poly& f, const Poly& g) {
  const auto& [fm, fc] = f.leading();
  const auto& [gm, gc] = g.leading();
  Monomial l = Monomial::lcm(fm, gm);
  return f.mul_term(fm.quotient_of(l), Rat(1) / fc) - g.mul_term(gm.quotient_of(l), Rat(1) / gc);
}

Poly make_monic(const Poly& p) {
  return p.scaled(Rat(1) / p.leading().second);
}

bool coprime_leads(const Poly& f, const Poly& g) {
  const auto& a = f.leading().first;
  const auto& b = g.leading().first;
  for (std::size_t i = 0; i < a.exps.size(); ++i)
    if (a.exps[i] > 0 && b.exps[i] > 0) return false;
  return true;
}

}  // namespace

std::vector<Poly> groebner_basis(const std::vector<Poly>& generators) {
  std::vector<Poly> basis;
  for (const Poly& g : generators)
    if (!g.is_zero()) basis.push_back(make_monic(g));
  if (basis.empty()) return basis;

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) pairs.insert({i, j});

  while (!pairs.empty()) {
    auto [i, j] = *pairs.begin();
    pairs.erase(pairs.begin());

    // Buchberger's first criterion: coprime leading monomials reduce to zero.
    if (coprime_leads(basis[i], basis[j])) continue;

    // Chain criterion: skip if some k divides lcm(i,j) and both (i,k), (j,k)
    // are already handled.
    Monomial lij = Monomial::lcm(basis[i].leading().first, basis[j].leading().first);
    bool chained = false;
    for (std::size_t k = 0; k < basis.size() && !chained; ++k) {
      if (k == i || k == j) continue;
      if (!basis[k].leading().first.divides(lij)) continue;
      auto key = [](std::size_t a, std::size_t b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (!pairs.count(key(i, k)) && !pairs.count(key(j, k))) chained = true;
    }
    if (chained) continue;

    Poly r = normal_form(s_polynomial(basis[i], basis[j]), basis);
    if (r.is_zero()) continue;
    basis.push_back(make_monic(r));
    for (std::size_t k = 0; k + 1 < basis.size(); ++k) pairs.insert({k, basis.size() - 1});
  }

  // Minimalize: drop elements whose leading monomial is divisible by another.
  std::vector<Poly> minimal;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < basis.size() && !redundant; ++j) {
      if (i == j) continue;
      const auto& li = basis[i].leading().first;
      const auto& lj = basis[j].leading().first;
      if (lj.divides(li) && !(li == lj && j > i)) redundant = true;
    }
    if (!redundant) minimal.push_back(basis[i]);
  }

  // Reduce tails against the rest.
  std::vector<Poly> reduced;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Poly> others;
    for (std::size_t j = 0; j < minimal.size(); ++j)
      if (j != i) others.push_back(minimal[j]);
    Poly r = normal_form(minimal[i], others);
    if (!r.is_zero()) reduced.push_back(make_monic(r));
  }
  std::sort(reduced.begin(), reduced.end(), [](const Poly& a, const Poly& b) {
    return grevlex_less(b.leading().first, a.leading().first);
  });
  return reduced;
}

bool ideal_contains(const std::vector<Poly>& basis, const Poly& p) {
  return normal_form(p, basis).is_zero();
}

CompletenessThreshold completeness_threshold(const Poly& B, const VectorField& f,
                                             unsigned max_order) {
  if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
  std::vector<Poly> lies{B};
  Poly cur = B;
  for (unsigned i = 1; i <= max_order + 1; ++i) {
    cur = lie_derivative(cur, f, 1);
    if (i >= 2) {
      // lies holds L^0..L^{i-1}; test L^i against the ideal of the prefix.
      std::vector<Poly> gens(lies.begin(), lies.end());
      auto gb = groebner_basis(gens);
      if (gb.empty() || ideal_contains(gb, cur)) return {i - 1, true};
    }
    lies.push_back(cur);
  }
  return {max_order, false};
}

}  // namespace bcsynth
