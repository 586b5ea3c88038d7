#pragma once

#include <vector>

#include "bcsynth/poly.hpp"

namespace bcsynth {

// Remainder of p under multivariate division by the (ordered) divisor list,
// grevlex order. The result has no term divisible by any divisor's leading
// monomial.
Poly normal_form(const Poly& p, const std::vector<Poly>& divisors);

// Buchberger's algorithm with Gebauer-Moeller style pair pruning; returns the
// reduced basis (monic leading coefficients, inter-reduced tails). Every
// S-polynomial of the result reduces to zero modulo the result.
std::vector<Poly> groebner_basis(const std::vector<Poly>& generators);

bool ideal_contains(const std::vector<Poly>& basis, const Poly& p);

struct CompletenessThreshold {
  unsigned order = 1;
  bool reached = true;  // false if no i <= max_order qualifies
};

// Minimal i >= 1 with L^{i+1} B in the ideal <L^0 B, ..., L^i B>; clamped to
// the positive naturals. Rejects parametric templates (concrete B only).
CompletenessThreshold completeness_threshold(const Poly& B, const VectorField& f,
                                             unsigned max_order);

}  // namespace bcsynth
