#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bcsynth/param.hpp"
#include "bcsynth/poly.hpp"

namespace bcsynth {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expression grammar (whitespace insignificant):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*      -- '/' only by a constant
//   factor := atom ['^' nat]
//   atom   := number | ident | '(' expr ')'
//   number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits] | digits '/' digits
// Decimal literals are exact rationals (0.1 -> 1/10).
Poly parse_poly(const std::string& text, const VarList& vars);

// Like parse_poly but identifiers outside `vars` become template parameters
// of the `a` group, registered in `table` on first use. The result must be
// affine in the parameters; a parameter product is rejected.
ParamPoly parse_template(const std::string& text, const VarList& vars, ParamTable& table);

std::vector<Poly> parse_poly_list(const std::vector<std::string>& texts, const VarList& vars);

}  // namespace bcsynth
