#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcsynth {

// Exact rational arithmetic everywhere in the polynomial layer; doubles only
// appear when matrices are handed to the conic solver.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_of(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rat(BigInt(num), BigInt(den));
}

// Parses "3", "-3", "3/4", "0.125", "1.5e-2" into an exact rational.
// Decimal literals become exact powers of ten (0.1 -> 1/10), never binary
// floats.
Rat parse_rational(const std::string& text);

std::string to_string(const Rat& r);

}  // namespace bcsynth
