#include "bcsynth/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace bcsynth {

namespace {

BigInt pow10(long e) {
  BigInt r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rat parse_rational(const std::string& text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto fail = [&]() -> Rat {
    throw std::invalid_argument("malformed rational literal: '" + text + "'");
  };

  bool neg = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }

  std::string int_part, frac_part, exp_part;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) int_part += text[i++];
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) frac_part += text[i++];
  }
  if (int_part.empty() && frac_part.empty()) return fail();

  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < n && (text[i] == '+' || text[i] == '-')) exp_part += text[i++];
    if (i >= n || !std::isdigit(static_cast<unsigned char>(text[i]))) return fail();
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) exp_part += text[i++];
  }

  if (i < n && text[i] == '/') {
    if (!frac_part.empty() || !exp_part.empty()) return fail();
    ++i;
    std::string den;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) den += text[i++];
    if (den.empty() || i != n) return fail();
    BigInt d(den);
    if (d == 0) return fail();
    Rat r(BigInt(int_part), d);
    return neg ? Rat(-r) : r;
  }
  if (i != n) return fail();

  BigInt digits(int_part.empty() ? "0" : int_part);
  digits = digits * pow10(static_cast<long>(frac_part.size()));
  if (!frac_part.empty()) digits += BigInt(frac_part);
  Rat r(digits, pow10(static_cast<long>(frac_part.size())));
  if (!exp_part.empty()) {
    long e = std::strtol(exp_part.c_str(), nullptr, 10);
    if (e >= 0)
      r *= Rat(pow10(e));
    else
      r /= Rat(pow10(-e));
  }
  return neg ? Rat(-r) : r;
}

std::string to_string(const Rat& r) {
  return r.str();
}

}  // namespace bcsynth
