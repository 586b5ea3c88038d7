#include "bcsynth/parse.hpp"

#include <cctype>

namespace bcsynth {

namespace {

class Parser {
 public:
  using Resolver = std::function<ParamPoly(const std::string&)>;

  Parser(const std::string& text, VarList vars, Resolver resolve)
      : text_(text), vars_(std::move(vars)), resolve_(std::move(resolve)) {}

  ParamPoly run() {
    ParamPoly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ParamPoly expr() {
    int sign = 1;
    while (true) {
      if (eat('-'))
        sign = -sign;
      else if (!eat('+'))
        break;
    }
    ParamPoly acc = term();
    if (sign < 0) acc = -acc;
    while (true) {
      if (eat('+'))
        acc += term();
      else if (eat('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  ParamPoly term() {
    ParamPoly acc = factor();
    while (true) {
      if (eat('*')) {
        ParamPoly rhs = factor();
        acc = multiply(acc, rhs);
      } else if (eat('/')) {
        ParamPoly rhs = factor();
        Rat d = constant_of(rhs);
        if (d == 0) fail("division by zero");
        acc = acc.scaled(Rat(1) / d);
      } else {
        break;
      }
    }
    return acc;
  }

  ParamPoly factor() {
    int sign = 1;
    while (true) {
      if (eat('-'))
        sign = -sign;
      else if (!eat('+'))
        break;
    }
    ParamPoly base = atom();
    if (eat('^')) {
      skip_ws();
      if (peek() == '-') fail("negative exponent");
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
      unsigned e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        e = e * 10 + static_cast<unsigned>(text_[pos_++] - '0');
      base = power(base, e);
    }
    if (sign < 0) base = -base;
    return base;
  }

  ParamPoly atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ParamPoly inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  ParamPoly number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;  // not an exponent, e.g. "2*e" with identifier e
      }
    }
    Rat v;
    try {
      v = parse_rational(text_.substr(start, pos_ - start));
    } catch (const std::exception& e) {
      fail(e.what());
    }
    return ParamPoly::from_poly(Poly::constant(vars_, v));
  }

  ParamPoly identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < vars_->size(); ++i)
      if ((*vars_)[i] == name) return ParamPoly::from_poly(Poly::variable(vars_, i));
    return resolve_(name);
  }

  ParamPoly multiply(const ParamPoly& a, const ParamPoly& b) {
    try {
      return a * b;
    } catch (const std::invalid_argument&) {
      fail("template is nonlinear in a parameter");
    }
  }

  ParamPoly power(const ParamPoly& base, unsigned e) {
    ParamPoly acc = ParamPoly::from_poly(Poly::constant(vars_, Rat(1)));
    for (unsigned i = 0; i < e; ++i) acc = multiply(acc, base);
    return acc;
  }

  Rat constant_of(const ParamPoly& p) {
    if (p.is_zero()) return Rat(0);
    if (p.terms().size() != 1) fail("divisor must be a constant");
    const auto& [m, e] = *p.terms().begin();
    if (!m.is_one() || !e.is_constant()) fail("divisor must be a constant");
    return e.c;
  }

  const std::string& text_;
  VarList vars_;
  Resolver resolve_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(const std::string& text, const VarList& vars) {
  Parser parser(text, vars, [](const std::string& name) -> ParamPoly {
    throw ParseError("unknown identifier '" + name + "'");
  });
  ParamPoly p = parser.run();
  std::vector<Rat> none;
  return p.substitute(none, none);
}

ParamPoly parse_template(const std::string& text, const VarList& vars, ParamTable& table) {
  Parser parser(text, vars, [&](const std::string& name) -> ParamPoly {
    int idx;
    if (auto found = table.find_a(name))
      idx = *found;
    else
      idx = table.add_a(name);
    return ParamPoly::constant(vars, ParamExpr::param(ParamGroup::A, idx));
  });
  return parser.run();
}

std::vector<Poly> parse_poly_list(const std::vector<std::string>& texts, const VarList& vars) {
  std::vector<Poly> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse_poly(t, vars));
  return out;
}

}  // namespace bcsynth
