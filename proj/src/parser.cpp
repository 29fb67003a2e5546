#include <cctype>
#include <string>
#include <vector>

#include "skewfatou/complex_poly.hpp"

namespace skewfatou {

namespace {

// Recursive-descent scanner for the map grammar:
//   expr   := [sign] term (sign term)*
//   term   := factor (['*'] factor)*
//   factor := number ['i'] | 'i' | 'z' ['^' int] | 'w' ['^' int] | '(' complex ')'
// A term contributes coefficient * z^j * w^k.
class MapParser {
 public:
  explicit MapParser(const std::string& text) : s_(text) {}

  CoeffFamily parse() {
    skip_ws();
    if (eof()) throw ParseError("empty map string", 0);
    parse_expr();
    skip_ws();
    if (!eof()) throw ParseError("unexpected trailing input", pos_);
    CoeffFamily fam = assemble();
    fam.validate();
    return fam;
  }

  Complex parse_single_complex() {
    skip_ws();
    Complex v = parse_signed_complex_literal();
    skip_ws();
    if (!eof()) throw ParseError("unexpected trailing input", pos_);
    return v;
  }

 private:
  struct Term {
    Complex coeff{1.0, 0.0};
    int zpow = 0;
    int wpow = 0;
  };

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void parse_expr() {
    double sign = 1.0;
    skip_ws();
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
    }
    parse_term(sign);
    for (;;) {
      skip_ws();
      if (eof()) return;
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        parse_term(c == '-' ? -1.0 : 1.0);
      } else {
        throw ParseError(std::string("expected '+' or '-', found '") + c + "'",
                         pos_);
      }
    }
  }

  void parse_term(double sign) {
    Term t;
    t.coeff *= sign;
    bool first = true;
    for (;;) {
      skip_ws();
      if (eof()) break;
      char c = peek();
      if (c == '*') {
        ++pos_;
        skip_ws();
        c = peek();
        if (eof()) throw ParseError("dangling '*'", pos_);
      } else if (!first && c != 'z' && c != 'w' && c != 'i' && c != '(' &&
                 !std::isdigit(static_cast<unsigned char>(c)) && c != '.') {
        break;  // end of term (next sign or end)
      }
      if (first && c != 'z' && c != 'w' && c != 'i' && c != '(' &&
          !std::isdigit(static_cast<unsigned char>(c)) && c != '.') {
        throw ParseError(std::string("expected a factor, found '") + c + "'",
                         pos_);
      }
      parse_factor(t);
      first = false;
    }
    if (first) throw ParseError("empty term", pos_);
    terms_.push_back(t);
  }

  void parse_factor(Term& t) {
    char c = peek();
    if (c == 'z' || c == 'w') {
      ++pos_;
      int e = 1;
      if (peek() == '^') {
        ++pos_;
        e = parse_int_exponent();
      }
      (c == 'z' ? t.zpow : t.wpow) += e;
      return;
    }
    if (c == 'i') {
      ++pos_;
      t.coeff *= Complex{0.0, 1.0};
      return;
    }
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      skip_ws();
      Complex v = parse_signed_complex_literal();
      skip_ws();
      if (peek() != ')') {
        throw ParseError("unclosed '('", open);
      }
      ++pos_;
      t.coeff *= v;
      return;
    }
    // plain number, optionally an imaginary literal like "0.5i"
    double v = parse_number();
    if (peek() == 'i') {
      ++pos_;
      t.coeff *= Complex{0.0, v};
    } else {
      t.coeff *= v;
    }
  }

  // a, bi, a+bi, a-bi, i, -i (used inside parentheses and for CLI scalars)
  Complex parse_signed_complex_literal() {
    double sign1 = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign1 = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
      skip_ws();
    }
    double a;
    bool a_imag = false;
    if (peek() == 'i') {
      ++pos_;
      a = 1.0;
      a_imag = true;
    } else {
      a = parse_number();
      if (peek() == 'i') {
        ++pos_;
        a_imag = true;
      }
    }
    a *= sign1;
    skip_ws();
    if (a_imag || (peek() != '+' && peek() != '-')) {
      return a_imag ? Complex{0.0, a} : Complex{a, 0.0};
    }
    double sign2 = peek() == '-' ? -1.0 : 1.0;
    ++pos_;
    skip_ws();
    double b;
    if (peek() == 'i') {
      ++pos_;
      b = 1.0;
    } else {
      b = parse_number();
      if (peek() != 'i') {
        throw ParseError("expected 'i' after imaginary part", pos_);
      }
      ++pos_;
    }
    return {a, sign2 * b};
  }

  int parse_int_exponent() {
    skip_ws();
    std::size_t start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) {
      throw ParseError("expected an integer exponent", start);
    }
    int v = std::stoi(s_.substr(start, pos_ - start));
    if (v > 64) throw ParseError("exponent too large", start);
    return v;
  }

  double parse_number() {
    std::size_t start = pos_;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (pos_ == start) {
      throw ParseError("expected a number", start);
    }
    // scientific suffix, only when clearly followed by an exponent
    if ((peek() == 'e' || peek() == 'E') && pos_ + 1 < s_.size()) {
      char nxt = s_[pos_ + 1];
      if (std::isdigit(static_cast<unsigned char>(nxt)) || nxt == '+' ||
          nxt == '-') {
        ++pos_;
        if (peek() == '+' || peek() == '-') ++pos_;
        std::size_t ds = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
          ++pos_;
        if (pos_ == ds) throw ParseError("malformed exponent", ds);
      }
    }
    return std::stod(s_.substr(start, pos_ - start));
  }

  CoeffFamily assemble() const {
    int dmax = 0;
    for (const Term& t : terms_) dmax = std::max(dmax, t.zpow);
    CoeffFamily fam;
    fam.coeff_polys.assign(dmax + 1, ComplexPoly::constant(Complex{0.0}));
    for (const Term& t : terms_) {
      fam.coeff_polys[t.zpow] =
          fam.coeff_polys[t.zpow] + ComplexPoly::monomial(t.coeff, t.wpow);
    }
    return fam;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::vector<Term> terms_;
};

}  // namespace

CoeffFamily parse_map(const std::string& text) {
  return MapParser(text).parse();
}

Complex parse_complex(const std::string& text) {
  std::string t = text;
  // tolerate one layer of parentheses around the literal
  std::size_t b = t.find_first_not_of(" \t");
  std::size_t e = t.find_last_not_of(" \t");
  if (b != std::string::npos && t[b] == '(' && t[e] == ')') {
    t = t.substr(b + 1, e - b - 1);
  }
  return MapParser(t).parse_single_complex();
}

std::string format_complex(Complex z) {
  char buf[80];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12g", z.real());
  } else if (z.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.12gi", z.imag());
  } else {
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
  }
  return buf;
}

}  // namespace skewfatou
