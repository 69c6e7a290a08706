#include "cma/rational.hpp"

#include "cma/errors.hpp"

#include <cctype>
#include <cmath>

namespace cma {

namespace {

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

Rational parse_decimal(const std::string& s) {
  std::size_t epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  long exponent = 0;
  if (epos != std::string::npos) {
    try {
      exponent = std::stol(s.substr(epos + 1));
    } catch (const std::exception&) {
      throw InvalidInput("bad exponent in number '" + s + "'");
    }
  }
  bool neg = false;
  std::size_t i = 0;
  if (i < mant.size() && (mant[i] == '-' || mant[i] == '+')) {
    neg = mant[i] == '-';
    ++i;
  }
  std::string digits;
  long frac = 0;
  bool dot = false;
  for (; i < mant.size(); ++i) {
    char ch = mant[i];
    if (ch == '.' && !dot) {
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      if (dot) ++frac;
    } else {
      throw InvalidInput("bad character in number '" + s + "'");
    }
  }
  if (digits.empty()) throw InvalidInput("empty number '" + s + "'");
  Rational q(mpz_class(digits, 10));
  q *= pow10(exponent - frac);
  if (neg) q = -q;
  q.canonicalize();
  return q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw InvalidInput("empty rational");
  if (auto caret = s.find('^'); caret != std::string::npos) {
    Rational base = parse_rational(s.substr(0, caret));
    long e = 0;
    try {
      e = std::stol(s.substr(caret + 1));
    } catch (const std::exception&) {
      throw InvalidInput("bad power in '" + s + "'");
    }
    Rational r(1);
    for (long k = 0; k < (e < 0 ? -e : e); ++k) r *= base;
    if (e < 0) {
      if (r == 0) throw InvalidInput("zero to a negative power");
      r = 1 / r;
    }
    return r;
  }
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_decimal(trim(s.substr(0, slash)));
    Rational den = parse_decimal(trim(s.substr(slash + 1)));
    if (den == 0) throw InvalidInput("zero denominator in '" + s + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  return parse_decimal(s);
}

std::string to_fraction_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational round_to_decimal(double x, int digits) {
  if (!std::isfinite(x)) throw InvalidInput("cannot round a non-finite value");
  Rational scale = pow10(digits);
  Rational scaled(x);
  scaled *= scale;
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  Rational lo(n), frac = scaled - lo;
  if (frac * 2 >= 1) lo += 1;
  Rational q = lo / scale;
  q.canonicalize();
  return q;
}

}  // namespace cma
