#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cma {

using Rational = mpq_class;

/// Parses "3", "-7/2", "0.125", "1e-3" or "2^-7" into an exact rational.
/// Decimal and scientific forms are read exactly (0.7 becomes 7/10).
Rational parse_rational(std::string_view text);

/// "num/den" in lowest terms ("3/1" for integers).
std::string to_fraction_string(const Rational& q);

/// Rational closest to x with denominator 10^digits.
Rational round_to_decimal(double x, int digits = 15);

/// n/d in lowest terms. mpq_class(n, d) does not reduce, and unreduced
/// values compare unequal to their reduced form.
inline Rational ratio(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

inline Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace cma
