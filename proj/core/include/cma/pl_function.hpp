#pragma once

#include "cma/domain.hpp"
#include "cma/geometry.hpp"
#include "cma/rational.hpp"

#include <string>
#include <vector>

namespace cma {

/// a1*x1 + a2*x2 + c with exact coefficients.
struct AffinePiece {
  Rational a1, a2, c;

  Rational value(const QPoint& x) const { return a1 * x.x + a2 * x.y + c; }
  double value(double x1, double x2) const;
  QPoint slope() const { return {a1, a2}; }

  friend bool operator==(const AffinePiece& p, const AffinePiece& q) {
    return p.a1 == q.a1 && p.a2 == q.a2 && p.c == q.c;
  }
  friend bool operator<(const AffinePiece& p, const AffinePiece& q) {
    if (p.a1 != q.a1) return p.a1 < q.a1;
    if (p.a2 != q.a2) return p.a2 < q.a2;
    return p.c < q.c;
  }
};

/// Exact piecewise-linear convex function max_i (a_i . x + c_i) on a polydisc
/// log-domain. Slopes are nonnegative so that u(z,w) = f(log|z|, log|w|) is
/// plurisubharmonic across the coordinate axes. The piece list is kept in
/// canonical form: sorted lexicographically, one piece per slope, and every
/// piece is the strict maximum on a set of positive area inside the truncated
/// domain.
class PLConvexFunction {
 public:
  explicit PLConvexFunction(std::vector<AffinePiece> pieces,
                            LogDomain domain = LogDomain::quadrant());

  static PLConvexFunction constant(const Rational& c, LogDomain domain = LogDomain::quadrant());

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const LogDomain& domain() const { return domain_; }
  std::size_t size() const { return pieces_.size(); }

  /// Truncation depth T: the box [-T, top]^2 contains every kink vertex and
  /// every crossing of a kink line with the top faces, with margin.
  const Rational& truncation() const { return truncation_; }

  Rational value(const QPoint& x) const;
  double value(double x1, double x2) const;
  /// Value at (log rho1, log rho2); a zero radius means that coordinate is
  /// -infinity, where pieces with positive slope in it drop out.
  double value_rho(double rho1, double rho2) const;

  /// Indices of the pieces attaining the maximum at x.
  std::vector<std::size_t> active(const QPoint& x) const;

  /// Region of the truncated domain where piece i is maximal.
  Polygon cell(std::size_t i) const;

  PLConvexFunction scaled(const Rational& factor) const;
  PLConvexFunction plus(const PLConvexFunction& other) const;
  PLConvexFunction plus_constant(const Rational& c) const;
  PLConvexFunction on_domain(const LogDomain& d) const;

  /// True when a constant piece is present (f bounded below).
  bool bounded_below() const;

  std::string to_string() const;

  friend bool operator==(const PLConvexFunction& f, const PLConvexFunction& g) {
    return f.pieces_ == g.pieces_;
  }

 private:
  void canonicalize();

  std::vector<AffinePiece> pieces_;
  LogDomain domain_;
  Rational truncation_;
};

/// Canonical form of the pointwise maximum.
PLConvexFunction pl_max(const PLConvexFunction& f, const PLConvexFunction& g);

/// Convex hull of the slopes of the pieces active at x.
Polygon subdifferential(const PLConvexFunction& f, const QPoint& x);

/// Truncation rule shared by all PL objects: 2 * (max |kink coordinate|) + 4,
/// rounded up to an integer, never below the domain's explicit truncation.
Rational auto_truncation(const std::vector<AffinePiece>& pieces, const LogDomain& domain);

/// True when f <= g on the whole domain (checked on cell vertices of g inside
/// the truncation box and at twice the truncation depth for the tails).
bool pl_less_equal(const PLConvexFunction& f, const PLConvexFunction& g);

}  // namespace cma
