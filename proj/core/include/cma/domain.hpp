#pragma once

#include "cma/rational.hpp"

#include <string>

namespace cma {

/// Reinhardt domain in C^2 seen through x = (log|z|, log|w|).
///  - Quadrant:        unit bidisc, {x1 < 0, x2 < 0}
///  - ShiftedQuadrant: polydisc of radius e^s, {x1 < s, x2 < s}
///  - BallLog:         ball of radius R, {e^{2x1} + e^{2x2} < R^2}
/// Unbounded directions are cut at -truncation; a zero truncation means
/// "choose automatically" for the object placed on the domain.
struct LogDomain {
  enum class Kind { Quadrant, ShiftedQuadrant, BallLog };

  Kind kind = Kind::Quadrant;
  Rational shift = 0;
  double radius = 1.0;
  Rational truncation = 0;

  static LogDomain quadrant() { return {}; }
  static LogDomain shifted(const Rational& s) {
    LogDomain d;
    d.kind = Kind::ShiftedQuadrant;
    d.shift = s;
    return d;
  }
  static LogDomain ball(double R = 1.0) {
    LogDomain d;
    d.kind = Kind::BallLog;
    d.radius = R;
    return d;
  }

  bool is_polydisc() const { return kind != Kind::BallLog; }

  /// Upper face coordinate of a polydisc domain.
  Rational top() const { return kind == Kind::ShiftedQuadrant ? shift : Rational(0); }
  double top_d() const { return top().get_d(); }

  bool contains(double x1, double x2) const;
  bool contains_closed(double x1, double x2, double tol = 0.0) const;

  std::string describe() const;
};

/// Labels of the boundary pieces used by support checks.
enum class Face { Corner, EdgeX1, EdgeX2, Truncation, Interior };

/// Classifies a point of the closed domain against its faces with slack delta.
/// EdgeX1 is {x1 = top}, EdgeX2 is {x2 = top}; Corner is both.
Face classify_point(const LogDomain& d, double x1, double x2, double delta);

const char* face_name(Face f);

}  // namespace cma
