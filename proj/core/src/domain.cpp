#include "cma/domain.hpp"

#include <cmath>
#include <sstream>

namespace cma {

bool LogDomain::contains(double x1, double x2) const {
  if (kind == Kind::BallLog) return std::exp(2 * x1) + std::exp(2 * x2) < radius * radius;
  double t = top_d();
  return x1 < t && x2 < t;
}

bool LogDomain::contains_closed(double x1, double x2, double tol) const {
  if (kind == Kind::BallLog)
    return std::exp(2 * x1) + std::exp(2 * x2) <= radius * radius * (1 + tol);
  double t = top_d();
  return x1 <= t + tol && x2 <= t + tol;
}

std::string LogDomain::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Quadrant: os << "bidisc"; break;
    case Kind::ShiftedQuadrant: os << "polydisc(log r = " << shift.get_d() << ")"; break;
    case Kind::BallLog: os << "ball(R = " << radius << ")"; break;
  }
  return os.str();
}

Face classify_point(const LogDomain& d, double x1, double x2, double delta) {
  if (d.kind == LogDomain::Kind::BallLog) {
    double r2 = std::exp(2 * x1) + std::exp(2 * x2);
    return std::abs(std::sqrt(r2) - d.radius) <= delta ? Face::EdgeX1 : Face::Interior;
  }
  double t = d.top_d();
  bool on1 = std::abs(x1 - t) <= delta;
  bool on2 = std::abs(x2 - t) <= delta;
  if (on1 && on2) return Face::Corner;
  if (on1) return Face::EdgeX1;
  if (on2) return Face::EdgeX2;
  double trunc = d.truncation.get_d();
  if (trunc > 0 && (x1 <= -trunc + delta || x2 <= -trunc + delta)) return Face::Truncation;
  return Face::Interior;
}

const char* face_name(Face f) {
  switch (f) {
    case Face::Corner: return "corner";
    case Face::EdgeX1: return "edge_x1";
    case Face::EdgeX2: return "edge_x2";
    case Face::Truncation: return "truncation";
    case Face::Interior: return "interior";
  }
  return "?";
}

}  // namespace cma
