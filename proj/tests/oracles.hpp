#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the geometry of the library: hulls are gift-wrapped from scratch.

#include "cma/pl_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

using cma::QPoint;
using cma::Rational;

inline Rational orient(const QPoint& o, const QPoint& a, const QPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Twice the area of the convex hull (Jarvis march, exact).
inline Rational twice_hull_area(std::vector<QPoint> pts) {
  if (pts.size() < 3) return 0;
  auto start = *std::min_element(pts.begin(), pts.end(), [](const QPoint& a, const QPoint& b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });
  std::vector<QPoint> hull;
  QPoint p = start;
  do {
    hull.push_back(p);
    QPoint q = p == pts[0] ? pts[1] : pts[0];
    for (const auto& r : pts) {
      if (r == p) continue;
      Rational o = orient(p, q, r);
      auto d2 = [&](const QPoint& s) -> Rational { return (s.x - p.x) * (s.x - p.x) + (s.y - p.y) * (s.y - p.y); };
      if (o < 0 || (o == 0 && d2(r) > d2(q))) q = r;
    }
    p = q;
  } while (!(p == start) && hull.size() <= pts.size());
  Rational twice = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice < 0 ? Rational(-twice) : twice;
}

// Total Monge-Ampere mass of a PL function with nonnegative slopes over the
// whole quadrant, pole included: 2 area conv(slopes and 0).
inline Rational total_mass(const cma::PLConvexFunction& f) {
  std::vector<QPoint> s{{0, 0}};
  for (const auto& p : f.pieces()) s.push_back(p.slope());
  return twice_hull_area(s);
}

// f at x -> (-inf, -inf): the largest constant piece, -inf without one.
inline double pole_value(const cma::PLConvexFunction& f) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : f.pieces())
    if (p.a1 == 0 && p.a2 == 0) v = std::max(v, p.c.get_d());
  return v;
}

// Solution of the real Monge-Ampere equation on [-a, a]^2 with one atom of
// mass m at the origin and zero boundary values: c (|x|_inf - a), 4 c^2 = m
// (the subgradient image of the cone is a diamond of area 2 c^2).
inline double gauge_cone(double m, double a, double x, double y) {
  return std::sqrt(m / 4) * (std::max(std::abs(x), std::abs(y)) - a);
}

// Mean of ((1 + e^{it}) / 2)^k over the circle by an N-point rule, exact for
// k < N: the constant Fourier coefficient, 2^-k.
inline double peak_circle_mean(int k, int N = 256) {
  double re = 0;
  for (int n = 0; n < N; ++n) {
    double t = 2 * M_PI * n / N;
    // (1 + e^{it}) / 2 = cos(t/2) e^{it/2}
    double mod = std::pow(std::cos(t / 2), k);
    re += mod * std::cos(k * t / 2);
  }
  return re / N;
}

}  // namespace oracle
