#pragma once

#include "cma/domain.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cma {

class PLConvexFunction;

/// Convex function sampled on the uniform lattice
///   x1 = lo1 + i*h (0 <= i < n1),  x2 = lo2 + j*h (0 <= j < n2)
/// covering a truncated log-domain. Node (i, j) is stored at j*n1 + i.
struct GridConvexFunction {
  double lo1 = 0, lo2 = 0, h = 1;
  int n1 = 0, n2 = 0;
  std::vector<double> values;
  LogDomain domain;
  double slope_bound = 0;

  double x1(int i) const { return lo1 + i * h; }
  double x2(int j) const { return lo2 + j * h; }
  double hi1() const { return x1(n1 - 1); }
  double hi2() const { return x2(n2 - 1); }
  std::size_t index(int i, int j) const { return std::size_t(j) * n1 + i; }
  double& at(int i, int j) { return values[index(i, j)]; }
  double at(int i, int j) const { return values[index(i, j)]; }

  /// Lattice [lo, hi]^2 with spacing h; hi - lo must be a multiple of h.
  static GridConvexFunction sample(double lo, double hi, double h,
                                   const std::function<double(double, double)>& f,
                                   LogDomain domain = LogDomain::quadrant());
  /// Samples a PL function on [-T, top]^2 (T = the function's truncation,
  /// rounded so the box is a whole number of cells).
  static GridConvexFunction from_pl(const PLConvexFunction& f, double h);

  /// Piecewise-linear interpolation on the triangulation used by ma_grid;
  /// points outside the lattice are clamped to it.
  double value(double x1, double x2) const;

  /// Largest amount by which a node exceeds the midpoint of an opposite
  /// axis or diagonal neighbour pair (0 for a discretely convex grid).
  double convexity_defect() const;
  /// Largest decrease along a positive axis step (0 for a monotone grid).
  double monotonicity_defect() const;
  double sup_distance(const GridConvexFunction& other) const;
  double sup_abs() const;

  /// Recomputes slope_bound from the largest axis difference quotient.
  void refresh_slope_bound();

  GridConvexFunction max_with(double level) const;

  void write_csv(std::ostream& os) const;
  static GridConvexFunction read_csv(std::istream& is);
};

/// Grid of the ball Green function (1/2) log(e^{2x1} + e^{2x2}) - log R on [-T, log R]^2.
GridConvexFunction ball_green_grid(double R, double T, double h);

}  // namespace cma
