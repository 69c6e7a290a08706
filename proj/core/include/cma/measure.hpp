#pragma once

#include "cma/geometry.hpp"
#include "cma/rational.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cma {

/// Radial law of one coordinate of a Reinhardt product measure.
///  Circle: normalized arc length on |z| = radius (a point in log space).
///  Disc:   normalized area on |z| < radius; in log space the density is
///          2 e^{2(t - log radius)} on (-inf, log radius].
struct CoordLaw {
  enum class Kind { Circle, Disc };
  Kind kind = Kind::Circle;
  double radius = 1.0;

  static CoordLaw circle(double r) { return {Kind::Circle, r}; }
  static CoordLaw disc(double r) { return {Kind::Disc, r}; }
};

/// mass * (law1 x law2), torus invariant.
struct ProductLaw {
  CoordLaw first, second;
  double mass = 1.0;
};

struct Atom {
  double x1, x2;
  double mass;
};

/// Test integrand on a Reinhardt domain, given through its average over the
/// torus orbit {|z| = rho1, |w| = rho2}. Radii may be 0 (the axes / origin).
struct Integrand {
  std::string name;
  std::function<double(double rho1, double rho2)> orbit_average;

  double operator()(double rho1, double rho2) const { return orbit_average(rho1, rho2); }

  /// |z|^k |w|^l, i.e. e^{k x1 + l x2}.
  static Integrand exp_moment(int k, int l);
  /// Toric function given in log coordinates; -inf inputs are passed through.
  static Integrand from_log(std::string name, std::function<double(double, double)> f);
  /// Holomorphic polynomial sum c_{pq} z^p w^q: the orbit average keeps c_00.
  static Integrand holomorphic(std::string name, double constant_coefficient);
  static Integrand one();
};

/// Positive measure in log coordinates: atoms (torus orbits), product laws
/// (circle x disc lines, disc x disc areas), a mass at the origin (the pole,
/// x -> -inf) and an unlocated mass sitting on the outer boundary of a grid.
struct LogMeasure {
  std::vector<Atom> atoms;
  std::vector<ProductLaw> products;
  double pole_mass = 0.0;
  double boundary_mass = 0.0;

  double total_mass() const;
  /// Mass inside the domain (excludes boundary_mass).
  double interior_mass() const;
  double integrate(const Integrand& f) const;
  /// Integral of f*g where g is a log-space weight (used by weighted limits).
  double integrate_weighted(const Integrand& f, const std::function<double(double, double)>& weight_rho) const;

  LogMeasure& operator+=(const LogMeasure& other);
  LogMeasure scaled(double s) const;
  bool is_zero(double tol = 0.0) const;
  double min_mass() const;
};

/// Measure produced by the exact path: rational atoms plus a rational pole mass.
struct ExactAtom {
  QPoint x;
  Rational mass;
};

struct ExactMeasure {
  std::vector<ExactAtom> atoms;
  Rational pole_mass = 0;
  /// Mass of kink vertices lying outside the closed domain.
  Rational exterior_mass = 0;

  Rational total_mass() const;
  Rational interior_mass() const { return total_mass() - exterior_mass; }
  /// Restriction to the domain (exterior mass dropped).
  LogMeasure to_log() const;
  /// Atom mass at exactly x (0 if none).
  Rational mass_at(const QPoint& x) const;
};

/// Gauss-Legendre nodes/weights on (0,1).
struct Quadrature {
  std::vector<double> nodes, weights;
  static const Quadrature& gauss_legendre(int n);
};

/// Integral of f over one radial law; f takes the radius.
double integrate_law(const CoordLaw& law, const std::function<double(double)>& f, int order = 96);

}  // namespace cma
