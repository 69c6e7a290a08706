#pragma once

#include "cma/boundary.hpp"
#include "cma/domain.hpp"
#include "cma/grid_function.hpp"
#include "cma/measure.hpp"
#include "cma/report.hpp"

#include <string>
#include <vector>

namespace cma {

/// Polydisc of radius 1 + 1/k in log coordinates: {x < log(1 + 1/k)}, the
/// shift rounded to a rational with denominator 10^15.
LogDomain enlarge(const LogDomain& base, int k);

/// Convex domain for the Dirichlet problem in log coordinates.
///  Polydisc: {x < s}, solutions nondecreasing with zero limit at the faces.
///  Square:   [-a, a]^2 (plain real Monge-Ampere test bed), zero on the boundary.
struct DirichletDomain {
  enum class Kind { Polydisc, Square };
  Kind kind = Kind::Polydisc;
  double s = 0;     // polydisc top
  double half = 1;  // square half-width

  static DirichletDomain polydisc(double s) { return {Kind::Polydisc, s, 1}; }
  static DirichletDomain square(double a) { return {Kind::Square, 0, a}; }
  bool contains(double x1, double x2) const;
};

struct Affine {
  double a1, a2, c;
  double operator()(double x1, double x2) const { return a1 * x1 + a2 * x2 + c; }
};

struct DirichletSolution {
  DirichletDomain domain;
  std::vector<Atom> target;     // atoms actually solved for
  std::vector<double> heights;  // solution value at each target atom
  std::vector<Affine> pieces;   // the solution is the max of these
  int iterations = 0;
  double residual = 0;  // max |2 area(cell) - mass|

  double value(double x1, double x2) const;
  /// Samples on the lattice {lo + i h} over [lo, hi]^2.
  GridConvexFunction to_grid(double lo, double hi, double h) const;
};

struct DirichletOptions {
  double tolerance = 1e-12;  // relative to the total mass
  int max_iterations = 200;
};

/// Aleksandrov solution of ma(u) = target with zero boundary values: heights
/// at the atoms by damped Newton on the cell areas of the Legendre dual.
/// Throws NotConverged with the residual if Newton stalls.
DirichletSolution ma_dirichlet(const std::vector<Atom>& target, const DirichletDomain& domain,
                               const DirichletOptions& opts = {});

/// Mass-preserving atomization of a toric measure: atoms are kept, circle x
/// disc laws are split onto the lattice {j h} of the free coordinate with hat
/// weights, disc x disc laws onto the 2D lattice. Tails below -tail are
/// lumped onto the lowest node.
std::vector<Atom> atomize(const LogMeasure& m, double h, double tail = 8.0);

/// ma(u^j) for the inward sweep of a Dirichlet solution on the polydisc over
/// the box {x < -delta}.
LogMeasure inward_sweep_ma(const DirichletSolution& u, double delta);
/// u^j itself.
double inward_sweep_value(const DirichletSolution& u, double delta, double x1, double x2);

/// Diagonal choice: for each k the smallest j (not below the previous one)
/// whose dictionary gap to the target is below tol[k]; the last index when
/// the budget runs out. With `improving`, the gap must also beat the one
/// selected for k - 1 (still a valid choice for the diagonal argument).
std::vector<int> diagonal_select(const std::vector<std::vector<double>>& gaps,
                                 const std::vector<double>& tol,
                                 std::vector<std::string>* warnings = nullptr,
                                 bool improving = false);

struct PipelineOptions {
  int k_max = 8;
  double h = 1.0 / 128;
  int K = 4;
  int j_max = 24;              // boxes {x < -2^-j}
  double tol_scale = 0.25;     // j_k: gap below tol_scale / k
  bool improving = true;       // and below the previous selected gap
  double tail = 8.0;
};

struct PipelineRow {
  int k = 0;
  double shift = 0;
  int j = 0;
  double distance = 0;
  double mass = 0;
  double max_vanishing = 0;  // max over bounded F dictionary of |int t d ma(w_k)|
  int newton_iterations = 0;
};

struct PipelineState {
  LogMeasure target;
  std::vector<PipelineRow> rows;
  std::vector<DirichletSolution> solutions;
  std::vector<LogMeasure> w_measures;
  std::vector<std::vector<double>> vanishing;  // per k, per dictionary member
  Report report{"measure_pipeline"};

  void write_csv(std::ostream& os) const;
};

PipelineState measure_pipeline(const LogMeasure& mu, const PipelineOptions& opts = {});

/// int phi dnu <= int phi dmu over a psh dictionary, and the constructive
/// direction with mu' = nu(Omega)^-1 mu_{P_nu}.
Report mes_ineq_check(const LogMeasure& mu, const LogMeasure& nu,
                      const std::vector<PLConvexFunction>& dict = psh_dictionary(),
                      bool constructive = true);

}  // namespace cma
