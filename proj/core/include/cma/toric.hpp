#pragma once

#include "cma/grid_function.hpp"
#include "cma/measure.hpp"
#include "cma/pl_function.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cma {

/// Cegrell-class membership; an empty optional means "unknown".
struct ClassFlags {
  std::optional<bool> E0, F, Fa, N, M, bounded;
  /// Notes on surrogate tests (e.g. the Fa test from toric data).
  std::vector<std::string> notes;

  std::string to_string() const;
};

/// Toric psh function u(z, w) = f(log|z|, log|w|).
class ToricFunction {
 public:
  ToricFunction(PLConvexFunction f);  // NOLINT: implicit on purpose
  ToricFunction(GridConvexFunction f, std::optional<PLConvexFunction> source = std::nullopt);

  bool is_pl() const { return std::holds_alternative<PLConvexFunction>(rep_); }
  const PLConvexFunction& pl() const { return std::get<PLConvexFunction>(rep_); }
  const GridConvexFunction& grid() const { return std::get<GridConvexFunction>(rep_); }
  /// PL function a grid was sampled from, if any.
  const std::optional<PLConvexFunction>& source() const { return source_; }
  const LogDomain& domain() const;

  double value(double x1, double x2) const;
  double value_rho(double rho1, double rho2) const;
  /// Monge-Ampere measure: exact for PL (converted), ma_grid otherwise.
  LogMeasure ma() const;
  std::string describe() const;

  ClassFlags flags;

 private:
  std::variant<PLConvexFunction, GridConvexFunction> rep_;
  std::optional<PLConvexFunction> source_;
};

/// Toric measures are LogMeasures read through the orbit interpretation.
using ToricMeasure = LogMeasure;

ClassFlags classify(const ToricFunction& u);

/// Built-in Reinhardt measure specs:
///   orbitAtom(r1, r2, mass) | sigma(r) (= sigma_r x sigma_r) |
///   product(L1, L2[, mass]) with Li = sigma(r) | discV(r) | zero
/// and sums "a + b" with optional scalar prefixes "2*...".
ToricMeasure push_measure(const std::string& spec);

/// Integral of a test function against a toric measure.
double pull_integral(const ToricMeasure& m, const Integrand& phi);

/// Green function with a weighted pole at the origin:
/// bidisc / polydisc: PL max(a(x1 - s), b(x2 - s)); ball (a = b = 1 only): grid.
ToricFunction green_origin(const Rational& a, const Rational& b, const LogDomain& domain,
                           double h = 1.0 / 128, double truncation = 6);

struct PotentialOptions {
  double h = 1.0 / 32;
  double truncation = 4;
  int angles = 512;      // angular samples per coordinate
  int radial_order = 24; // quadrature nodes for disc laws
};

/// Pluricomplex potential P(z) = int g(z, zeta) dnu(zeta) on the bidisc with the
/// product Moebius kernel; orbit averages by angular sampling.
ToricFunction potential(const ToricMeasure& nu, const PotentialOptions& opts = {});

struct MajorantResult {
  PLConvexFunction limit;
  bool is_zero = false;
  std::vector<double> sweep_gap;  // sup over samples of |u^j - limit|
};

/// Smallest maximal majorant of a PL function: sweeps over the dyadic boxes
/// {x < top - 2^-j}, j = 1..J, and their exact limit (the envelope of the
/// restriction to the top faces).
MajorantResult maximal_majorant(const PLConvexFunction& u, int J = 10);

}  // namespace cma
