#pragma once

#include "cma/grid_function.hpp"
#include "cma/pl_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cma {

/// a*x1 + b*x2 + c >= 0
struct HalfPlane {
  Rational a, b, c;
};
/// Intersection of half-planes (always further cut by x <= top of the domain).
using ConvexRegion = std::vector<HalfPlane>;

/// Open set K that a sweep is allowed to move mass out of. In log coordinates
/// K may reach x -> -inf (a neighbourhood of the axes is still compact in C^2);
/// it must stay away from the top faces of the domain.
struct FreeRegion {
  enum class Kind { Empty, Sublevel, Box };
  Kind kind = Kind::Empty;

  // Sublevel: {exhaustion < level}
  std::optional<PLConvexFunction> exhaustion;
  Rational level = 0;

  // Box: lo1 < x1 < hi1, lo2 < x2 < hi2; a missing lower bound means -inf.
  bool has_lo1 = false, has_lo2 = false;
  Rational lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;

  static FreeRegion empty() { return {}; }
  static FreeRegion sublevel(const PLConvexFunction& g, const Rational& r);
  /// {x1 < hi1, x2 < hi2}
  static FreeRegion lower_box(const Rational& hi1, const Rational& hi2);
  static FreeRegion box(const Rational& lo1, const Rational& hi1, const Rational& lo2,
                        const Rational& hi2);

  bool contains(double x1, double x2) const;
  /// Closed complement D \ K as a union of convex pieces (overlaps allowed).
  std::vector<ConvexRegion> complement_pieces() const;
  /// Throws InvalidInput when the closure of K meets the top faces of d.
  void check_compact_in(const LogDomain& d) const;
  std::string describe() const;
};

/// Largest convex function with nonnegative slopes lying below f on D \ K
/// (exact: vertices of the constraint LP in slope/offset space).
PLConvexFunction partial_convex_envelope(const PLConvexFunction& f, const FreeRegion& K);

/// Same envelope with the constraint set given directly.
PLConvexFunction envelope_on_regions(const PLConvexFunction& f,
                                     const std::vector<ConvexRegion>& constraint);

/// Envelope constrained only on the top faces {x1 = top} and {x2 = top}: the
/// limit of the sweeps over an exhausting sequence (smallest maximal majorant).
PLConvexFunction face_envelope(const PLConvexFunction& f);

struct GridEnvelopeOptions {
  double tolerance = 1e-8;   // stop when the sup-change of a sweep falls below
  long max_sweeps = 200000;
};

struct GridEnvelopeStats {
  long sweeps = 0;
  double last_change = 0;
};

/// Grid path: midpoint lowering over axis and diagonal stencils (plus the
/// monotone step constraint), red-black ordered, starting from an upper bound
/// built from axis chords. Nodes outside K keep the values of f.
GridConvexFunction partial_convex_envelope(const GridConvexFunction& f, const FreeRegion& K,
                                           const GridEnvelopeOptions& opts = {},
                                           GridEnvelopeStats* stats = nullptr);

}  // namespace cma
