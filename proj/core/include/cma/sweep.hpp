#pragma once

#include "cma/envelope.hpp"
#include "cma/measure.hpp"
#include "cma/toric.hpp"

#include <optional>
#include <vector>

namespace cma {

/// Fundamental sequence {K_j} driving a sweep, plus the stopping rule used by
/// weak* limits (moment Cauchy gap below eps_weak, or J exhausted).
struct SweepSchedule {
  enum class Kind { Sublevel, DyadicBoxes };
  Kind kind = Kind::DyadicBoxes;
  std::optional<PLConvexFunction> exhaustion;
  std::vector<Rational> levels;  // Sublevel: strictly increasing, negative
  int J = 10;                    // DyadicBoxes: margins 2^-1 .. 2^-J
  double eps_weak = 1e-6;

  static SweepSchedule sublevel(const PLConvexFunction& g, std::vector<Rational> levels,
                                double eps = 1e-6);
  /// r_j = -1/j, j = 1..J
  static SweepSchedule harmonic(const PLConvexFunction& g, int J, double eps = 1e-6);
  /// r_j = log(1 - 1/j), j = 2..J+1, each rounded to a rational with denominator 10^15
  static SweepSchedule log_levels(const PLConvexFunction& g, int J, double eps = 1e-6);
  /// r_j = -2^-j, j = 1..J
  static SweepSchedule dyadic_levels(const PLConvexFunction& g, int J, double eps = 1e-6);
  static SweepSchedule dyadic_boxes(int J, double eps = 1e-6);

  int size() const { return kind == Kind::Sublevel ? int(levels.size()) : J; }
  /// Throws InvalidInput unless the regions strictly increase toward the domain.
  void validate() const;
};

/// K_j for 1 <= j <= size(); nullopt once the schedule is exhausted.
std::optional<FreeRegion> fundamental_sequence(const LogDomain& domain,
                                               const SweepSchedule& schedule, int j);

/// u^j = sup{phi psh : phi <= u off K}. Sublevel sets of u itself take the
/// exact fast path max(u, r); everything else goes through the envelope.
ToricFunction sweep_out(const ToricFunction& u, const FreeRegion& K,
                        const GridEnvelopeOptions& opts = {});

/// Demailly's split of ma(max(u, r)) into the restriction of ma(u) to {u >= r}
/// and the charge swept onto the level set {u = r}.
struct DemaillySplit {
  ExactMeasure interior;
  ExactMeasure sphere;
  Rational residual;        // mass(interior) + mass(sphere) - mass(ma(u))
  Rational min_sphere_mass; // smallest sphere atom (0 if none)
  Rational off_level_mass;  // sphere mass at points with u != r
};
DemaillySplit demailly_split(const PLConvexFunction& u, const Rational& r);

struct GridDemaillySplit {
  LogMeasure interior;
  LogMeasure sphere;
  double residual = 0;
  double min_sphere_mass = 0;
  double off_level_mass = 0;  // farther than one cell from {u = r}
};
GridDemaillySplit demailly_split(const GridConvexFunction& u, double r);

}  // namespace cma
