#include "cma/sweep.hpp"

#include "cma/errors.hpp"
#include "cma/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cma {

SweepSchedule SweepSchedule::sublevel(const PLConvexFunction& g, std::vector<Rational> levels,
                                      double eps) {
  SweepSchedule s;
  s.kind = Kind::Sublevel;
  s.exhaustion = g;
  s.levels = std::move(levels);
  s.J = int(s.levels.size());
  s.eps_weak = eps;
  s.validate();
  return s;
}

SweepSchedule SweepSchedule::harmonic(const PLConvexFunction& g, int J, double eps) {
  std::vector<Rational> r;
  for (int j = 1; j <= J; ++j) r.push_back(Rational(-1, j));
  return sublevel(g, std::move(r), eps);
}

SweepSchedule SweepSchedule::log_levels(const PLConvexFunction& g, int J, double eps) {
  std::vector<Rational> r;
  for (int j = 2; j <= J + 1; ++j) r.push_back(round_to_decimal(std::log1p(-1.0 / j)));
  return sublevel(g, std::move(r), eps);
}

SweepSchedule SweepSchedule::dyadic_levels(const PLConvexFunction& g, int J, double eps) {
  std::vector<Rational> r;
  for (int j = 1; j <= J; ++j) {
    Rational q(1);
    q /= Rational(mpz_class(1) << j);
    r.push_back(-q);
  }
  return sublevel(g, std::move(r), eps);
}

SweepSchedule SweepSchedule::dyadic_boxes(int J, double eps) {
  SweepSchedule s;
  s.kind = Kind::DyadicBoxes;
  s.J = J;
  s.eps_weak = eps;
  s.validate();
  return s;
}

void SweepSchedule::validate() const {
  if (kind == Kind::DyadicBoxes) {
    if (J < 1) throw InvalidInput("schedule needs at least one region");
    return;
  }
  if (!exhaustion) throw InvalidInput("sublevel schedule without an exhaustion function");
  if (levels.empty()) throw InvalidInput("sublevel schedule without levels");
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (levels[j] >= 0) throw InvalidInput("sublevel levels must be negative");
    if (j > 0 && levels[j] <= levels[j - 1])
      throw InvalidInput("sublevel levels must increase strictly");
  }
}

std::optional<FreeRegion> fundamental_sequence(const LogDomain& domain,
                                               const SweepSchedule& schedule, int j) {
  if (j < 1 || j > schedule.size()) return std::nullopt;
  if (schedule.kind == SweepSchedule::Kind::Sublevel) {
    FreeRegion K = FreeRegion::sublevel(schedule.exhaustion->on_domain(domain), schedule.levels[j - 1]);
    return K;
  }
  Rational delta(1);
  delta /= Rational(mpz_class(1) << j);
  return FreeRegion::lower_box(domain.top() - delta, domain.top() - delta);
}

ToricFunction sweep_out(const ToricFunction& u, const FreeRegion& K,
                        const GridEnvelopeOptions& opts) {
  const bool ownSublevel = K.kind == FreeRegion::Kind::Sublevel;
  if (u.is_pl()) {
    const auto& f = u.pl();
    if (ownSublevel && K.exhaustion->pieces() == f.pieces()) {
      K.check_compact_in(f.domain());
      return ToricFunction(pl_max(f, PLConvexFunction::constant(K.level, f.domain())));
    }
    return ToricFunction(partial_convex_envelope(f, K));
  }
  const auto& g = u.grid();
  if (ownSublevel && u.source() && K.exhaustion->pieces() == u.source()->pieces()) {
    K.check_compact_in(g.domain);
    return ToricFunction(g.max_with(K.level.get_d()),
                         pl_max(*u.source(), PLConvexFunction::constant(K.level, g.domain)));
  }
  return ToricFunction(partial_convex_envelope(g, K, opts));
}

DemaillySplit demailly_split(const PLConvexFunction& u, const Rational& r) {
  PLConvexFunction ur = pl_max(u, PLConvexFunction::constant(r, u.domain()));
  const Rational top = u.domain().top();
  auto outside = [&top](const QPoint& x) { return x.x > top || x.y > top; };

  DemaillySplit s;
  std::map<QPoint, Rational> kept;
  for (const auto& a : kink_atoms(u)) {
    if (u.value(a.x) < r) continue;
    kept[a.x] = a.mass;
    if (outside(a.x))
      s.interior.exterior_mass += a.mass;
    else
      s.interior.atoms.push_back(a);
  }
  bool first = true;
  for (const auto& a : kink_atoms(ur)) {
    Rational m = a.mass;
    auto it = kept.find(a.x);
    if (it != kept.end()) {
      m -= it->second;
      kept.erase(it);
    }
    if (m == 0) continue;
    if (first || m < s.min_sphere_mass) s.min_sphere_mass = m;
    first = false;
    if (u.value(a.x) != r) s.off_level_mass += abs_q(m);
    if (outside(a.x))
      s.sphere.exterior_mass += m;
    else
      s.sphere.atoms.push_back({a.x, m});
  }
  // interior atoms that vanished from ma(max(u, r)) would be a negative charge
  for (const auto& [x, m] : kept) {
    if (first || -m < s.min_sphere_mass) s.min_sphere_mass = -m;
    first = false;
    s.off_level_mass += m;
  }
  s.sphere.pole_mass = pole_mass(ur);
  Rational before = pole_mass(u);
  for (const auto& a : kink_atoms(u)) before += a.mass;
  s.residual = s.interior.total_mass() + s.sphere.total_mass() - before;
  return s;
}

GridDemaillySplit demailly_split(const GridConvexFunction& u, double r) {
  GridConvexFunction ur = u.max_with(r);
  GridMA mu = ma_grid_nodes(u), mr = ma_grid_nodes(ur);
  GridMA inner, sphere;
  inner.node_mass.assign(mu.node_mass.size(), 0.0);
  sphere.node_mass.assign(mu.node_mass.size(), 0.0);
  GridDemaillySplit s;
  const double band = u.slope_bound * u.h * std::sqrt(2.0) + 1e-12;
  for (std::size_t k = 0; k < mu.node_mass.size(); ++k) {
    if (u.values[k] >= r) inner.node_mass[k] = mu.node_mass[k];
    sphere.node_mass[k] = mr.node_mass[k] - inner.node_mass[k];
    s.min_sphere_mass = std::min(s.min_sphere_mass, sphere.node_mass[k]);
    if (std::abs(u.values[k] - r) > band) s.off_level_mass += std::abs(sphere.node_mass[k]);
  }
  inner.boundary_mass = mu.boundary_mass;
  sphere.boundary_mass = mr.boundary_mass - mu.boundary_mass;
  sphere.pole_mass = mr.pole_mass;
  s.interior = to_measure(u, inner);
  s.sphere = to_measure(u, sphere);
  s.residual = s.interior.total_mass() + s.sphere.total_mass() - mu.total_mass();
  return s;
}

}  // namespace cma
