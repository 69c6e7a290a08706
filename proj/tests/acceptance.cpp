// Acceptance run: one PASS/FAIL line per criterion, reference values from
// oracles.hpp or closed forms worked out by hand in the comments.

#include "oracles.hpp"

#include "cma/boundary.hpp"
#include "cma/masolver.hpp"
#include "cma/monge_ampere.hpp"
#include "cma/random_pl.hpp"
#include "cma/serialize.hpp"
#include "cma/sweep.hpp"
#include "cma/toric.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace cma;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const std::string& name, const std::function<bool(std::ostream&)>& body) {
  std::ostringstream detail;
  auto t0 = Clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!ok) ++failures;
  std::printf("%s  %2d  %-34s %7.2f s  %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), secs,
              detail.str().c_str());
  std::fflush(stdout);
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

int main() {
  criterion(1, "green function, log sublevels", [](std::ostream& os) {
    auto t0 = Clock::now();
    const LogDomain D = LogDomain::quadrant();
    ToricFunction g = green_origin(1, 1, D);
    const PLConvexFunction& f = g.pl();
    const int J = 500;
    auto sched = SweepSchedule::log_levels(f, J, 1e-4);
    BoundaryMeasure bm = boundary_measure(g, sched, MomentDictionary::standard(), true);
    double secs = since(t0);
    // max(x1, x2, r) kinks only at (r, r); subgradients fill the unit simplex,
    // so each sweep is one atom of mass 2 * 1/2 = 1 there.
    bool history = int(bm.exact_history.size()) == bm.steps && bm.steps > 0;
    for (int j = 0; history && j < bm.steps; ++j) {
      const auto& m = bm.exact_history[j];
      double r = std::log(1 - 1.0 / (j + 2));
      history = m.atoms.size() == 1 && m.pole_mass == 0 && m.exterior_mass == 0 && m.atoms[0].mass == 1 &&
                m.atoms[0].x.x == m.atoms[0].x.y && std::abs(m.atoms[0].x.x.get_d() - r) < 1e-14;
    }
    const ExactMeasure& mu = *bm.exact;
    bool corner = mu.atoms.size() == 1 && mu.atoms[0].x == QPoint{0, 0} && mu.pole_mass == 0;
    Rational mass = mu.total_mass();
    os << "mass " << to_fraction_string(mass) << ", " << bm.steps << " sweeps, each a unit atom at (r_j, r_j): "
       << (history ? "yes" : "no");
    return corner && mass == 1 && mass == oracle::total_mass(f) && history && secs < 1.0;
  });

  criterion(2, "weighted pole max(2x1, x2)", [](std::ostream& os) {
    PLConvexFunction u = parse_pl("max(2*x1, x2)");
    const Rational want = oracle::total_mass(u);  // 2 area conv{0, (2,0), (0,1)} = 2
    BoundaryMeasure bm = boundary_measure(ToricFunction(u), SweepSchedule::dyadic_levels(u, 30));
    const ExactMeasure& mu = *bm.exact;
    bool corner = mu.atoms.size() == 1 && mu.atoms[0].x == QPoint{0, 0} && mu.pole_mass == 0;
    auto gf = GridConvexFunction::from_pl(u, 1.0 / 128);
    BoundaryMeasure gb = boundary_measure(ToricFunction(gf, u), SweepSchedule::dyadic_levels(u, 6));
    double gridErr = std::abs(gb.measure.total_mass() - want.get_d());
    os << "exact " << to_fraction_string(mu.total_mass()) << " (oracle " << to_fraction_string(want)
       << "), grid error " << gridErr;
    return want == 2 && corner && mu.total_mass() == want && gridErr <= 1e-2;
  });

  criterion(3, "mass conservation, 50 random F", [](std::ostream& os) {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    const std::vector<FreeRegion> regions = {FreeRegion::lower_box(ratio(-1, 4), ratio(-1, 4)),
                                             FreeRegion::box(-3, ratio(-1, 2), -3, ratio(-1, 2)),
                                             FreeRegion::box(ratio(-5, 2), ratio(-1, 8), -1, ratio(-1, 4))};
    int exactFail = 0, oracleFail = 0;
    double worstGrid = 0;
    for (int i = 0; i < 50; ++i) {
      PLConvexFunction u = random_f_function(rng, 3, i % 2 == 1);
      ExactMeasure m = ma_pl(u);
      if (m.total_mass() != oracle::total_mass(u)) ++oracleFail;
      std::vector<FreeRegion> ks = regions;
      ks.push_back(FreeRegion::sublevel(u, ratio(-1, 3)));
      for (const auto& K : ks)
        if (ma_pl(sweep_out(ToricFunction(u), K).pl()).interior_mass() != m.interior_mass()) ++exactFail;
      auto G = GridConvexFunction::sample(-3, 0, 1.0 / 128, [&](double a, double b) { return u.value(a, b); });
      double before = ma_grid_nodes(G).total_mass();
      double after = ma_grid_nodes(sweep_out(ToricFunction(G), regions[1]).grid()).total_mass();
      worstGrid = std::max(worstGrid, std::abs(after - before) / before);
    }
    double secs = since(t0);
    os << "exact failures " << exactFail << ", mass vs oracle failures " << oracleFail << ", grid rel error "
       << worstGrid;
    return exactFail == 0 && oracleFail == 0 && worstGrid <= 1e-6 && secs < 30;
  });

  criterion(4, "order and truncation laws", [](std::ostream& os) {
    std::mt19937_64 rng(7);
    const auto dict = MomentDictionary::standard();
    int orderFail = 0, truncFail = 0, reportFail = 0;
    for (int i = 0; i < 50; ++i) {
      PLConvexFunction u = random_f_function(rng, 3, i % 2 == 1);
      PLConvexFunction w = random_f_function(rng, 2, i % 3 == 0);
      PLConvexFunction v = pl_max(u, w);
      if (!compare(u, v, dict).passed()) ++reportFail;
      // both limits are corner atoms; u <= v gives the larger measure to u
      ExactMeasure mu = exact_boundary_measure(u), mv = exact_boundary_measure(v);
      auto a = dict.moments(mu.to_log()), b = dict.moments(mv.to_log());
      bool ok = mu.total_mass() == oracle::total_mass(u) && mv.total_mass() == oracle::total_mass(v) &&
                mu.total_mass() >= mv.total_mass();
      for (std::size_t k = 0; k < a.size(); ++k) ok = ok && a[k] >= b[k];  // members are nonnegative
      if (!ok) ++orderFail;
      ExactMeasure mt = exact_boundary_measure(pl_max(u, PLConvexFunction::constant(-1)));
      if (mt.total_mass() != mu.total_mass() || mt.atoms.size() != mu.atoms.size() ||
          (mu.atoms.size() == 1 && !(mt.atoms[0].x == mu.atoms[0].x)))
        ++truncFail;
    }
    os << "order failures " << orderFail << ", truncation failures " << truncFail << ", report failures "
       << reportFail;
    return orderFail == 0 && truncFail == 0 && reportFail == 0;
  });

  criterion(5, "limit identity and Jensen", [](std::ostream& os) {
    PLConvexFunction u = parse_pl("max(x1, x2)"), h = parse_pl("max(x1 + x2, -1)");
    Report r = identity_suite(u, h, SweepSchedule::dyadic_levels(u, 12));
    // ma(u) is the unit pole, where h = -1. The kink lines of u and h cross
    // once, at (-1/2, -1/2), with subgradient segments [(1,0),(0,1)] and
    // [(0,0),(1,1)]: mixed mass 2, so int u dd^c h ^ dd^c u = -1. The right
    // side is -1 - (-1) = 0 = h(0, 0), the value on the corner atom.
    const double rhs = oracle::pole_value(h) * 1 - (-0.5) * 2;
    double lim = r.data["sequence"].back().get<double>();
    double residual = std::abs(lim - rhs);
    double mixed = r.data["mixed_term"].get<double>();
    // Jensen: mu_u is the unit corner atom, ma(u) the unit pole
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& phi : psh_dictionary())
      margin = std::min(margin, phi.value(QPoint{0, 0}).get_d() - oracle::pole_value(phi));
    const Check* jm = r.find("jensen_margin");
    os << "residual " << residual << " (mixed term " << mixed << "), dictionary Jensen margin " << margin;
    return residual <= 1e-3 && std::abs(mixed - (-1.0)) <= 1e-3 && margin >= -1e-9 && jm && jm->passed &&
           r.passed();
  });

  criterion(6, "level-set split, 20 levels", [](std::ostream& os) {
    PLConvexFunction u = parse_pl("max(2*x1, x2, 1/2*x1 + 1/2*x2 - 1/4)");
    const Rational total = oracle::total_mass(u);
    bool ok = true;
    Rational minSphere = 0;
    for (int i = 1; i <= 20; ++i) {
      Rational r = -2 * ratio(i, 20);
      DemaillySplit s = demailly_split(u, r);
      minSphere = std::min(minSphere, s.min_sphere_mass);
      ok = ok && s.residual == 0 && s.min_sphere_mass >= 0 && s.off_level_mass == 0 &&
           s.interior.total_mass() + s.sphere.total_mass() == total;
      for (const auto& a : s.sphere.atoms) ok = ok && u.value(a.x) == r && a.mass >= 0;
    }
    os << "mass " << to_fraction_string(total) << " split exactly at every level, smallest sphere atom "
       << to_fraction_string(minSphere);
    return ok;
  });

  criterion(7, "decreasing family convergence", [](std::ostream& os) {
    PLConvexFunction limit = parse_pl("max(x1, x2)");
    std::vector<long> ks = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    std::vector<PLConvexFunction> fam;
    for (long k : ks) fam.push_back(pl_max(limit, PLConvexFunction::constant(ratio(-1, k))));
    const auto dict = MomentDictionary::standard();
    FamilyConvergence fc = decreasing_family(fam, limit, 12, dict);
    // mu of the limit is sigma x sigma: every |z|^k |w|^l moment is 1
    auto mom = dict.moments(exact_boundary_measure(limit).to_log());
    double momErr = 0;
    for (int k = 0; k <= dict.K; ++k)
      for (int l = 0; l <= dict.K; ++l) momErr = std::max(momErr, std::abs(mom[k * (dict.K + 1) + l] - 1));
    bool monotone = true;
    for (std::size_t i = 1; i < fc.distances.size(); ++i) monotone = monotone && fc.distances[i] <= fc.distances[i - 1];
    os << "distance at k=1 " << fc.distances.front() << ", at k=1000 " << fc.distances.back()
       << ", closed-form moment error " << momErr;
    return monotone && fc.distances.back() < 1e-3 && momErr < 1e-12;
  });

  criterion(8, "peak functions decay", [](std::ostream& os) {
    ToricFunction g = green_origin(1, 1, LogDomain::quadrant());
    BoundaryMeasure bm = boundary_measure(g, SweepSchedule::dyadic_levels(g.pl(), 20));
    HenkinTable t = henkin_test(bm.measure, "peak", 30);
    double worst = 0;
    for (std::size_t i = 0; i < t.k.size(); ++i) {
      double c = oracle::peak_circle_mean(t.k[i]);
      worst = std::max(worst, std::abs(t.value[i] - c * c));
    }
    os << "max |int f_k dmu - 4^-k| over k <= 30: " << worst;
    return t.k.size() == 30 && worst <= 1e-9;
  });

  criterion(9, "Dirichlet pipeline to sigma x dV", [](std::ostream& os) {
    auto t0 = Clock::now();
    LogMeasure mu = push_measure("product(sigma(1), discV(0.5))");
    PipelineOptions o;
    o.k_max = 8;
    o.h = 1.0 / 128;
    o.K = 4;
    PipelineState st = measure_pipeline(mu, o);
    double secs = since(t0);
    bool decreasing = true, massOk = true;
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
      if (i > 0) decreasing = decreasing && st.rows[i].distance <= st.rows[i - 1].distance;
      massOk = massOk && st.rows[i].mass <= 1 + 1e-6;
    }
    const auto& last = st.rows.back();
    os << "distance " << st.rows.front().distance << " -> " << last.distance << ", target mass " << mu.total_mass()
       << ", vanishing " << last.max_vanishing << ", " << secs << " s";
    return int(st.rows.size()) == 8 && std::abs(mu.total_mass() - 1) < 1e-12 && decreasing && massOk &&
           last.distance < 0.05 && last.max_vanishing <= 1e-2 && secs <= 600;
  });

  criterion(10, "Dirichlet solver, gauge cone", [](std::ostream& os) {
    DirichletSolution sol = ma_dirichlet({{0, 0, 1}}, DirichletDomain::square(1));
    double err = 0;
    const double h = 1.0 / 128;
    for (int i = 0; i <= 256; ++i)
      for (int j = 0; j <= 256; ++j) {
        double x = -1 + i * h, y = -1 + j * h;
        err = std::max(err, std::abs(sol.value(x, y) - oracle::gauge_cone(1, 1, x, y)));
      }
    os << "sup error " << err << " after " << sol.iterations << " Newton steps";
    return err <= 1e-2;
  });

  criterion(11, "boundary trace of a bounded g", [](std::ostream& os) {
    PLConvexFunction u = parse_pl("max(x1, x2)"), g = parse_pl("max(x1 + x2, -1)");
    WeightedLimit wl = weighted_limit(u, g, SweepSchedule::dyadic_levels(u, 16, 1e-4));
    // supp mu_u is the corner, where g = 0
    const double trace = g.value(QPoint{0, 0}).get_d();
    double gap = std::abs(wl.density - trace);
    os << "density " << wl.density << " vs trace " << trace << ", pairing error " << wl.pairing_error;
    return gap <= 1e-3 && wl.pairing_error <= 1e-3;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
