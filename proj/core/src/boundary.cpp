#include "cma/boundary.hpp"

#include "cma/errors.hpp"
#include "cma/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cma {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Integrand tent(double c1, double c2) {
  std::ostringstream name;
  name << "tent(" << c1 << "," << c2 << ")";
  return {name.str(), [c1, c2](double r1, double r2) {
            return std::max(0.0, 0.5 - std::abs(r1 - c1) - std::abs(r2 - c2));
          }};
}

PLConvexFunction pl(std::initializer_list<AffinePiece> pieces) {
  return PLConvexFunction(std::vector<AffinePiece>(pieces));
}

AffinePiece piece(int a1, int a2, const Rational& c) { return {Rational(a1), Rational(a2), c}; }

LogMeasure corner_atom(const LogDomain& d, double mass) {
  LogMeasure m;
  if (mass != 0) m.atoms.push_back({d.top_d(), d.top_d(), mass});
  return m;
}

bool require_f(const ToricFunction& u) {
  auto flags = u.flags.F ? u.flags : classify(u);
  return flags.F.value_or(false);
}

}  // namespace

MomentDictionary MomentDictionary::standard(int K, int lipschitz) {
  MomentDictionary d;
  d.K = K;
  for (int k = 0; k <= K; ++k)
    for (int l = 0; l <= K; ++l) d.members.push_back(Integrand::exp_moment(k, l));
  static const double c1s[] = {0.25, 0.5, 0.75, 1.0};
  static const double c2s[] = {0.4, 0.7, 1.0};
  int added = 0;
  for (double c2 : c2s)
    for (double c1 : c1s)
      if (added++ < lipschitz) d.members.push_back(tent(c1, c2));
  return d;
}

std::vector<double> MomentDictionary::moments(const LogMeasure& m) const {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& f : members) out.push_back(m.integrate(f));
  return out;
}

double MomentDictionary::separation(const std::vector<LogMeasure>& family) const {
  std::vector<std::vector<double>> mom;
  for (const auto& m : family) mom.push_back(moments(m));
  double best = kInf;
  for (std::size_t i = 0; i < mom.size(); ++i)
    for (std::size_t j = i + 1; j < mom.size(); ++j) {
      double d = 0;
      for (std::size_t k = 0; k < mom[i].size(); ++k) d = std::max(d, std::abs(mom[i][k] - mom[j][k]));
      best = std::min(best, d);
    }
  return best;
}

namespace {
double moment_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}
}  // namespace

double weakstar_distance(const LogMeasure& mu, const LogMeasure& nu, const MomentDictionary& dict) {
  return moment_gap(dict.moments(mu), dict.moments(nu));
}

std::vector<PLConvexFunction> psh_dictionary() {
  const Rational q(1, 4), h(1, 2), t(3, 4);
  return {
      PLConvexFunction::constant(0),
      PLConvexFunction::constant(-1),
      pl({piece(1, 0, -q), piece(0, 1, -q)}),                        // unbounded
      pl({piece(1, 1, -h)}),                                          // unbounded
      pl({piece(2, 0, -h), piece(0, 1, -q)}),                         // unbounded
      pl({piece(1, 0, -q)}),                                          // unbounded, x1 only
      pl({piece(1, 1, -h), piece(0, 0, -1)}),
      pl({piece(1, 1, -h), piece(0, 0, -Rational(3, 2))}),
      pl({piece(1, 0, -q), piece(0, 1, -q), piece(0, 0, -1)}),
      pl({piece(2, 0, -h), piece(0, 1, -q), piece(0, 0, -1)}),
      pl({piece(1, 0, -q), piece(0, 2, -h), piece(0, 0, -1)}),
      pl({piece(2, 1, -t), piece(0, 0, -2)}),
      pl({piece(1, 2, -t), piece(0, 0, -2)}),
      pl({piece(1, 0, -q), piece(0, 0, -h)}),
      pl({piece(0, 1, -q), piece(0, 0, -h)}),
      pl({piece(3, 0, -t), piece(0, 3, -t), piece(1, 1, -h), piece(0, 0, -2)}),
      pl({piece(1, 0, -q), piece(0, 1, -q), piece(1, 1, -h), piece(0, 0, -1)}),
      pl({piece(2, 2, -1), piece(0, 0, -3)}),
      pl({piece(1, 0, -1), piece(0, 1, -1), piece(0, 0, -Rational(5, 4))}),
      pl({piece(4, 1, -Rational(5, 4)), piece(1, 4, -Rational(5, 4)), piece(0, 0, -2)}),
  };
}

std::vector<PLConvexFunction> bounded_f_dictionary() {
  const Rational h(1, 2), q(1, 4);
  return {
      pl({piece(1, 0, 0), piece(0, 1, 0), piece(0, 0, -1)}),
      pl({piece(1, 0, 0), piece(0, 1, 0), piece(0, 0, -h)}),
      pl({piece(1, 0, 0), piece(0, 1, 0), piece(0, 0, -2)}),
      pl({piece(2, 0, 0), piece(0, 1, 0), piece(0, 0, -h)}),
      pl({piece(1, 0, 0), piece(0, 2, 0), piece(0, 0, -h)}),
      pl({piece(1, 0, 0), piece(0, 1, 0), {h, h, -q}, piece(0, 0, -1)}),
      pl({piece(2, 0, 0), piece(0, 2, 0), piece(0, 0, -1)}),
      pl({piece(3, 0, 0), piece(0, 1, 0), piece(1, 1, 0), piece(0, 0, -Rational(3, 2))}),
  };
}

Integrand as_integrand(const PLConvexFunction& f) {
  return {f.to_string(), [f](double r1, double r2) { return f.value_rho(r1, r2); }};
}

ExactMeasure exact_boundary_measure(const PLConvexFunction& u) {
  if (!u.domain().is_polydisc()) throw InvalidInput("exact boundary measure needs a polydisc domain");
  ExactMeasure m;
  Rational mass = ma_pl(u).interior_mass();
  const Rational t = u.domain().top();
  if (mass != 0) m.atoms.push_back({{t, t}, mass});
  return m;
}

BoundaryMeasure boundary_measure(const ToricFunction& u, const SweepSchedule& schedule,
                                 const MomentDictionary& dict, bool keep_history) {
  if (!require_f(u)) throw InvalidInput("boundary_measure: u is not in F (" + u.describe() + ")");
  schedule.validate();
  BoundaryMeasure bm;
  const LogDomain& dom = u.domain();
  const int n = schedule.size();
  std::vector<double> prev;
  LogMeasure last;
  for (int j = 1; j <= n; ++j) {
    auto K = fundamental_sequence(dom, schedule, j);
    if (!K) break;
    ToricFunction uj = sweep_out(u, *K);
    LogMeasure mj;
    if (uj.is_pl()) {
      ExactMeasure e = ma_pl(uj.pl());
      mj = e.to_log();
      if (keep_history) bm.exact_history.push_back(e);
    } else {
      mj = uj.ma();
    }
    auto mom = dict.moments(mj);
    bm.steps = j;
    if (!prev.empty()) {
      bm.cauchy_gap = moment_gap(prev, mom);
      if (bm.cauchy_gap < schedule.eps_weak) bm.converged = true;
    }
    bm.certificate.push_back(mom);
    prev = std::move(mom);
    last = std::move(mj);
    if (bm.converged) break;
  }

  // On a polydisc the torus-invariant measures carried by the distinguished
  // boundary are multiples of the corner atom; the grid leaves part of the
  // mass unlocated on the outer faces, which belongs to the same atom.
  if (u.is_pl() && dom.is_polydisc()) {
    bm.exact = exact_boundary_measure(u.pl());
    bm.measure = bm.exact->to_log();
  } else if (dom.is_polydisc()) {
    bm.measure = corner_atom(dom, last.total_mass());
  } else {
    bm.measure = last;
  }
  bm.limit_gap = prev.empty() ? 0 : moment_gap(prev, dict.moments(bm.measure));
  if (!bm.converged) {
    std::ostringstream os;
    os << "budget of " << n << " sweeps exhausted; Cauchy gap " << bm.cauchy_gap << " >= "
       << schedule.eps_weak;
    bm.diagnostic = os.str();
  }
  return bm;
}

WeightedLimit weighted_limit(const PLConvexFunction& u, const PLConvexFunction& g,
                             const SweepSchedule& schedule, const MomentDictionary& dict) {
  if (!g.bounded_below()) throw InvalidInput("weighted_limit: g must be bounded");
  if (!require_f(ToricFunction(u))) throw InvalidInput("weighted_limit: u is not in F");
  schedule.validate();
  WeightedLimit wl;
  const LogDomain& dom = u.domain();
  auto weight = [&g](double r1, double r2) { return g.value_rho(r1, r2); };
  LogMeasure last;
  for (int j = 1; j <= schedule.size(); ++j) {
    auto K = fundamental_sequence(dom, schedule, j);
    if (!K) break;
    ToricFunction uj = sweep_out(ToricFunction(u), *K);
    LogMeasure mj = ma_pl(uj.pl()).to_log();
    double v = mj.integrate_weighted(Integrand::one(), weight);
    if (!wl.sequence.empty()) wl.cauchy_gap = std::abs(v - wl.sequence.back());
    wl.sequence.push_back(v);
    last = std::move(mj);
    if (wl.sequence.size() > 1 && wl.cauchy_gap < schedule.eps_weak) {
      wl.converged = true;
      break;
    }
  }
  LogMeasure mu = exact_boundary_measure(u).to_log();
  const double mass = mu.total_mass();
  wl.trace = g.value(dom.top_d(), dom.top_d());
  wl.density = mass > 0 && !wl.sequence.empty() ? wl.sequence.back() / mass : 0.0;
  wl.limit = mu.scaled(wl.density);
  for (const auto& phi : dict.members) {
    double lhs = last.integrate_weighted(phi, weight);
    double rhs = wl.trace * mu.integrate(phi);
    wl.pairing_error = std::max(wl.pairing_error, std::abs(lhs - rhs));
  }
  return wl;
}

Report identity_suite(const PLConvexFunction& u, const PLConvexFunction& h,
                      const SweepSchedule& schedule, const IdentityOptions& opts) {
  Report rep("identity");
  const LogDomain& dom = u.domain();
  if (!require_f(ToricFunction(u))) throw InvalidInput("identity_suite: u is not in F");
  const Integrand hi = as_integrand(h);
  LogMeasure ma_u = ma_pl(u).to_log();
  LogMeasure mu = exact_boundary_measure(u).to_log();

  // left side along the sweeps
  std::vector<double> seq;
  for (int j = 1; j <= schedule.size(); ++j) {
    auto K = fundamental_sequence(dom, schedule, j);
    if (!K) break;
    seq.push_back(ma_pl(sweep_out(ToricFunction(u), *K).pl()).to_log().integrate(hi));
  }
  double worst_drop = 0;
  for (std::size_t j = 1; j < seq.size(); ++j) worst_drop = std::max(worst_drop, seq[j - 1] - seq[j]);
  const double int_h_mu = mu.integrate(hi);
  const double int_h_ma = ma_u.integrate(hi);

  // mixed term by polarization on a common lattice
  double mixed_term = 0, worst_negative = 0;
  if (h.bounded_below() && h.pieces().size() == 1 && h.pieces()[0].a1 == 0 && h.pieces()[0].a2 == 0) {
    mixed_term = 0;  // constants are pluriharmonic
  } else {
    double T = opts.truncation > 0 ? opts.truncation
                                   : std::max({u.truncation().get_d(), h.truncation().get_d(), 2.0});
    T = std::ceil(T / opts.grid_h) * opts.grid_h;
    const double top = dom.top_d();
    auto gu = GridConvexFunction::sample(top - T, top, opts.grid_h,
                                         [&](double a, double b) { return u.value(a, b); }, dom);
    auto gh = GridConvexFunction::sample(top - T, top, opts.grid_h,
                                         [&](double a, double b) { return h.value(a, b); }, dom);
    GridMA mixed = ma_mixed(gu, gh, &worst_negative);
    for (int j = 0; j < gu.n2; ++j)
      for (int i = 0; i < gu.n1; ++i) {
        double m = mixed.node_mass[gu.index(i, j)];
        if (m != 0) mixed_term += m * gu.at(i, j);
      }
    // pole: u -> -inf there, so any charge left at the pole is a divergence
    if (std::abs(mixed.pole_mass) > 1e-9) mixed_term = -kInf;
    // outer faces carry u = 0 for u in F
    rep.data["mixed_total"] = mixed.total_mass();
  }
  const double rhs = int_h_ma - mixed_term;
  const double lim = seq.empty() ? int_h_mu : seq.back();
  rep.data["sequence"] = seq;
  rep.data["int_h_mu"] = int_h_mu;
  rep.data["int_h_ma"] = int_h_ma;
  rep.data["mixed_term"] = mixed_term;
  rep.check_le("limit_identity_residual", std::abs(lim - rhs), 1e-3,
               "last sweep against the mixed-measure formula");
  rep.check_le("boundary_identity_residual", std::abs(int_h_mu - rhs), 1e-3,
               "boundary measure against the mixed-measure formula");
  rep.check_ge("jensen_margin", int_h_mu - int_h_ma, -1e-9);
  rep.check_le("monotonicity_drop", worst_drop, 1e-12, "j -> int h ma(u^j) nondecreasing");
  rep.check_ge("polarization_negativity", worst_negative, -1e-9);
  return rep;
}

Report compare(const PLConvexFunction& u, const PLConvexFunction& v, const MomentDictionary& dict) {
  Report rep("compare");
  ExactMeasure mu = exact_boundary_measure(u);
  ExactMeasure mv = exact_boundary_measure(v);
  const Rational mass_u = mu.total_mass(), mass_v = mv.total_mass();
  rep.data["mass_u"] = to_fraction_string(mass_u);
  rep.data["mass_v"] = to_fraction_string(mass_v);

  const bool u_le_v = pl_less_equal(u, v);
  const bool v_le_u = pl_less_equal(v, u);
  if (u_le_v || v_le_u) {
    const auto& lo = u_le_v ? mu : mv;
    const auto& hi = u_le_v ? mv : mu;
    // all dictionary members are nonnegative
    auto ml = dict.moments(lo.to_log()), mh = dict.moments(hi.to_log());
    double worst = 0;
    for (std::size_t k = 0; k < ml.size(); ++k) worst = std::max(worst, mh[k] - ml[k]);
    rep.check_le("order_dictionary", worst, 0.0, "smaller function has the larger boundary measure");
    rep.check_true("order_mass", lo.total_mass() >= hi.total_mass());
  } else {
    rep.diagnostics.push_back("functions incomparable; ordering checks skipped");
  }

  for (const auto* f : {&u, &v}) {
    auto trunc = pl_max(*f, PLConvexFunction::constant(-1, f->domain()));
    ExactMeasure mt = exact_boundary_measure(trunc);
    ExactMeasure mf = f == &u ? mu : mv;
    bool equal = mt.total_mass() == mf.total_mass() && mt.atoms.size() == mf.atoms.size();
    for (std::size_t i = 0; equal && i < mt.atoms.size(); ++i)
      equal = mt.atoms[i].x == mf.atoms[i].x && mt.atoms[i].mass == mf.atoms[i].mass;
    rep.check_true(f == &u ? "truncation_u" : "truncation_v", equal, "mu_f = mu_max(f,-1)");
  }

  // comparison constants for bounded functions with compactly supported ma
  if (u.bounded_below() && v.bounded_below()) {
    auto ratio_max = [](const PLConvexFunction& num, const PLConvexFunction& den,
                        const ExactMeasure& support) -> std::optional<Rational> {
      std::optional<Rational> best;
      for (const auto& a : support.atoms) {
        Rational d = den.value(a.x);
        if (d >= 0) return std::nullopt;
        Rational r = num.value(a.x) / d;
        if (!best || r > *best) best = r;
      }
      return best;
    };
    ExactMeasure ma_u = ma_pl(u), ma_v = ma_pl(v);
    if (ma_u.exterior_mass == 0 && ma_v.exterior_mass == 0 && ma_u.pole_mass == 0 &&
        ma_v.pole_mass == 0 && !ma_u.atoms.empty() && !ma_v.atoms.empty()) {
      auto alpha = ratio_max(u, v, ma_u), beta = ratio_max(v, u, ma_v);
      if (alpha && beta && *alpha > 0 && *beta > 0) {
        Rational a = 1 / (*alpha * *alpha), b = *beta * *beta;
        rep.data["alpha"] = to_fraction_string(*alpha);
        rep.data["beta"] = to_fraction_string(*beta);
        rep.check_true("constants_lower", a * mass_u <= mass_v, "a mu_u <= mu_v");
        rep.check_true("constants_upper", mass_v <= b * mass_u, "mu_v <= b mu_u");
        rep.check_true("same_support", (mass_u == 0) == (mass_v == 0));
        // alpha v <= u on the domain: check at kinks of both and on a lattice
        bool ok = true;
        std::vector<QPoint> pts;
        for (const auto& at : kink_atoms(u)) pts.push_back(at.x);
        for (const auto& at : kink_atoms(v)) pts.push_back(at.x);
        const Rational top = u.domain().top();
        const Rational T = std::max(u.truncation(), v.truncation()) + 1;
        for (int i = 0; i <= 32; ++i)
          for (int j = 0; j <= 32; ++j) pts.push_back({top - T * ratio(i, 32), top - T * ratio(j, 32)});
        for (const auto& p : pts) {
          if (p.x > top || p.y > top) continue;
          if (*alpha * v.value(p) > u.value(p)) ok = false;
        }
        rep.check_true("scaled_minorant", ok, "alpha v <= u");
      }
    } else {
      rep.diagnostics.push_back("comparison constants skipped: ma not compactly supported");
    }
  }
  return rep;
}

FamilyConvergence decreasing_family(const std::vector<PLConvexFunction>& family,
                                    const PLConvexFunction& limit, int J,
                                    const MomentDictionary& dict) {
  FamilyConvergence fc;
  LogMeasure target = exact_boundary_measure(limit).to_log();
  for (const auto& f : family) {
    auto bm = boundary_measure(ToricFunction(f), SweepSchedule::dyadic_boxes(J), dict);
    fc.distances.push_back(weakstar_distance(bm.measure, target, dict));
    fc.masses.push_back(bm.measure.total_mass());
  }
  fc.monotone = true;
  for (std::size_t k = 1; k < fc.distances.size(); ++k)
    if (fc.distances[k] > fc.distances[k - 1] + 1e-15) fc.monotone = false;
  return fc;
}

SupportEstimate support_estimate(const BoundaryMeasure& bm, const LogDomain& domain, double delta) {
  SupportEstimate s;
  const LogMeasure& m = bm.measure;
  auto add = [&](Face f, double mass) {
    if (mass == 0) return;
    s.fraction[face_name(f)] += mass;
    s.total += mass;
  };
  for (const auto& a : m.atoms) add(classify_point(domain, a.x1, a.x2, delta), a.mass);
  add(Face::Interior, m.pole_mass);
  add(domain.is_polydisc() ? Face::Corner : Face::EdgeX1, m.boundary_mass);
  for (const auto& p : m.products) {
    bool c1 = p.first.kind == CoordLaw::Kind::Circle;
    bool c2 = p.second.kind == CoordLaw::Kind::Circle;
    double x1 = std::log(p.first.radius), x2 = std::log(p.second.radius);
    Face f = Face::Interior;
    if (c1 && c2) f = classify_point(domain, x1, x2, delta);
    else if (c1 && std::abs(x1 - domain.top_d()) <= delta) f = Face::EdgeX1;
    else if (c2 && std::abs(x2 - domain.top_d()) <= delta) f = Face::EdgeX2;
    add(f, p.mass);
  }
  if (s.total > 0)
    for (auto& [k, v] : s.fraction) v /= s.total;
  auto it = s.fraction.find("corner");
  s.corner_only = s.total > 0 && it != s.fraction.end() && it->second >= 1 - 1e-12;
  return s;
}

HenkinTable henkin_test(const LogMeasure& mu, const std::string& family, int kmax) {
  if (family != "peak" && family != "monomial")
    throw InvalidInput("henkin_test: unknown family '" + family + "'");
  HenkinTable t;
  for (int k = 1; k <= kmax; ++k) {
    // orbit average of ((1+z)/2)^k ((1+w)/2)^k keeps only the constant term 4^-k
    double c = family == "peak" ? std::ldexp(1.0, -2 * k) : 0.0;
    t.k.push_back(k);
    t.value.push_back(std::abs(mu.integrate(Integrand::holomorphic(family, c))));
  }
  double sk = 0, sy = 0, skk = 0, sky = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.k.size(); ++i) {
    if (t.value[i] <= 0) continue;
    double y = std::log(t.value[i]);
    sk += t.k[i];
    sy += y;
    skk += double(t.k[i]) * t.k[i];
    sky += t.k[i] * y;
    ++n;
  }
  if (n >= 2) t.decay_rate = -(n * sky - sk * sy) / (n * skk - sk * sk);
  else t.decay_rate = kInf;
  return t;
}

}  // namespace cma
