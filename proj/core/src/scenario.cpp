#include "cma/scenario.hpp"

#include "cma/boundary.hpp"
#include "cma/errors.hpp"
#include "cma/masolver.hpp"
#include "cma/monge_ampere.hpp"
#include "cma/random_pl.hpp"
#include "cma/sweep.hpp"
#include "cma/toric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace cma {

namespace {

constexpr const char* kFormat = "cma-scenario";

// ---------------------------------------------------------------------------
// config reading with accumulated field diagnostics

class Reader {
 public:
  explicit Reader(const Json& cfg) : cfg_(cfg) {}

  std::vector<std::string> diag;

  void error(const std::string& field, const std::string& msg) { diag.push_back(field + ": " + msg); }

  bool has(const std::string& f) const { return cfg_.contains(f); }
  const Json& raw(const std::string& f) const { return cfg_.at(f); }

  std::string str(const std::string& f, const std::string& def = {}, bool required = false) {
    seen_.insert(f);
    if (!has(f)) {
      if (required) error(f, "required field missing");
      return def;
    }
    if (!cfg_[f].is_string()) {
      error(f, "expected a string");
      return def;
    }
    return cfg_[f].get<std::string>();
  }
  long integer(const std::string& f, long def, long lo, long hi) {
    seen_.insert(f);
    if (!has(f)) return def;
    if (!cfg_[f].is_number_integer()) {
      error(f, "expected an integer");
      return def;
    }
    long v = cfg_[f].get<long>();
    if (v < lo || v > hi) {
      error(f, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return def;
    }
    return v;
  }
  double number(const std::string& f, double def) {
    seen_.insert(f);
    if (!has(f)) return def;
    if (cfg_[f].is_number()) return cfg_[f].get<double>();
    if (cfg_[f].is_string()) {
      try {
        return parse_rational(cfg_[f].get<std::string>()).get_d();
      } catch (const std::exception& e) {
        error(f, e.what());
        return def;
      }
    }
    error(f, "expected a number or a rational string");
    return def;
  }
  bool boolean(const std::string& f, bool def) {
    seen_.insert(f);
    if (!has(f)) return def;
    if (!cfg_[f].is_boolean()) {
      error(f, "expected true or false");
      return def;
    }
    return cfg_[f].get<bool>();
  }
  /// Lattice spacing: a power of 1/2.
  double grid_h(const std::string& f, double def) {
    double h = number(f, def);
    int e = 0;
    double m = std::frexp(h, &e);
    if (!(h > 0) || m != 0.5 || e > 0) error(f, "must be a power of 1/2 (e.g. \"1/128\")");
    return h;
  }
  void mark(const std::string& f) { seen_.insert(f); }
  void unknown_fields() {
    for (auto it = cfg_.begin(); it != cfg_.end(); ++it)
      if (!seen_.count(it.key())) error(it.key(), "unknown field");
  }

 private:
  const Json& cfg_;
  std::set<std::string> seen_;
};

/// Function spec: the PL grammar, or green(a, b) for the pole function.
std::optional<PLConvexFunction> read_function(Reader& rd, const std::string& f, const LogDomain& dom,
                                              const std::string& def = {}) {
  std::string spec = rd.str(f, def, def.empty());
  if (spec.empty()) return std::nullopt;
  try {
    if (spec.rfind("green(", 0) == 0 && spec.back() == ')') {
      auto inner = spec.substr(6, spec.size() - 7);
      auto comma = inner.find(',');
      if (comma == std::string::npos) throw InvalidInput("green(a, b) needs two weights");
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
      };
      return green_origin(parse_rational(trim(inner.substr(0, comma))),
                          parse_rational(trim(inner.substr(comma + 1))), dom)
          .pl();
    }
    return parse_pl(spec, dom);
  } catch (const std::exception& e) {
    rd.error(f, e.what());
    return std::nullopt;
  }
}

std::optional<LogMeasure> read_measure(Reader& rd, const std::string& f) {
  std::string spec = rd.str(f, {}, true);
  if (spec.empty()) return std::nullopt;
  try {
    return push_measure(spec);
  } catch (const std::exception& e) {
    rd.error(f, e.what());
    return std::nullopt;
  }
}

/// {"kind": harmonic | log_levels | dyadic_levels | dyadic_boxes | levels, "J", "eps",
///  "levels": [...], "exhaustion": spec (default: the function itself)}
std::optional<SweepSchedule> read_schedule(Reader& rd, const std::string& f,
                                           const std::optional<PLConvexFunction>& u,
                                           const LogDomain& dom, const Json& def) {
  rd.mark(f);
  const Json s = rd.has(f) ? rd.raw(f) : def;
  if (!s.is_object()) {
    rd.error(f, "expected an object");
    return std::nullopt;
  }
  Reader sr(s);
  std::string kind = sr.str("kind", {}, true);
  long J = sr.integer("J", 10, 1, 100000);
  double eps = sr.number("eps", 1e-6);
  std::optional<PLConvexFunction> g = u;
  if (sr.has("exhaustion")) g = read_function(sr, "exhaustion", dom);
  std::vector<Rational> levels;
  if (sr.has("levels")) {
    sr.mark("levels");
    if (!s["levels"].is_array()) {
      sr.error("levels", "expected an array of rationals");
    } else {
      for (const auto& v : s["levels"]) {
        try {
          levels.push_back(parse_rational(v.get<std::string>()));
        } catch (const std::exception& e) {
          sr.error("levels", e.what());
        }
      }
    }
  }
  sr.unknown_fields();
  std::optional<SweepSchedule> out;
  if (sr.diag.empty()) {
    try {
      if (kind == "dyadic_boxes") {
        out = SweepSchedule::dyadic_boxes(int(J), eps);
      } else if (!g) {
        sr.error("exhaustion", "needs a function");
      } else if (kind == "harmonic") {
        out = SweepSchedule::harmonic(*g, int(J), eps);
      } else if (kind == "log_levels") {
        out = SweepSchedule::log_levels(*g, int(J), eps);
      } else if (kind == "dyadic_levels") {
        out = SweepSchedule::dyadic_levels(*g, int(J), eps);
      } else if (kind == "levels") {
        out = SweepSchedule::sublevel(*g, levels, eps);
      } else {
        sr.error("kind", "unknown schedule '" + kind + "'");
      }
      if (out) out->validate();
    } catch (const std::exception& e) {
      sr.error("kind", e.what());
      out.reset();
    }
  }
  for (const auto& d : sr.diag) rd.diag.push_back(f + "." + d);
  return out;
}

// ---------------------------------------------------------------------------
// result helpers

std::string fmt(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void add_measure(ScenarioResult& res, const std::string& label, const LogMeasure& m) {
  for (const auto& a : m.atoms) res.measures.push_back({label, a.x1, a.x2, a.mass});
  // product laws sit at their log radii; the label names the two laws
  auto law = [](const CoordLaw& c) { return c.kind == CoordLaw::Kind::Circle ? "circle" : "disc"; };
  for (const auto& p : m.products)
    res.measures.push_back({label + ":" + law(p.first) + "*" + law(p.second), std::log(p.first.radius),
                            std::log(p.second.radius), p.mass});
  if (m.pole_mass != 0) {
    const double ninf = -std::numeric_limits<double>::infinity();
    res.measures.push_back({label + ":pole", ninf, ninf, m.pole_mass});
  }
  if (m.boundary_mass != 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.measures.push_back({label + ":unlocated_boundary", nan, nan, m.boundary_mass});
  }
}

void add_moments(ScenarioResult& res, const std::string& j, const LogMeasure& m, int K) {
  for (int k = 0; k <= K; ++k)
    for (int l = 0; l <= K; ++l) res.moments.push_back({j, k, l, m.integrate(Integrand::exp_moment(k, l))});
}

Json fraction(const Rational& q) { return to_fraction_string(q); }

// ---------------------------------------------------------------------------
// scenario kinds: each reads its fields, then returns the work to do

struct Common {
  std::string name;
  LogDomain domain;
  int K = 6;
  double h = 1.0 / 128;
  std::uint64_t seed = 1;
};

using Job = std::function<void(ScenarioResult&)>;
using Kind = std::function<Job(Reader&, const Common&)>;

Job kind_boundary_measure(Reader& rd, const Common& c) {
  auto u = read_function(rd, "function", c.domain);
  Json def = {{"kind", "dyadic_levels"}, {"J", 20}};
  auto sched = read_schedule(rd, "schedule", u, c.domain, def);
  bool history = rd.boolean("history", true);
  bool grid = rd.boolean("grid", false);
  auto gsched = grid ? read_schedule(rd, "grid_schedule", u, c.domain, {{"kind", "dyadic_levels"}, {"J", 6}})
                     : std::nullopt;
  if (!grid) rd.mark("grid_schedule");
  double gtol = rd.number("grid_tolerance", 1e-2);
  std::optional<Rational> expect;
  if (rd.has("expect_mass")) {
    try {
      expect = parse_rational(rd.str("expect_mass"));
    } catch (const std::exception& e) {
      rd.error("expect_mass", e.what());
    }
  }
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    BoundaryMeasure bm = boundary_measure(ToricFunction(*u), *sched, MomentDictionary::standard(c.K), history);
    const ExactMeasure& ex = *bm.exact;
    const Rational mass = ex.total_mass();
    const Rational top = c.domain.top();
    rep.data["function"] = u->to_string();
    rep.data["mass"] = fraction(mass);
    rep.data["steps"] = bm.steps;
    rep.data["cauchy_gap"] = bm.cauchy_gap;
    rep.data["limit_gap"] = bm.limit_gap;
    if (expect) rep.check_true("exact_mass", mass == *expect, "mass " + to_fraction_string(mass));
    bool corner = ex.atoms.size() == (mass == 0 ? 0u : 1u) && ex.pole_mass == 0 &&
                  (ex.atoms.empty() || (ex.atoms[0].x.x == top && ex.atoms[0].x.y == top));
    rep.check_true("corner_atom", corner, "limit is mass * (sigma x sigma) at the distinguished boundary");
    rep.check_le("cauchy_gap", bm.cauchy_gap, sched->eps_weak);
    if (history) {
      const Rational inner = ma_pl(*u).interior_mass();
      bool conserved = true, single = true;
      const auto& g = sched->exhaustion;
      Json levels = Json::array();
      for (std::size_t j = 0; j < bm.exact_history.size(); ++j) {
        const auto& m = bm.exact_history[j];
        conserved = conserved && m.interior_mass() == inner;
        if (sched->kind == SweepSchedule::Kind::Sublevel && g) {
          single = single && m.atoms.size() == 1 && m.pole_mass == 0 &&
                   g->value(m.atoms[0].x) == sched->levels[j];
        }
        if (j < 8 && !m.atoms.empty())
          levels.push_back({{"j", j + 1}, {"x1", fraction(m.atoms[0].x.x)}, {"x2", fraction(m.atoms[0].x.y)},
                            {"mass", fraction(m.atoms[0].mass)}});
        add_moments(res, std::to_string(j + 1), m.to_log(), c.K);
      }
      rep.data["first_sweeps"] = levels;
      rep.check_true("history_mass", conserved, "every ma(u^j) carries the mass of ma(u)");
      if (sched->kind == SweepSchedule::Kind::Sublevel)
        rep.check_true("history_single_atom", single, "every ma(u^j) is one atom on the level set");
    }
    add_moments(res, "limit", bm.measure, c.K);
    add_measure(res, "ma_u", ma_pl(*u).to_log());
    add_measure(res, "limit", bm.measure);
    if (grid) {
      auto gf = GridConvexFunction::from_pl(*u, c.h);
      BoundaryMeasure gb = boundary_measure(ToricFunction(gf, *u), *gsched, MomentDictionary::standard(c.K));
      double gm = gb.measure.total_mass();
      rep.data["grid_mass"] = gm;
      rep.check_le("grid_mass_error", std::abs(gm - mass.get_d()), gtol, "grid path against the exact mass");
      add_measure(res, "grid_limit", gb.measure);
    }
  };
}

Job kind_mass_conservation(Reader& rd, const Common& c) {
  long count = rd.integer("count", 50, 1, 100000);
  long grid_count = rd.integer("grid_count", 50, 0, 100000);
  double depth = rd.number("grid_depth", 3);
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    std::mt19937_64 rng(c.seed);
    const std::vector<FreeRegion> regions = {
        FreeRegion::lower_box(Rational(-1, 4), Rational(-1, 4)),
        FreeRegion::box(-3, Rational(-1, 2), -3, Rational(-1, 2)),
        FreeRegion::box(Rational(-5, 2), Rational(-1, 8), -1, Rational(-1, 4))};
    long failures = 0;
    std::vector<PLConvexFunction> fs;
    Json rows = Json::array();
    for (long i = 0; i < count; ++i) {
      PLConvexFunction u = random_f_function(rng, 3, i % 2 == 1);
      const Rational m0 = ma_pl(u).interior_mass();
      std::vector<FreeRegion> ks = regions;
      ks.push_back(FreeRegion::sublevel(u, Rational(-1, 3)));
      for (const auto& K : ks) {
        Rational m1 = ma_pl(sweep_out(ToricFunction(u), K).pl()).interior_mass();
        if (m1 != m0) ++failures;
      }
      rows.push_back({{"function", u.to_string()}, {"mass", fraction(m0)}});
      fs.push_back(std::move(u));
    }
    // grid runs are independent and dominate the cost
    const long gridRuns = std::min(grid_count, count);
    std::vector<double> rel(gridRuns);
    std::atomic<long> next = 0;
    auto work = [&] {
      for (long i; (i = next++) < gridRuns;) {
        const auto& u = fs[i];
        auto G = GridConvexFunction::sample(-depth, 0, c.h, [&](double a, double b) { return u.value(a, b); });
        double before = ma_grid_nodes(G).total_mass();
        auto E = sweep_out(ToricFunction(G), regions[1]);
        double after = ma_grid_nodes(E.grid()).total_mass();
        rel[i] = std::abs(after - before) / before;
      }
    };
    std::vector<std::thread> pool;
    unsigned nt = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    double worstGrid = 0;
    for (long i = 0; i < gridRuns; ++i) {
      worstGrid = std::max(worstGrid, rel[i]);
      rows[i]["grid_relative_error"] = rel[i];
    }
    rep.data["functions"] = rows;
    rep.data["grid_runs"] = gridRuns;
    rep.check_le("exact_failures", double(failures), 0, "ma(u^K) mass == ma(u) mass, exactly");
    if (gridRuns > 0) rep.check_le("grid_relative_error", worstGrid, 1e-6);
  };
}

Job kind_order_laws(Reader& rd, const Common& c) {
  long count = rd.integer("count", 50, 1, 100000);
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    std::mt19937_64 rng(c.seed);
    const auto dict = MomentDictionary::standard(c.K);
    std::map<std::string, long> failures, seen;
    Json rows = Json::array();
    for (long i = 0; i < count; ++i) {
      PLConvexFunction u = random_f_function(rng, 3, i % 2 == 1);
      PLConvexFunction w = random_f_function(rng, 2, i % 3 == 0);
      PLConvexFunction v = pl_max(u, w);  // v >= u, still in F
      Report r = compare(u, v, dict);
      for (const auto& ch : r.checks) {
        ++seen[ch.name];
        if (!ch.passed) ++failures[ch.name];
      }
      if (i < 10) rows.push_back({{"u", u.to_string()}, {"v", v.to_string()}, {"report", r.to_json()}});
    }
    rep.data["pairs"] = rows;
    for (const auto& [name, n] : seen) {
      rep.data["checked_" + name] = n;
      rep.check_le(name + "_failures", double(failures[name]), 0);
    }
  };
}

Job kind_identity(Reader& rd, const Common& c) {
  auto u = read_function(rd, "function", c.domain);
  auto h = read_function(rd, "test_function", c.domain);
  auto sched = read_schedule(rd, "schedule", u, c.domain, {{"kind", "dyadic_levels"}, {"J", 12}});
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    IdentityOptions opts;
    opts.grid_h = c.h;
    rep.merge(identity_suite(*u, *h, *sched, opts));
    // Jensen over the whole psh dictionary
    LogMeasure mau = ma_pl(*u).to_log(), mu = exact_boundary_measure(*u).to_log();
    double worst = std::numeric_limits<double>::infinity();
    Json rows = Json::array();
    for (const auto& phi : psh_dictionary()) {
      Integrand f = as_integrand(phi);
      double a = mu.integrate(f), b = mau.integrate(f);
      double margin = std::isinf(b) && b < 0 ? std::numeric_limits<double>::infinity() : a - b;
      worst = std::min(worst, margin);
      rows.push_back({{"phi", phi.to_string()}, {"int_phi_mu", fmt(a)}, {"int_phi_ma", fmt(b)}});
    }
    rep.data["dictionary"] = rows;
    rep.check_ge("dictionary_jensen_margin", worst, -1e-9, "int phi ma(u) <= int phi dmu_u");
    add_measure(res, "ma_u", mau);
    add_measure(res, "mu_u", mu);
  };
}

Job kind_demailly(Reader& rd, const Common& c) {
  auto u = read_function(rd, "function", c.domain);
  long count = rd.integer("level_count", 20, 1, 10000);
  double deepest = rd.number("deepest_level", 2);
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    Rational worstResidual = 0, minSphere = 0, offLevel = 0;
    Rational depth = round_to_decimal(deepest, 6);
    Json rows = Json::array();
    for (long i = 1; i <= count; ++i) {
      Rational r = -depth * ratio(i, count);
      DemaillySplit s = demailly_split(*u, r);
      worstResidual = std::max(worstResidual, abs_q(s.residual));
      minSphere = i == 1 ? s.min_sphere_mass : std::min(minSphere, s.min_sphere_mass);
      offLevel = std::max(offLevel, s.off_level_mass);
      rows.push_back({{"r", fraction(r)},
                      {"interior", fraction(s.interior.total_mass())},
                      {"sphere", fraction(s.sphere.total_mass())},
                      {"residual", fraction(s.residual)}});
      if (i == count) {
        add_measure(res, "interior", s.interior.to_log());
        add_measure(res, "sphere", s.sphere.to_log());
      }
    }
    rep.data["levels"] = rows;
    rep.check_true("decomposition_residual", worstResidual == 0, "largest |residual| " + to_fraction_string(worstResidual));
    rep.check_true("sphere_charge_nonnegative", minSphere >= 0, "smallest sphere atom " + to_fraction_string(minSphere));
    rep.check_true("sphere_on_level_set", offLevel == 0);
  };
}

Job kind_family(Reader& rd, const Common& c) {
  auto limit = read_function(rd, "limit", c.domain);
  std::vector<long> ks;
  rd.mark("ks");
  if (rd.has("ks") && rd.raw("ks").is_array()) {
    for (const auto& k : rd.raw("ks")) {
      if (!k.is_number_integer() || k.get<long>() < 1) rd.error("ks", "expected positive integers");
      else ks.push_back(k.get<long>());
    }
  } else {
    rd.error("ks", "expected an array of positive integers");
  }
  long J = rd.integer("J", 12, 1, 64);
  double tol = rd.number("tolerance", 1e-3);
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    std::vector<PLConvexFunction> fam;
    for (long k : ks) fam.push_back(pl_max(*limit, PLConvexFunction::constant(Rational(-1, k), c.domain)));
    const auto dict = MomentDictionary::standard(c.K);
    FamilyConvergence fc = decreasing_family(fam, *limit, int(J), dict);
    // the interior measures, for contrast
    LogMeasure mu = exact_boundary_measure(*limit).to_log();
    Json rows = Json::array();
    double worstIncrease = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double inner = weakstar_distance(ma_pl(fam[i]).to_log(), mu, dict);
      rows.push_back({{"k", ks[i]}, {"distance", fc.distances[i]}, {"mass", fc.masses[i]}, {"interior_distance", inner}});
      if (i > 0) worstIncrease = std::max(worstIncrease, fc.distances[i] - fc.distances[i - 1]);
    }
    rep.data["family"] = rows;
    rep.check_le("distance_increase", worstIncrease, 0, "distances non-increasing in k");
    rep.check_le("final_distance", fc.distances.empty() ? 0 : fc.distances.back(), tol);
    add_measure(res, "mu_limit", mu);
  };
}

Job kind_henkin(Reader& rd, const Common& c) {
  auto u = read_function(rd, "function", c.domain, "green(1, 1)");
  auto sched = read_schedule(rd, "schedule", u, c.domain, {{"kind", "dyadic_levels"}, {"J", 20}});
  long kmax = rd.integer("kmax", 30, 1, 200);
  std::string family = rd.str("family", "peak");
  if (family != "peak" && family != "monomial") rd.error("family", "expected peak or monomial");
  double tol = rd.number("tolerance", 1e-9);
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    BoundaryMeasure bm = boundary_measure(ToricFunction(*u), *sched, MomentDictionary::standard(c.K));
    HenkinTable t = henkin_test(bm.measure, family, int(kmax));
    const double mass = bm.measure.total_mass();
    double worst = 0;
    Json rows = Json::array();
    for (std::size_t i = 0; i < t.k.size(); ++i) {
      double expect = family == "peak" ? mass * std::pow(0.25, t.k[i]) : 0.0;
      worst = std::max(worst, std::abs(t.value[i] - expect));
      rows.push_back({{"k", t.k[i]}, {"value", t.value[i]}, {"expected", expect}});
    }
    rep.data["table"] = rows;
    rep.data["decay_rate"] = t.decay_rate;
    rep.check_le("henkin_error", worst, tol, "int f_k dmu against mass * 4^-k");
    add_measure(res, "mu", bm.measure);
  };
}

Job kind_pipeline(Reader& rd, const Common& c) {
  auto mu = read_measure(rd, "measure");
  PipelineOptions o;
  o.k_max = int(rd.integer("k_max", o.k_max, 1, 64));
  o.j_max = int(rd.integer("j_max", o.j_max, 1, 60));
  o.tol_scale = rd.number("tol_scale", o.tol_scale);
  o.improving = rd.boolean("improving", o.improving);
  o.tail = rd.number("tail", o.tail);
  o.h = c.h;
  o.K = c.K;
  return [=](ScenarioResult& res) {
    PipelineState st = measure_pipeline(*mu, o);
    res.report.merge(st.report);
    std::ostringstream csv;
    st.write_csv(csv);
    res.tables["pipeline.csv"] = csv.str();
    for (std::size_t i = 0; i < st.rows.size(); ++i)
      add_moments(res, std::to_string(st.rows[i].k), st.w_measures[i], std::min(c.K, 4));
    add_moments(res, "target", *mu, std::min(c.K, 4));
    if (!st.w_measures.empty()) add_measure(res, "w_final", st.w_measures.back());
  };
}

Job kind_dirichlet(Reader& rd, const Common& c) {
  double half = rd.number("half_width", 1);
  double tol = rd.number("tolerance", 1e-2);
  DirichletOptions opts;
  opts.max_iterations = int(rd.integer("max_iterations", opts.max_iterations, 1, 100000));
  std::vector<Atom> atoms;
  rd.mark("atoms");
  if (rd.has("atoms") && rd.raw("atoms").is_array()) {
    for (const auto& a : rd.raw("atoms")) {
      if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number())
        rd.error("atoms", "each atom is [x1, x2, mass]");
      else if (!(a[2].get<double>() > 0))
        rd.error("atoms", "masses must be positive");
      else
        atoms.push_back({a[0].get<double>(), a[1].get<double>(), a[2].get<double>()});
    }
  } else {
    rd.error("atoms", "expected an array of [x1, x2, mass]");
  }
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    DirichletSolution sol = ma_dirichlet(atoms, DirichletDomain::square(half), opts);
    double mass = 0;
    for (const auto& a : atoms) mass += a.mass;
    rep.data["iterations"] = sol.iterations;
    rep.data["residual"] = sol.residual;
    rep.data["pieces"] = sol.pieces.size();
    rep.check_le("newton_residual", sol.residual, 1e-9 * std::max(1.0, mass));
    if (atoms.size() == 1) {
      // one atom: the gauge cone c (|x - a|_inf - dist) with 4 c^2 = mass
      const Atom& a = atoms[0];
      const double cc = std::sqrt(a.mass / 4);
      double err = 0;
      const int n = int(std::lround(2 * half / c.h));
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          double x = -half + i * c.h, y = -half + j * c.h;
          double r = std::max(std::abs(x - a.x1), std::abs(y - a.x2));
          // level set through the boundary is the largest square around a inside the domain
          double R = half - std::max(std::abs(a.x1), std::abs(a.x2));
          double cone = cc * (r - R);
          if (std::abs(a.x1) == 0 && std::abs(a.x2) == 0) err = std::max(err, std::abs(sol.value(x, y) - cone));
        }
      rep.data["sup_error"] = err;
      rep.check_le("gauge_sup_error", err, tol, "against the gauge-cone solution");
    }
    add_measure(res, "target", LogMeasure{atoms, {}, 0, 0});
    auto grid = sol.to_grid(-half, half, std::max(c.h, 1.0 / 64));
    add_moments(res, "solution", ma_grid(grid), std::min(c.K, 3));
  };
}

Job kind_weighted(Reader& rd, const Common& c) {
  auto u = read_function(rd, "function", c.domain);
  auto g = read_function(rd, "weight", c.domain);
  auto sched = read_schedule(rd, "schedule", u, c.domain, {{"kind", "dyadic_levels"}, {"J", 16}, {"eps", 1e-4}});
  double tol = rd.number("tolerance", 1e-3);
  return [=](ScenarioResult& res) {
    auto& rep = res.report;
    WeightedLimit wl = weighted_limit(*u, *g, *sched, MomentDictionary::standard(c.K));
    rep.data["density"] = wl.density;
    rep.data["trace"] = wl.trace;
    rep.data["sequence"] = wl.sequence;
    rep.data["cauchy_gap"] = wl.cauchy_gap;
    rep.check_le("density_trace_gap", std::abs(wl.density - wl.trace), tol, "g^u against g on supp mu_u");
    rep.check_le("pairing_error", wl.pairing_error, tol, "dictionary pairing of g ma(u^J) and g mu_u");
    add_measure(res, "g_mu_u", wl.limit);
  };
}

Job kind_mes_ineq(Reader& rd, const Common&) {
  auto mu = read_measure(rd, "measure");
  auto nu = read_measure(rd, "smaller_measure");
  bool constructive = rd.boolean("constructive", true);
  return [=](ScenarioResult& res) {
    res.report.merge(mes_ineq_check(*mu, *nu, psh_dictionary(), constructive));
    add_measure(res, "mu", *mu);
    add_measure(res, "nu", *nu);
  };
}

const std::map<std::string, Kind>& kinds() {
  static const std::map<std::string, Kind> k = {
      {"boundary_measure", kind_boundary_measure}, {"mass_conservation", kind_mass_conservation},
      {"order_laws", kind_order_laws},             {"identity", kind_identity},
      {"demailly_split", kind_demailly},           {"family_convergence", kind_family},
      {"henkin", kind_henkin},                     {"pipeline", kind_pipeline},
      {"dirichlet", kind_dirichlet},               {"weighted_limit", kind_weighted},
      {"measure_inequality", kind_mes_ineq}};
  return k;
}

struct Prepared {
  Common common;
  Job job;
  std::optional<std::vector<std::string>> asserted;  // nullopt: every check
  std::vector<std::string> diag;
};

Prepared prepare(const Json& cfg) {
  Prepared p;
  if (!cfg.is_object()) {
    p.diag.push_back("(root): expected an object");
    return p;
  }
  Reader rd(cfg);
  std::string format = rd.str("format", {}, true);
  if (!format.empty() && format != kFormat) rd.error("format", "expected '" + std::string(kFormat) + "'");
  long version = rd.integer("version", -1, 0, 1000);
  if (version < 0) rd.error("version", "required field missing");
  else if (version != kFormatVersion) rd.error("version", "unsupported version " + std::to_string(version));
  p.common.name = rd.str("name", {}, true);
  rd.str("description");
  rd.mark("units");
  std::string kind = rd.str("kind", {}, true);
  std::string dom = rd.str("domain", "bidisc");
  try {
    p.common.domain = parse_domain(dom);
  } catch (const std::exception& e) {
    rd.error("domain", e.what());
  }
  p.common.K = int(rd.integer("K", 6, 0, 12));
  p.common.h = rd.grid_h("grid_h", 1.0 / 128);
  p.common.seed = std::uint64_t(rd.integer("seed", 1, 0, std::numeric_limits<long>::max()));
  rd.mark("checks");
  if (rd.has("checks")) {
    const Json& ch = rd.raw("checks");
    if (!ch.is_array()) {
      rd.error("checks", "expected an array of check names");
    } else {
      p.asserted.emplace();
      for (const auto& n : ch) {
        if (n.is_string()) p.asserted->push_back(n.get<std::string>());
        else rd.error("checks", "check names are strings");
      }
    }
  }
  auto it = kinds().find(kind);
  if (!kind.empty() && it == kinds().end()) rd.error("kind", "unknown scenario kind '" + kind + "'");
  if (it != kinds().end()) p.job = it->second(rd, p.common);
  rd.unknown_fields();
  p.diag = rd.diag;
  return p;
}

// ---------------------------------------------------------------------------
// catalog

struct Entry {
  const char* name;
  const char* description;
  const char* json;
};

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> c = {
      {"green_sweep", "Green function of the bidisc swept over log(1-1/j) sublevels: sigma x sigma exactly",
       R"j({"kind": "boundary_measure", "function": "green(1, 1)",
           "schedule": {"kind": "log_levels", "J": 500, "eps": 1e-4}, "expect_mass": "1"})j"},
      {"weighted_pole", "Pole of max(2 x1, x2): corner atom of mass 2, exact and on the grid",
       R"j({"kind": "boundary_measure", "function": "max(2*x1, x2)",
           "schedule": {"kind": "dyadic_levels", "J": 30}, "expect_mass": "2",
           "grid": true, "grid_schedule": {"kind": "dyadic_levels", "J": 6}, "grid_tolerance": 1e-2})j"},
      {"mass_conservation", "Sweeping conserves Monge-Ampere mass: 50 random PL functions in F, exact and grid",
       R"j({"kind": "mass_conservation", "count": 50, "grid_count": 50, "seed": 20240601})j"},
      {"order_laws", "Order of boundary measures for u <= v and invariance under truncation, 50 random pairs",
       R"j({"kind": "order_laws", "count": 50, "seed": 7})j"},
      {"identity_jensen", "Limit identity for u = max(x1,x2), h = max(x1+x2,-1) and Jensen over the psh dictionary",
       R"j({"kind": "identity", "function": "max(x1, x2)", "test_function": "max(x1 + x2, -1)",
           "schedule": {"kind": "dyadic_levels", "J": 12}})j"},
      {"demailly_split", "Interior plus level-set charge of max(u, r) across 20 levels, exact",
       R"j({"kind": "demailly_split", "function": "max(2*x1, x2, 1/2*x1 + 1/2*x2 - 1/4)", "level_count": 20,
           "deepest_level": 2})j"},
      {"family_convergence", "u_k = max(x1, x2, -1/k) decreasing to max(x1, x2): boundary measures converge",
       R"j({"kind": "family_convergence", "limit": "max(x1, x2)", "ks": [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000],
           "J": 12, "tolerance": 1e-3})j"},
      {"henkin_decay", "Peak functions ((1+z)/2 (1+w)/2)^k against the pole measure: exactly 4^-k",
       R"j({"kind": "henkin", "function": "green(1, 1)", "kmax": 30, "family": "peak", "tolerance": 1e-9})j"},
      {"dirichlet_pipeline", "Measure sigma_1 x dV_1/2 reached by Dirichlet solutions on growing polydiscs",
       R"j({"kind": "pipeline", "measure": "product(sigma(1), discV(0.5))", "k_max": 8, "K": 4, "grid_h": "1/128"})j"},
      {"dirichlet_gauge", "Unit atom on the square: the solver reproduces the gauge cone",
       R"j({"kind": "dirichlet", "atoms": [[0, 0, 1]], "half_width": 1, "grid_h": "1/128", "tolerance": 1e-2})j"},
      {"weighted_trace", "g^u for g = max(x1+x2,-1), u = max(x1,x2) equals the boundary trace of g",
       R"j({"kind": "weighted_limit", "function": "max(x1, x2)", "weight": "max(x1 + x2, -1)",
           "schedule": {"kind": "dyadic_levels", "J": 16, "eps": 1e-4}, "tolerance": 1e-3})j"},
      {"measure_inequality", "psh-dictionary order of two product measures and the constructive bound",
       R"j({"kind": "measure_inequality", "measure": "product(sigma(1), discV(0.5))",
           "smaller_measure": "product(sigma(0.5), discV(0.5))"})j"},
      {"artifacts_only", "Boundary measure of max(x1, x2, -1) with no asserted checks",
       R"j({"kind": "boundary_measure", "function": "max(x1, x2, -1)", "checks": []})j"},
  };
  return c;
}

}  // namespace

Json report_header(const std::string& scenario) {
  Json h;
  h["format"] = "cma-report";
  h["version"] = kFormatVersion;
  h["scenario"] = scenario;
  h["normalization"] =
      "u(z,w) = f(log|z|, log|w|); (dd^c u)^2 of a convex f is 2 * area of its subgradient image, "
      "so (dd^c log max(|z|,|w|))^2 = delta_0 and sigma x sigma has mass 1";
  h["units"] = {{"coordinates", "log radius x = log|z|"},
                {"grid_h", "lattice spacing in log radius"},
                {"mass", "Monge-Ampere mass in the normalization above"}};
  return h;
}

Json ScenarioResult::report_json() const {
  Json j = report_header(name);
  j["exit_code"] = exit_code;
  if (!error.empty()) j["error"] = error;
  j["passed"] = exit_code == kExitOk;
  j["report"] = report.to_json();
  return j;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> out;
  for (const auto& e : catalog()) out.push_back(e.name);
  return out;
}

std::string scenario_description(const std::string& name) {
  for (const auto& e : catalog())
    if (name == e.name) return e.description;
  throw InvalidInput("unknown scenario '" + name + "'");
}

Json builtin_scenario(const std::string& name) {
  for (const auto& e : catalog()) {
    if (name != e.name) continue;
    Json body = Json::parse(e.json);
    Json cfg = {{"format", kFormat}, {"version", kFormatVersion}, {"name", e.name}, {"description", e.description}};
    for (auto it = body.begin(); it != body.end(); ++it) cfg[it.key()] = it.value();
    return cfg;
  }
  throw InvalidInput("unknown scenario '" + name + "'");
}

Json parse_config(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw InvalidInput("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                       (pos == std::string::npos ? msg : msg.substr(pos)));
  }
}

std::vector<std::string> validate_config(const Json& config) { return prepare(config).diag; }

ScenarioResult run_scenario(const Json& config) {
  ScenarioResult res;
  Prepared p = prepare(config);
  res.name = p.common.name.empty() ? "unnamed" : p.common.name;
  res.report = Report(res.name);
  if (!p.diag.empty()) {
    res.exit_code = kExitBadConfig;
    for (const auto& d : p.diag) res.error += (res.error.empty() ? "" : "; ") + d;
    return res;
  }
  try {
    p.job(res);
  } catch (const InvalidInput& e) {
    res.exit_code = kExitBadConfig;
    res.error = e.what();
    return res;
  } catch (const std::exception& e) {
    res.exit_code = kExitSolverFailed;
    res.error = e.what();
    return res;
  }
  std::vector<std::string> asserted;
  if (p.asserted) {
    for (const auto& n : *p.asserted) {
      if (!res.report.find(n)) {
        res.exit_code = kExitBadConfig;
        res.error = "checks: no check named '" + n + "'";
        return res;
      }
      asserted.push_back(n);
    }
  } else {
    for (const auto& c : res.report.checks) asserted.push_back(c.name);
  }
  bool ok = true;
  for (const auto& n : asserted) ok = ok && res.report.find(n)->passed;
  res.report.data["asserted_checks"] = asserted;
  res.exit_code = ok ? kExitOk : kExitChecksFailed;
  return res;
}

void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "report.json");
    os << result.report_json().dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "moments.csv");
    os << "j,k,l,value\n";
    for (const auto& m : result.moments) os << m.j << ',' << m.k << ',' << m.l << ',' << fmt(m.value) << '\n';
  }
  {
    std::ofstream os(dir / "measures.csv");
    os << "label,x1,x2,mass\n";
    for (const auto& m : result.measures)
      os << m.label << ',' << (std::isnan(m.x1) ? "" : fmt(m.x1)) << ',' << (std::isnan(m.x2) ? "" : fmt(m.x2))
         << ',' << fmt(m.mass) << '\n';
  }
  for (const auto& [name, text] : result.tables) std::ofstream(dir / name) << text;
  if (!std::filesystem::exists(dir / "report.json")) throw InvalidInput("could not write artifacts to " + dir.string());
}

}  // namespace cma
