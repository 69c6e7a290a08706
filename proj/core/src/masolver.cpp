#include "cma/masolver.hpp"

#include "cma/errors.hpp"
#include "cma/geometry.hpp"
#include "cma/monge_ampere.hpp"
#include "cma/toric.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>

namespace cma {

LogDomain enlarge(const LogDomain& base, int k) {
  if (!base.is_polydisc()) throw InvalidInput("enlarge: polydisc base required");
  if (k < 1) throw InvalidInput("enlarge: k must be >= 1");
  return LogDomain::shifted(base.top() + round_to_decimal(std::log1p(1.0 / k)));
}

bool DirichletDomain::contains(double x1, double x2) const {
  if (kind == Kind::Polydisc) return x1 < s && x2 < s;
  return std::abs(x1) < half && std::abs(x2) < half;
}

namespace {

constexpr int kConeEdge = -2;  // fixed boundary of the slope cone
constexpr int kBoxEdge = -3;   // artificial bounding box
constexpr int kBoundarySite = -10;

struct Site {
  double x, y;
};

template <class F>
void parallel_for(int n, F&& body) {
  int threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max(1, n / 64));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

/// Cells of the Legendre dual: cell_i = {y in cone : y.p_i - h_i >= y.p_j - h_j,
/// y.p_i - h_i >= y.v for boundary vertices v}.
class DualDiagram {
 public:
  DualDiagram(const DirichletDomain& d, std::vector<Site> sites) : dom_(d), sites_(std::move(sites)) {
    if (d.kind == DirichletDomain::Kind::Polydisc) {
      bnd_ = {{d.s, d.s}};
    } else {
      double a = d.half;
      bnd_ = {{-a, -a}, {a, -a}, {a, a}, {-a, a}};
    }
  }

  std::size_t size() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<Site>& boundary() const { return bnd_; }

  /// Cell of site i (i < 0: boundary vertex -1-i) with edge labels.
  DPolygon cell(int i, const std::vector<double>& h, double Y, std::vector<int>& labels) const {
    DPolygon poly;
    if (dom_.kind == DirichletDomain::Kind::Polydisc) {
      poly = box_polygon(0.0, 0.0, Y, Y);
      labels = {kConeEdge, kBoxEdge, kBoxEdge, kConeEdge};
    } else {
      poly = box_polygon(-Y, -Y, Y, Y);
      labels = {kBoxEdge, kBoxEdge, kBoxEdge, kBoxEdge};
    }
    Site p = i >= 0 ? sites_[i] : bnd_[-1 - i];
    double hp = i >= 0 ? h[i] : 0.0;
    for (std::size_t v = 0; v < bnd_.size() && !poly.empty(); ++v) {
      if (i < 0 && int(v) == -1 - i) continue;
      poly = clip_halfplane(poly, p.x - bnd_[v].x, p.y - bnd_[v].y, -hp, &labels,
                            kBoundarySite - int(v));
    }
    for (std::size_t j = 0; j < sites_.size() && !poly.empty(); ++j) {
      if (int(j) == i) continue;
      poly = clip_halfplane(poly, p.x - sites_[j].x, p.y - sites_[j].y, h[j] - hp, &labels, int(j));
    }
    if (poly.vertices.size() < 3) {
      poly.vertices.clear();
      labels.clear();
    }
    return poly;
  }

  /// Slope bound containing every interior cell.
  double slope_bound(const std::vector<double>& h) const {
    double Y = 1;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      double d;
      if (dom_.kind == DirichletDomain::Kind::Polydisc)
        d = std::min(dom_.s - sites_[i].x, dom_.s - sites_[i].y);
      else
        d = std::min(dom_.half - std::abs(sites_[i].x), dom_.half - std::abs(sites_[i].y));
      Y = std::max(Y, -h[i] / d);
    }
    return 2 * Y + 1;
  }

  double conjugate(const std::vector<double>& h, double y1, double y2) const {
    double best = -1e300;
    for (const auto& v : bnd_) best = std::max(best, y1 * v.x + y2 * v.y);
    for (std::size_t j = 0; j < sites_.size(); ++j)
      best = std::max(best, y1 * sites_[j].x + y2 * sites_[j].y - h[j]);
    return best;
  }

 private:
  DirichletDomain dom_;
  std::vector<Site> sites_;
  std::vector<Site> bnd_;
};

struct AreaEval {
  std::vector<double> area;
  std::vector<std::vector<std::pair<int, double>>> facets;  // (site j, length)
  std::vector<double> boundary_coupling;                    // sum L / |p - v|
  bool touches_box = false;
};

AreaEval evaluate(const DualDiagram& dd, const std::vector<double>& h, double Y) {
  const int n = int(dd.size());
  AreaEval ev;
  ev.area.assign(n, 0);
  ev.facets.assign(n, {});
  ev.boundary_coupling.assign(n, 0);
  std::vector<char> box(n, 0);
  parallel_for(n, [&](int i) {
    std::vector<int> labels;
    DPolygon c = dd.cell(i, h, Y, labels);
    ev.area[i] = c.area();
    const auto& p = dd.sites()[i];
    for (std::size_t e = 0; e < c.vertices.size(); ++e) {
      const auto& a = c.vertices[e];
      const auto& b = c.vertices[(e + 1) % c.vertices.size()];
      double len = std::hypot(b.x - a.x, b.y - a.y);
      int lab = labels[e];
      if (len == 0) continue;
      if (lab >= 0) {
        const auto& q = dd.sites()[lab];
        ev.facets[i].push_back({lab, len / std::hypot(p.x - q.x, p.y - q.y)});
      } else if (lab <= kBoundarySite) {
        const auto& v = dd.boundary()[kBoundarySite - lab];
        ev.boundary_coupling[i] += len / std::hypot(p.x - v.x, p.y - v.y);
      } else if (lab == kBoxEdge) {
        box[i] = 1;
      }
    }
  });
  ev.touches_box = std::any_of(box.begin(), box.end(), [](char c) { return c != 0; });
  return ev;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double DirichletSolution::value(double x1, double x2) const {
  double best = -1e300;
  for (const auto& p : pieces) best = std::max(best, p(x1, x2));
  return best;
}

GridConvexFunction DirichletSolution::to_grid(double lo, double hi, double h) const {
  LogDomain d = domain.kind == DirichletDomain::Kind::Polydisc
                    ? LogDomain::shifted(round_to_decimal(domain.s))
                    : LogDomain::quadrant();
  return GridConvexFunction::sample(lo, hi, h, [this](double a, double b) { return value(a, b); }, d);
}

DirichletSolution ma_dirichlet(const std::vector<Atom>& target, const DirichletDomain& domain,
                               const DirichletOptions& opts) {
  DirichletSolution sol;
  sol.domain = domain;
  double M = 0;
  for (const auto& a : target) {
    if (!(a.mass >= 0)) throw InvalidInput("ma_dirichlet: negative mass");
    if (a.mass == 0) continue;
    if (!domain.contains(a.x1, a.x2))
      throw InvalidInput("ma_dirichlet: target atom outside the open domain");
    sol.target.push_back(a);
    M += a.mass;
  }
  const int n = int(sol.target.size());
  if (n == 0) {
    sol.pieces.push_back({0, 0, 0});
    return sol;
  }
  std::vector<Site> sites;
  for (const auto& a : sol.target) sites.push_back({a.x1, a.x2});
  DualDiagram dd(domain, sites);

  // start from a paraboloid through the boundary vertices: every site is a
  // vertex of the lower hull, so every cell is nonempty
  std::vector<double> h(n);
  if (domain.kind == DirichletDomain::Kind::Polydisc) {
    double L = 1;
    for (const auto& p : sites) L = std::max({L, domain.s - p.x + 1, domain.s - p.y + 1});
    double q = domain.s - L;
    double r2 = 2 * L * L;
    for (int i = 0; i < n; ++i)
      h[i] = (sites[i].x - q) * (sites[i].x - q) + (sites[i].y - q) * (sites[i].y - q) - r2;
  } else {
    for (int i = 0; i < n; ++i)
      h[i] = sites[i].x * sites[i].x + sites[i].y * sites[i].y - 2 * domain.half * domain.half;
  }
  {
    auto ev = evaluate(dd, h, dd.slope_bound(h));
    double S = 0;
    for (double a : ev.area) S += a;
    double eps = std::sqrt(M / (2 * S));
    for (double& x : h) x *= eps;
  }

  auto residual_of = [&](const AreaEval& ev) {
    std::vector<double> F(n);
    for (int i = 0; i < n; ++i) F[i] = ev.area[i] - sol.target[i].mass / 2;
    return F;
  };
  AreaEval ev = evaluate(dd, h, dd.slope_bound(h));
  std::vector<double> F = residual_of(ev);
  double minTarget = 1e300, minArea = 1e300;
  for (int i = 0; i < n; ++i) {
    minTarget = std::min(minTarget, sol.target[i].mass / 2);
    minArea = std::min(minArea, ev.area[i]);
  }
  // cells may not shrink below half the smaller of the two (damping cap)
  const double floorArea = 0.5 * std::min(minTarget, minArea);
  const double tol = opts.tolerance * M;

  int it = 0;
  for (; it < opts.max_iterations && max_abs(F) > tol; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) {
      double diag = ev.boundary_coupling[i];
      for (auto [j, c] : ev.facets[i]) {
        trip.emplace_back(i, j, -c);
        diag += c;
      }
      trip.emplace_back(i, i, diag);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = F[i];
    Eigen::VectorXd delta = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw NotConverged("ma_dirichlet: singular Newton system", max_abs(F));

    const double f0 = max_abs(F);
    double tau = 1;
    bool accepted = false;
    while (tau > 1e-12) {
      std::vector<double> h2(n);
      for (int i = 0; i < n; ++i) h2[i] = h[i] + tau * delta[i];
      AreaEval ev2 = evaluate(dd, h2, dd.slope_bound(h2));
      auto F2 = residual_of(ev2);
      double minA = *std::min_element(ev2.area.begin(), ev2.area.end());
      if (!ev2.touches_box && minA >= floorArea && max_abs(F2) <= (1 - tau / 2) * f0) {
        h = std::move(h2);
        ev = std::move(ev2);
        F = std::move(F2);
        accepted = true;
        break;
      }
      tau /= 2;
    }
    if (!accepted) {
      if (max_abs(F) <= 1e-9 * M) break;  // stalled at rounding level
      throw NotConverged("ma_dirichlet: damped Newton stalled", 2 * max_abs(F));
    }
  }
  sol.iterations = it;
  sol.residual = 2 * max_abs(F);
  if (max_abs(F) > std::max(tol, 1e-9 * M))
    throw NotConverged("ma_dirichlet: iteration budget exhausted", sol.residual);
  sol.heights = h;

  // primal pieces from the vertices of all dual cells
  const double Y = dd.slope_bound(h);
  std::vector<DPoint> verts;
  std::vector<int> labels;
  for (int i = -int(dd.boundary().size()); i < n; ++i) {
    DPolygon c = dd.cell(i, h, Y, labels);
    for (const auto& v : c.vertices)
      if (std::max(std::abs(v.x), std::abs(v.y)) < Y * (1 - 1e-12)) verts.push_back(v);
  }
  if (domain.kind == DirichletDomain::Kind::Polydisc) verts.push_back({0, 0});
  std::map<std::pair<long long, long long>, DPoint> uniq;
  for (const auto& v : verts) {
    auto key = std::make_pair(std::llround(v.x * 1e13), std::llround(v.y * 1e13));
    uniq.emplace(key, v);
  }
  for (const auto& [key, v] : uniq) sol.pieces.push_back({v.x, v.y, -dd.conjugate(h, v.x, v.y)});
  return sol;
}

namespace {

/// Splits a radial law onto lattice nodes (hat weights), returning (log radius, weight).
std::vector<std::pair<double, double>> split_law(const CoordLaw& law, double h, double tail) {
  const double L = std::log(law.radius);
  if (law.kind == CoordLaw::Kind::Circle) return {{L, 1.0}};
  auto E = [L](double t) { return std::exp(2 * (t - L)); };
  auto G = [&](double t) { return (t - 0.5) * E(t); };
  std::vector<double> nodes;
  long long top = static_cast<long long>(std::floor(L / h));
  long long bottom = static_cast<long long>(std::floor((L - tail) / h));
  for (long long m = bottom; m <= top; ++m) nodes.push_back(m * h);
  if (L - nodes.back() > 1e-12 * h) nodes.push_back(L);
  else nodes.back() = L;
  std::vector<double> w(nodes.size(), 0.0);
  w[0] = E(nodes[0]);  // lumped tail
  for (std::size_t m = 0; m + 1 < nodes.size(); ++m) {
    double a = nodes[m], b = nodes[m + 1];
    double mass = E(b) - E(a), first = G(b) - G(a);
    w[m] += (b * mass - first) / (b - a);
    w[m + 1] += (first - a * mass) / (b - a);
  }
  std::vector<std::pair<double, double>> out;
  for (std::size_t m = 0; m < nodes.size(); ++m)
    if (w[m] > 0) out.push_back({nodes[m], w[m]});
  return out;
}

}  // namespace

std::vector<Atom> atomize(const LogMeasure& m, double h, double tail) {
  if (m.pole_mass != 0 || m.boundary_mass != 0)
    throw InvalidInput("atomize: pole or unlocated mass cannot be atomized");
  std::map<std::pair<double, double>, double> acc;
  for (const auto& a : m.atoms) acc[{a.x1, a.x2}] += a.mass;
  for (const auto& p : m.products) {
    auto s1 = split_law(p.first, h, tail), s2 = split_law(p.second, h, tail);
    for (auto [x1, w1] : s1)
      for (auto [x2, w2] : s2) acc[{x1, x2}] += p.mass * w1 * w2;
  }
  std::vector<Atom> out;
  for (const auto& [x, mass] : acc)
    if (mass > 0) out.push_back({x.first, x.second, mass});
  return out;
}

namespace {

struct Line {
  double slope, icept;
  int id;
};

/// Upper envelope of lines over (-inf, end]: active lines in order and the
/// breakpoints between consecutive ones.
void upper_envelope(std::vector<Line> lines, double end, std::vector<int>& active,
                    std::vector<double>& breaks) {
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.slope < b.slope || (a.slope == b.slope && a.icept > b.icept);
  });
  std::vector<Line> hull;
  auto cross_at = [](const Line& a, const Line& b) { return (a.icept - b.icept) / (b.slope - a.slope); };
  for (const auto& l : lines) {
    if (!hull.empty() && hull.back().slope == l.slope) continue;
    while (hull.size() >= 2 &&
           cross_at(hull[hull.size() - 2], l) <= cross_at(hull[hull.size() - 2], hull.back()))
      hull.pop_back();
    hull.push_back(l);
  }
  // with increasing slopes the leftmost line wins at -inf; keep those alive before `end`
  active.clear();
  breaks.clear();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (i > 0) {
      double b = cross_at(hull[i - 1], hull[i]);
      if (b >= end) break;
      breaks.push_back(b);
    }
    active.push_back(hull[i].id);
  }
}

double hull_area(std::vector<DPoint> pts) {
  if (pts.size() < 3) return 0;
  return std::max(0.0, convex_hull(std::move(pts)).area());
}

}  // namespace

LogMeasure inward_sweep_ma(const DirichletSolution& u, double delta) {
  if (u.domain.kind != DirichletDomain::Kind::Polydisc) throw InvalidInput("inward sweep needs a polydisc");
  const double s = u.domain.s;
  const auto& P = u.pieces;
  const int n = int(P.size());
  std::vector<double> kappa(n);
  for (int m = 0; m < n; ++m) kappa[m] = std::max(0.0, -P[m](s, s)) / (s + delta);
  auto active_at = [&](double x1, double x2) {
    double best = -1e300;
    int arg = 0;
    for (int m = 0; m < n; ++m)
      if (P[m](x1, x2) > best) best = P[m](x1, x2), arg = m;
    const double tol =
        1e-12 * (1 + std::abs(P[arg].c) + (std::abs(P[arg].a1) + std::abs(P[arg].a2)) * (std::abs(x1) + std::abs(x2)));
    std::vector<int> ids;
    for (int m = 0; m < n; ++m)
      if (P[m](x1, x2) >= best - tol) ids.push_back(m);
    return ids;
  };

  LogMeasure out;
  for (const auto& a : u.target)
    if (a.x1 < -delta && a.x2 < -delta) out.atoms.push_back(a);

  // face x_axis = -delta; `axis` is the coordinate held fixed
  std::vector<int> lastOnFace(2, -1);
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<Line> lines;
    for (int m = 0; m < n; ++m) {
      const auto& p = P[m];
      double fixedSlope = axis == 0 ? p.a1 : p.a2;
      double freeSlope = axis == 0 ? p.a2 : p.a1;
      lines.push_back({freeSlope, p.c - fixedSlope * delta, m});
    }
    std::vector<int> act;
    std::vector<double> br;
    upper_envelope(lines, -delta, act, br);
    lastOnFace[axis] = act.back();
    auto persp = [&](int m) {
      DPoint y{P[m].a1, P[m].a2};
      (axis == 0 ? y.x : y.y) += kappa[m];
      return y;
    };
    for (std::size_t b = 0; b < br.size(); ++b) {
      double x1 = axis == 0 ? -delta : br[b];
      double x2 = axis == 0 ? br[b] : -delta;
      std::vector<DPoint> slopes;
      for (int m : active_at(x1, x2)) slopes.push_back({P[m].a1, P[m].a2});
      slopes.push_back(persp(act[b]));
      slopes.push_back(persp(act[b + 1]));
      double mass = 2 * hull_area(slopes);
      if (mass > 0) out.atoms.push_back({x1, x2, mass});
    }
  }
  // box corner
  {
    std::vector<DPoint> slopes;
    for (int m : active_at(-delta, -delta)) slopes.push_back({P[m].a1, P[m].a2});
    int m1 = lastOnFace[0], m2 = lastOnFace[1];
    slopes.push_back({P[m1].a1 + kappa[m1], P[m1].a2});
    slopes.push_back({P[m2].a1, P[m2].a2 + kappa[m2]});
    double mass = 2 * hull_area(slopes);
    if (mass > 0) out.atoms.push_back({-delta, -delta, mass});
  }
  return out;
}

double inward_sweep_value(const DirichletSolution& u, double delta, double x1, double x2) {
  const double s = u.domain.s;
  double lambda = std::min(1.0, (s - std::max(x1, x2)) / (s + delta));
  if (lambda <= 0) return 0;
  return lambda * u.value(s + (x1 - s) / lambda, s + (x2 - s) / lambda);
}

std::vector<int> diagonal_select(const std::vector<std::vector<double>>& gaps,
                                 const std::vector<double>& tol, std::vector<std::string>* warnings,
                                 bool improving) {
  std::vector<int> out;
  int prev = 1;
  double last_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    const auto& g = gaps[k];
    const double bound = improving ? std::min(tol[k], last_gap) : tol[k];
    int pick = -1;
    for (int j = prev; j <= int(g.size()); ++j)
      if (g[j - 1] < bound) {
        pick = j;
        break;
      }
    if (pick < 0) {
      pick = std::max(prev, int(g.size()));
      if (warnings)
        warnings->push_back("k=" + std::to_string(k + 1) + ": inner budget exhausted, j=" +
                            std::to_string(pick));
    }
    out.push_back(pick);
    prev = pick;
    last_gap = g.empty() ? last_gap : g[pick - 1];
  }
  return out;
}

void PipelineState::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "k,shift,j,distance,mass,max_vanishing,newton_iterations\n";
  for (const auto& r : rows)
    os << r.k << ',' << r.shift << ',' << r.j << ',' << r.distance << ',' << r.mass << ','
       << r.max_vanishing << ',' << r.newton_iterations << '\n';
  os.precision(old);
}

PipelineState measure_pipeline(const LogMeasure& mu, const PipelineOptions& opts) {
  PipelineState st;
  st.target = mu;
  const auto dict = MomentDictionary::standard(opts.K);
  const auto target_moments = dict.moments(mu);
  const double M = mu.total_mass();
  const auto tests = bounded_f_dictionary();
  std::vector<Integrand> test_integrands;
  for (const auto& t : tests) test_integrands.push_back(as_integrand(t));

  std::vector<Atom> atoms = M > 0 ? atomize(mu, opts.h, opts.tail) : std::vector<Atom>{};
  std::vector<std::vector<double>> gaps;
  std::vector<std::vector<LogMeasure>> inner;
  std::vector<double> tol;
  for (int k = 1; k <= opts.k_max; ++k) {
    double s = enlarge(LogDomain::quadrant(), k).shift.get_d();
    st.solutions.push_back(ma_dirichlet(atoms, DirichletDomain::polydisc(s)));
    const auto& sol = st.solutions.back();
    std::vector<double> g;
    std::vector<LogMeasure> ms;
    for (int j = 1; j <= opts.j_max; ++j) {
      LogMeasure m = atoms.empty() ? LogMeasure{} : inward_sweep_ma(sol, std::ldexp(1.0, -j));
      auto mom = dict.moments(m);
      double d = 0;
      for (std::size_t l = 0; l < mom.size(); ++l) d = std::max(d, std::abs(mom[l] - target_moments[l]));
      g.push_back(d);
      ms.push_back(std::move(m));
    }
    gaps.push_back(std::move(g));
    inner.push_back(std::move(ms));
    tol.push_back(opts.tol_scale / k);
  }
  auto picks = diagonal_select(gaps, tol, &st.report.diagnostics, opts.improving);

  bool mass_ok = true, monotone_inner = true;
  double worst_mass = 0;
  for (int k = 1; k <= opts.k_max; ++k) {
    PipelineRow row;
    row.k = k;
    row.shift = st.solutions[k - 1].domain.s;
    row.j = picks[k - 1];
    row.distance = gaps[k - 1][row.j - 1];
    const LogMeasure& w = inner[k - 1][row.j - 1];
    row.mass = w.total_mass();
    row.newton_iterations = st.solutions[k - 1].iterations;
    worst_mass = std::max(worst_mass, row.mass - M);
    for (const auto& m : inner[k - 1]) mass_ok = mass_ok && m.total_mass() <= M + 1e-6;
    std::vector<double> van;
    for (const auto& t : test_integrands) {
      van.push_back(w.integrate(t));
      row.max_vanishing = std::max(row.max_vanishing, std::abs(van.back()));
    }
    st.vanishing.push_back(std::move(van));
    st.w_measures.push_back(w);
    st.rows.push_back(row);
    // u_k^{j1} >= u_k^{j2} for j1 <= j2 on a few probe points
    const auto& sol = st.solutions[k - 1];
    if (!atoms.empty())
      for (double x : {-1.5, -0.6, -0.2, -0.05, -0.01})
        for (int j = 1; j < opts.j_max; j += 3) {
          double a = inward_sweep_value(sol, std::ldexp(1.0, -j), x, -0.3);
          double b = inward_sweep_value(sol, std::ldexp(1.0, -j - 1), x, -0.3);
          if (b > a + 1e-9) monotone_inner = false;
        }
  }

  auto& rep = st.report;
  rep.data["target_mass"] = M;
  rep.data["atoms"] = atoms.size();
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& r : st.rows)
    table.push_back({{"k", r.k}, {"shift", r.shift}, {"j", r.j}, {"distance", r.distance},
                     {"mass", r.mass}, {"max_vanishing", r.max_vanishing}});
  rep.data["rows"] = table;
  int increases = 0;
  for (std::size_t k = 1; k < st.rows.size(); ++k)
    if (st.rows[k].distance > st.rows[k - 1].distance) ++increases;
  rep.check_le("distance_increases", increases, 0, "per-k dictionary distance is nonincreasing");
  rep.check_le("final_distance", st.rows.empty() ? 0 : st.rows.back().distance, 0.05);
  rep.check_le("mass_excess", worst_mass, 1e-6, "int (dd^c w_k)^2 <= mu mass");
  rep.check_true("inner_mass_bound", mass_ok);
  rep.check_true("inner_monotone", monotone_inner, "u_k^j decreases in j");
  rep.check_le("final_vanishing", st.rows.empty() ? 0 : st.rows.back().max_vanishing, 1e-2,
               "bounded F dictionary against ma(w_k)");
  return st;
}

Report mes_ineq_check(const LogMeasure& mu, const LogMeasure& nu,
                      const std::vector<PLConvexFunction>& dict, bool constructive) {
  Report rep("mes_ineq");
  auto margins = [&](const LogMeasure& upper, const char* name) {
    double worst = std::numeric_limits<double>::infinity();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& phi : dict) {
      Integrand f = as_integrand(phi);
      double a = upper.integrate(f), b = nu.integrate(f);
      double margin;
      if (std::isinf(b) && b < 0) margin = std::numeric_limits<double>::infinity();
      else margin = a - b;
      rows.push_back({{"phi", phi.to_string()}, {"margin", std::isfinite(margin) ? nlohmann::ordered_json(margin)
                                                                                : nlohmann::ordered_json("inf")}});
      worst = std::min(worst, margin);
    }
    rep.data[name] = rows;
    return worst;
  };
  rep.check_ge("margin", margins(mu, "margins"), -1e-9, "int phi dnu <= int phi dmu");
  if (constructive && nu.total_mass() > 0) {
    ToricFunction P = potential(nu);
    double mass = P.ma().total_mass();
    LogMeasure mup;
    mup.atoms.push_back({0, 0, mass / nu.total_mass()});
    rep.data["potential_mass"] = mass;
    rep.check_ge("constructive_margin", margins(mup, "constructive_margins"), -1e-3,
                 "mu' = nu(Omega)^-1 mu_{P_nu}");
  }
  return rep;
}

}  // namespace cma
