#include "cma/envelope.hpp"

#include "cma/monge_ampere.hpp"

#include "cma/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace cma {

FreeRegion FreeRegion::sublevel(const PLConvexFunction& g, const Rational& r) {
  FreeRegion k;
  k.kind = Kind::Sublevel;
  k.exhaustion = g;
  k.level = r;
  return k;
}

FreeRegion FreeRegion::lower_box(const Rational& hi1, const Rational& hi2) {
  FreeRegion k;
  k.kind = Kind::Box;
  k.hi1 = hi1;
  k.hi2 = hi2;
  return k;
}

FreeRegion FreeRegion::box(const Rational& lo1, const Rational& hi1, const Rational& lo2,
                           const Rational& hi2) {
  FreeRegion k = lower_box(hi1, hi2);
  k.has_lo1 = k.has_lo2 = true;
  k.lo1 = lo1;
  k.lo2 = lo2;
  return k;
}

bool FreeRegion::contains(double x1, double x2) const {
  switch (kind) {
    case Kind::Empty: return false;
    case Kind::Sublevel: return exhaustion->value(x1, x2) < level.get_d();
    case Kind::Box:
      return (!has_lo1 || x1 > lo1.get_d()) && x1 < hi1.get_d() &&
             (!has_lo2 || x2 > lo2.get_d()) && x2 < hi2.get_d();
  }
  return false;
}

std::vector<ConvexRegion> FreeRegion::complement_pieces() const {
  std::vector<ConvexRegion> out;
  switch (kind) {
    case Kind::Empty: out.push_back({}); break;
    case Kind::Sublevel: {
      const auto& P = exhaustion->pieces();
      for (std::size_t j = 0; j < P.size(); ++j) {
        ConvexRegion piece;
        for (std::size_t q = 0; q < P.size(); ++q)
          if (q != j) piece.push_back({P[j].a1 - P[q].a1, P[j].a2 - P[q].a2, P[j].c - P[q].c});
        piece.push_back({P[j].a1, P[j].a2, P[j].c - level});
        out.push_back(std::move(piece));
      }
      break;
    }
    case Kind::Box:
      out.push_back({{1, 0, -hi1}});
      out.push_back({{0, 1, -hi2}});
      if (has_lo1) out.push_back({{-1, 0, lo1}});
      if (has_lo2) out.push_back({{0, -1, lo2}});
      break;
  }
  return out;
}

void FreeRegion::check_compact_in(const LogDomain& d) const {
  const Rational top = d.top();
  switch (kind) {
    case Kind::Empty: return;
    case Kind::Box:
      if (hi1 >= top || hi2 >= top)
        throw InvalidInput("free region " + describe() + " touches the boundary of " +
                           d.describe());
      return;
    case Kind::Sublevel: {
      // inf of g over the face {x1 = top} is its limit as x2 -> -inf
      for (int face = 0; face < 2; ++face) {
        bool bounded = false;
        Rational inf = 0;
        for (const auto& p : exhaustion->pieces()) {
          const Rational& other = face == 0 ? p.a2 : p.a1;
          const Rational& own = face == 0 ? p.a1 : p.a2;
          if (other != 0) continue;
          Rational v = own * top + p.c;
          if (!bounded || v > inf) inf = v;
          bounded = true;
        }
        if (!bounded || inf <= level)
          throw InvalidInput("free region " + describe() + " touches the boundary of " +
                             d.describe());
      }
      return;
    }
  }
}

std::string FreeRegion::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Empty: os << "empty"; break;
    case Kind::Sublevel: os << "{" << exhaustion->to_string() << " < " << level.get_d() << "}"; break;
    case Kind::Box:
      os << "{";
      if (has_lo1) os << lo1.get_d() << " < ";
      os << "x1 < " << hi1.get_d() << ", ";
      if (has_lo2) os << lo2.get_d() << " < ";
      os << "x2 < " << hi2.get_d() << "}";
      break;
  }
  return os.str();
}

namespace {

Rational ceil_q(const Rational& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(r);
}

// Constraint on (A1, A2, C): r1*A1 + r2*A2 + rc*C <= rhs.
struct Row {
  Rational r1, r2, rc, rhs;
  double d1, d2, dc, drhs;
};

Row make_row(Rational r1, Rational r2, Rational rc, Rational rhs) {
  Row r{std::move(r1), std::move(r2), std::move(rc), std::move(rhs), 0, 0, 0, 0};
  r.d1 = r.r1.get_d();
  r.d2 = r.r2.get_d();
  r.dc = r.rc.get_d();
  r.drhs = r.rhs.get_d();
  return r;
}

bool solve_exact(const Row& a, const Row& b, const Row& c, AffinePiece& out) {
  Rational det = a.r1 * (b.r2 * c.rc - b.rc * c.r2) - a.r2 * (b.r1 * c.rc - b.rc * c.r1) +
                 a.rc * (b.r1 * c.r2 - b.r2 * c.r1);
  if (det == 0) return false;
  auto d3 = [](const Rational& m11, const Rational& m12, const Rational& m13, const Rational& m21,
               const Rational& m22, const Rational& m23, const Rational& m31, const Rational& m32,
               const Rational& m33) {
    return Rational(m11 * (m22 * m33 - m23 * m32) - m12 * (m21 * m33 - m23 * m31) +
                    m13 * (m21 * m32 - m22 * m31));
  };
  out.a1 = d3(a.rhs, a.r2, a.rc, b.rhs, b.r2, b.rc, c.rhs, c.r2, c.rc) / det;
  out.a2 = d3(a.r1, a.rhs, a.rc, b.r1, b.rhs, b.rc, c.r1, c.rhs, c.rc) / det;
  out.c = d3(a.r1, a.r2, a.rhs, b.r1, b.r2, b.rhs, c.r1, c.r2, c.rhs) / det;
  return true;
}

}  // namespace

PLConvexFunction envelope_on_regions(const PLConvexFunction& f,
                                     const std::vector<ConvexRegion>& constraint) {
  const auto& P = f.pieces();
  const Rational top = f.domain().top();

  // Box large enough to hold every vertex of every (cell x region) polyhedron.
  std::vector<HalfPlane> lines;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = i + 1; j < P.size(); ++j)
      lines.push_back({P[i].a1 - P[j].a1, P[i].a2 - P[j].a2, P[i].c - P[j].c});
  for (const auto& region : constraint)
    for (const auto& hp : region) lines.push_back(hp);
  lines.push_back({1, 0, -top});
  lines.push_back({0, 1, -top});
  Rational far = f.truncation();
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& p = lines[i];
      const auto& q = lines[j];
      Rational det = p.a * q.b - p.b * q.a;
      if (det == 0) continue;
      Rational x = (p.b * q.c - p.c * q.b) / det, y = (p.c * q.a - p.a * q.c) / det;
      far = std::max(far, std::max(abs_q(x), abs_q(y)));
    }
  const Rational T = ceil_q(2 * far + 4);

  std::map<QPoint, Rational> support;  // constraint points and values of f
  std::set<std::array<Rational, 3>> recession;  // (d1, d2, a_i . d)
  for (const auto& region : constraint) {
    for (std::size_t i = 0; i < P.size(); ++i) {
      ConvexRegion hp = region;
      for (std::size_t j = 0; j < P.size(); ++j)
        if (j != i) hp.push_back({P[i].a1 - P[j].a1, P[i].a2 - P[j].a2, P[i].c - P[j].c});
      Polygon poly = box_polygon<Rational>(-T, -T, top, top);
      for (const auto& h : hp) {
        if (poly.empty()) break;
        poly = clip_halfplane<Rational>(poly, h.a, h.b, h.c);
      }
      if (poly.empty()) continue;
      for (const auto& v : poly.vertices) support.emplace(v, P[i].value(v));
      Polygon dirs{{{-1, 0}, {0, -1}}};
      for (const auto& h : hp) {
        if (dirs.empty()) break;
        dirs = clip_halfplane<Rational>(dirs, h.a, h.b, Rational(0));
      }
      for (const auto& d : dirs.vertices) recession.insert({d.x, d.y, P[i].a1 * d.x + P[i].a2 * d.y});
    }
  }
  if (support.empty()) throw InvalidInput("envelope: constraint set is empty");

  std::vector<Row> rows;
  for (const auto& [x, v] : support) rows.push_back(make_row(x.x, x.y, 1, v));
  const std::size_t nPoints = rows.size();
  rows.push_back(make_row(-1, 0, 0, 0));
  rows.push_back(make_row(0, -1, 0, 0));
  for (const auto& r : recession) rows.push_back(make_row(r[0], r[1], 0, r[2]));

  auto valid_double = [&rows](double A1, double A2, double C) {
    for (const auto& r : rows) {
      double lhs = r.d1 * A1 + r.d2 * A2 + r.dc * C;
      double tol = 1e-9 * (1 + std::abs(r.drhs) + std::abs(r.d1 * A1) + std::abs(r.d2 * A2) +
                           std::abs(r.dc * C));
      if (lhs > r.drhs + tol) return false;
    }
    return true;
  };
  auto valid_exact = [&rows](const AffinePiece& L) {
    for (const auto& r : rows)
      if (r.r1 * L.a1 + r.r2 * L.a2 + r.rc * L.c > r.rhs) return false;
    return true;
  };

  std::set<AffinePiece> found;
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < nPoints; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Row &a = rows[i], &b = rows[j], &c = rows[k];
        double det = a.d1 * (b.d2 * c.dc - b.dc * c.d2) - a.d2 * (b.d1 * c.dc - b.dc * c.d1) +
                     a.dc * (b.d1 * c.d2 - b.d2 * c.d1);
        double scale = (std::abs(a.d1) + std::abs(a.d2) + std::abs(a.dc)) *
                       (std::abs(b.d1) + std::abs(b.d2) + std::abs(b.dc)) *
                       (std::abs(c.d1) + std::abs(c.d2) + std::abs(c.dc));
        AffinePiece L;
        if (std::abs(det) <= 1e-10 * scale) {
          // nearly singular in floating point: decide exactly
          if (!solve_exact(a, b, c, L)) continue;
          if (valid_exact(L)) found.insert(L);
          continue;
        }
        auto d3 = [](double m11, double m12, double m13, double m21, double m22, double m23,
                     double m31, double m32, double m33) {
          return m11 * (m22 * m33 - m23 * m32) - m12 * (m21 * m33 - m23 * m31) +
                 m13 * (m21 * m32 - m22 * m31);
        };
        double A1 = d3(a.drhs, a.d2, a.dc, b.drhs, b.d2, b.dc, c.drhs, c.d2, c.dc) / det;
        double A2 = d3(a.d1, a.drhs, a.dc, b.d1, b.drhs, b.dc, c.d1, c.drhs, c.dc) / det;
        double C = d3(a.d1, a.d2, a.drhs, b.d1, b.d2, b.drhs, c.d1, c.d2, c.drhs) / det;
        if (!valid_double(A1, A2, C)) continue;
        if (solve_exact(a, b, c, L) && valid_exact(L)) found.insert(L);
      }
  if (found.empty()) throw NotConverged("envelope: no admissible supporting plane", 0);
  return PLConvexFunction(std::vector<AffinePiece>(found.begin(), found.end()), f.domain());
}

PLConvexFunction partial_convex_envelope(const PLConvexFunction& f, const FreeRegion& K) {
  K.check_compact_in(f.domain());
  if (K.kind == FreeRegion::Kind::Empty) return f;
  return envelope_on_regions(f, K.complement_pieces());
}

PLConvexFunction face_envelope(const PLConvexFunction& f) {
  const Rational top = f.domain().top();
  return envelope_on_regions(f, {{{1, 0, -top}}, {{0, 1, -top}}});
}

GridConvexFunction partial_convex_envelope(const GridConvexFunction& f, const FreeRegion& K,
                                           const GridEnvelopeOptions& opts,
                                           GridEnvelopeStats* stats) {
  if (f.domain.is_polydisc()) K.check_compact_in(f.domain);
  GridConvexFunction u = f;
  const int n1 = f.n1, n2 = f.n2;
  std::vector<char> free(u.values.size(), 0);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) free[u.index(i, j)] = K.contains(f.x1(i), f.x2(j));

  // Upper bound from chords along the axis lines (one-sided: monotone bound).
  const double inf = std::numeric_limits<double>::infinity();
  const double global = *std::max_element(f.values.begin(), f.values.end());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      if (!free[u.index(i, j)]) continue;
      double best = inf;
      for (int axis = 0; axis < 2; ++axis) {
        int lo = -1, hi = -1;
        int len = axis == 0 ? n1 : n2;
        int pos = axis == 0 ? i : j;
        auto idx = [&](int t) { return axis == 0 ? u.index(t, j) : u.index(i, t); };
        for (int t = pos - 1; t >= 0; --t)
          if (!free[idx(t)]) { lo = t; break; }
        for (int t = pos + 1; t < len; ++t)
          if (!free[idx(t)]) { hi = t; break; }
        if (hi < 0) continue;
        if (lo < 0) {
          best = std::min(best, f.values[idx(hi)]);
        } else {
          double w = double(pos - lo) / double(hi - lo);
          best = std::min(best, (1 - w) * f.values[idx(lo)] + w * f.values[idx(hi)]);
        }
      }
      u.at(i, j) = best == inf ? global : best;
    }

  // The stencil below only sees four directions; the lower hull of the lifted
  // lattice is the true convex minorant, so start from it and end with it.
  u = lower_convex_hull(u);
  static const int stencil[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  GridEnvelopeStats st;
  for (;;) {
    double change = 0;
    for (int colour = 0; colour < 4; ++colour) {
      for (int j = colour / 2; j < n2; j += 2)
        for (int i = colour % 2; i < n1; i += 2) {
          std::size_t k = u.index(i, j);
          if (!free[k]) continue;
          double v = u.values[k];
          double cand = v;
          if (i + 1 < n1) cand = std::min(cand, u.at(i + 1, j));
          if (j + 1 < n2) cand = std::min(cand, u.at(i, j + 1));
          for (const auto& s : stencil) {
            int ia = i - s[0], ja = j - s[1], ib = i + s[0], jb = j + s[1];
            if (ia < 0 || ib >= n1 || std::min(ja, jb) < 0 || std::max(ja, jb) >= n2) continue;
            cand = std::min(cand, 0.5 * (u.at(ia, ja) + u.at(ib, jb)));
          }
          if (cand < v) {
            change = std::max(change, v - cand);
            u.values[k] = cand;
          }
        }
    }
    ++st.sweeps;
    st.last_change = change;
    if (change < opts.tolerance) break;
    if (st.sweeps >= opts.max_sweeps) {
      if (stats) *stats = st;
      throw NotConverged("grid envelope iteration", change);
    }
  }
  if (stats) *stats = st;
  u = lower_convex_hull(u);
  u.refresh_slope_bound();
  return u;
}

}  // namespace cma
