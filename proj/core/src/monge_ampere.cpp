#include "cma/monge_ampere.hpp"

#include "cma/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <cstdint>

namespace cma {

namespace {

bool tie_point(const AffinePiece& p, const AffinePiece& q, const AffinePiece& r, QPoint& out) {
  Rational u1 = p.a1 - q.a1, u2 = p.a2 - q.a2, uc = q.c - p.c;
  Rational v1 = p.a1 - r.a1, v2 = p.a2 - r.a2, vc = r.c - p.c;
  Rational det = u1 * v2 - u2 * v1;
  if (det == 0) return false;
  out.x = (uc * v2 - u2 * vc) / det;
  out.y = (u1 * vc - uc * v1) / det;
  return true;
}

template <class T>
T hull_area(std::vector<Point2<T>> pts) {
  if (pts.size() < 3) return T(0);
  return convex_hull(std::move(pts)).area();
}

}  // namespace

std::vector<ExactAtom> kink_atoms(const PLConvexFunction& f) {
  const auto& P = f.pieces();
  std::set<QPoint> vertices;
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = i + 1; j < P.size(); ++j)
      for (std::size_t k = j + 1; k < P.size(); ++k) {
        QPoint x;
        if (!tie_point(P[i], P[j], P[k], x)) continue;
        if (f.value(x) == P[i].value(x)) vertices.insert(x);
      }
  std::vector<ExactAtom> out;
  for (const auto& x : vertices) {
    Rational mass = 2 * subdifferential(f, x).area();
    if (mass != 0) out.push_back({x, mass});
  }
  return out;
}

Rational pole_mass(const PLConvexFunction& f) {
  std::vector<QPoint> slopes;
  for (const auto& p : f.pieces()) slopes.push_back(p.slope());
  Rational body = hull_area(slopes);
  slopes.push_back({0, 0});
  return 2 * (hull_area(slopes) - body);
}

ExactMeasure ma_pl(const PLConvexFunction& f) {
  ExactMeasure m;
  const Rational top = f.domain().top();
  for (auto& a : kink_atoms(f)) {
    if (a.x.x > top || a.x.y > top)
      m.exterior_mass += a.mass;
    else
      m.atoms.push_back(std::move(a));
  }
  m.pole_mass = pole_mass(f);
  return m;
}

double GridMA::interior_mass() const {
  double s = 0;
  for (double v : node_mass) s += v;
  return s;
}

namespace {

// Triangulation of the lattice lifted by the grid values, flipped to the lower
// convex hull. Triangle t has vertices v[3] (counterclockwise in the plane) and
// nbr[k] = triangle across the edge opposite v[k] (-1 on the lattice boundary).
struct LiftedMesh {
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nbr;
  };
  std::vector<Tri> tris;
  int n1;
  std::vector<double> zs;  // lifted heights, possibly lowered onto the hull
  const std::vector<double>* z = &zs;

  int ix(int v) const { return v % n1; }
  int iy(int v) const { return v / n1; }
  long orient(int a, int b, int c) const {
    return long(ix(b) - ix(a)) * (iy(c) - iy(a)) - long(iy(b) - iy(a)) * (ix(c) - ix(a));
  }
  // height of the plane through lifted a,b,c at the planar point d, minus z_d
  double above(int a, int b, int c, int d) const {
    double det = double(orient(a, b, c));
    double s = double(orient(a, d, c)) / det;  // barycentric weight of b
    double t = double(orient(a, b, d)) / det;   // barycentric weight of c
    const auto& Z = *z;
    return Z[a] + s * (Z[b] - Z[a]) + t * (Z[c] - Z[a]) - Z[d];
  }
};

int find_slot(const LiftedMesh::Tri& t, int vertex) {
  for (int k = 0; k < 3; ++k)
    if (t.v[k] == vertex) return k;
  return -1;
}

void set_neighbour(LiftedMesh& m, int t, int oldN, int newN) {
  if (t < 0) return;
  for (int k = 0; k < 3; ++k)
    if (m.tris[t].nbr[k] == oldN) {
      m.tris[t].nbr[k] = newN;
      return;
    }
}

// Triangles containing `vertex`, found by walking across the edges through it.
// Triangles containing `vertex`, found by walking across the edges through it.
void star(const LiftedMesh& m, int t0, int vertex, std::vector<int>& out) {
  out.clear();
  std::vector<int> todo{t0};
  while (!todo.empty()) {
    int t = todo.back();
    todo.pop_back();
    if (t < 0 || std::find(out.begin(), out.end(), t) != out.end()) continue;
    int k = find_slot(m.tris[t], vertex);
    if (k < 0) continue;
    out.push_back(t);
    todo.push_back(m.tris[t].nbr[(k + 1) % 3]);
    todo.push_back(m.tris[t].nbr[(k + 2) % 3]);
  }
}

// Drops vertex r (known to lie above the lower hull) from the triangulation:
// its closed star is retriangulated by ear clipping and the new edges are
// queued for flipping. Returns false (mesh untouched) for a star that is not
// closed, i.e. r on the lattice boundary.
bool remove_vertex(LiftedMesh& m, int t0, int r, std::vector<std::pair<int, int>>& stack,
                   int& hint) {
  std::vector<int> ring, fan, outer;
  int t = t0;
  do {
    int k = find_slot(m.tris[t], r);
    ring.push_back(m.tris[t].v[(k + 1) % 3]);
    fan.push_back(t);
    outer.push_back(m.tris[t].nbr[k]);
    t = m.tris[t].nbr[(k + 1) % 3];  // across edge (r, next ring vertex)
    if (t < 0 || fan.size() > m.tris.size()) return false;
  } while (t != t0);
  const int n = int(ring.size());
  if (n < 3) return false;

  // ear clipping on indices into ring; edges of the ring keep their outer ids
  std::vector<int> poly(n);
  for (int i = 0; i < n; ++i) poly[i] = i;
  std::vector<std::array<int, 3>> made;
  while (poly.size() > 3) {
    const int s = int(poly.size());
    bool clipped = false;
    for (int q = 0; q < s && !clipped; ++q) {
      int a = ring[poly[(q + s - 1) % s]], b = ring[poly[q]], c = ring[poly[(q + 1) % s]];
      if (m.orient(a, b, c) <= 0) continue;
      bool blocked = false;
      for (int w = 0; w < s && !blocked; ++w) {
        int p = ring[poly[w]];
        if (p == a || p == b || p == c) continue;
        blocked = m.orient(a, b, p) >= 0 && m.orient(b, c, p) >= 0 && m.orient(c, a, p) >= 0;
      }
      if (blocked) continue;
      made.push_back({poly[(q + s - 1) % s], poly[q], poly[(q + 1) % s]});
      poly.erase(poly.begin() + q);
      clipped = true;
    }
    if (!clipped) return false;
  }
  if (m.orient(ring[poly[0]], ring[poly[1]], ring[poly[2]]) <= 0) return false;
  made.push_back({poly[0], poly[1], poly[2]});

  // commit: new triangles take the first n - 2 fan slots, the last two die
  std::map<std::pair<int, int>, std::pair<int, int>> open;  // directed edge -> (tri, slot)
  for (std::size_t e = 0; e < made.size(); ++e) {
    int id = fan[e];
    auto& tri = m.tris[id];
    for (int k = 0; k < 3; ++k) tri.v[k] = ring[made[e][k]];
    for (int k = 0; k < 3; ++k) {
      int ia = made[e][(k + 1) % 3], ib = made[e][(k + 2) % 3];  // edge opposite slot k
      if ((ia + 1) % n == ib) {
        int o = outer[ia];
        tri.nbr[k] = o;
        if (o >= 0) {
          auto& ot = m.tris[o];
          for (int q = 0; q < 3; ++q)
            if (ot.v[q] != ring[ia] && ot.v[q] != ring[ib]) ot.nbr[q] = id;
        }
      } else {
        auto it = open.find({ib, ia});
        if (it != open.end()) {
          tri.nbr[k] = it->second.first;
          m.tris[it->second.first].nbr[it->second.second] = id;
          open.erase(it);
        } else {
          open[{ia, ib}] = {id, k};
        }
      }
      stack.push_back({id, k});
    }
  }
  for (std::size_t e = made.size(); e < fan.size(); ++e) m.tris[fan[e]].v = {-1, -1, -1};
  hint = fan[0];
  return true;
}

// Lawson flips toward the lower convex hull of the lifted lattice. A flip that
// is blocked by a reflex vertex of the quad means that vertex lies above the
// hull: it is dropped from the triangulation and later gets the hull value.
// Lattice boundary vertices cannot be dropped; they are lowered onto the plane
// of the other three instead, at most `slack` in total per node.
LiftedMesh lower_hull_mesh(const GridConvexFunction& f, double slack) {
  LiftedMesh m;
  m.n1 = f.n1;
  m.zs = f.values;
  std::vector<double> lowered(f.values.size(), 0.0);
  std::vector<int> around, hint(f.values.size(), -1);
  const int s1 = f.n1 - 1, s2 = f.n2 - 1;
  m.tris.resize(std::size_t(2) * s1 * s2);
  auto node = [&f](int i, int j) { return j * f.n1 + i; };
  // square (i,j) -> triangles 2s (lower-right) and 2s+1 (upper-left), diagonal a-d
  for (int j = 0; j < s2; ++j)
    for (int i = 0; i < s1; ++i) {
      int s = j * s1 + i;
      int a = node(i, j), b = node(i + 1, j), c = node(i, j + 1), d = node(i + 1, j + 1);
      int lowerRight = 2 * s, upperLeft = 2 * s + 1;
      int below = j > 0 ? 2 * ((j - 1) * s1 + i) + 1 : -1;
      int right = i + 1 < s1 ? 2 * (j * s1 + i + 1) + 1 : -1;
      int left = i > 0 ? 2 * (j * s1 + i - 1) : -1;
      int above = j + 1 < s2 ? 2 * ((j + 1) * s1 + i) : -1;
      // (a, b, d): opposite a is edge b-d (right), opposite b is d-a (diagonal), opposite d is a-b (below)
      m.tris[lowerRight] = {{a, b, d}, {right, upperLeft, below}};
      // (a, d, c): opposite a is d-c (above), opposite d is c-a (left), opposite c is a-d (diagonal)
      m.tris[upperLeft] = {{a, d, c}, {above, left, lowerRight}};
    }

  std::vector<std::pair<int, int>> stack;
  for (int t = 0; t < int(m.tris.size()); ++t)
    for (int k = 0; k < 3; ++k)
      if (m.tris[t].nbr[k] > t) stack.push_back({t, k});
  const double eps = 1e-12;
  while (!stack.empty()) {
    auto [t, k] = stack.back();
    stack.pop_back();
    if (m.tris[t].v[0] < 0) continue;
    int u = m.tris[t].nbr[k];
    if (u < 0) continue;
    // rotate t to (b, c, a) with b opposite the edge
    int b = m.tris[t].v[k], c = m.tris[t].v[(k + 1) % 3], a = m.tris[t].v[(k + 2) % 3];
    int nab = m.tris[t].nbr[(k + 1) % 3], nbc = m.tris[t].nbr[(k + 2) % 3];
    int ku = -1;
    for (int q = 0; q < 3; ++q)
      if (m.tris[u].nbr[q] == t) ku = q;
    if (ku < 0) continue;
    int d = m.tris[u].v[ku];
    if (m.tris[u].v[(ku + 1) % 3] != a) continue;  // inconsistent orientation: skip
    int ncd = m.tris[u].nbr[(ku + 1) % 3], nda = m.tris[u].nbr[(ku + 2) % 3];
    double scale = 1 + std::abs(m.zs[a]) + std::abs(m.zs[d]);
    if (m.above(a, b, c, d) <= eps * scale) continue;  // locally convex (d not below plane abc)
    if (m.orient(b, c, d) <= 0 || m.orient(d, a, b) <= 0) {
      // c (or a) lies in the planar triangle of the other three, above its plane
      int r = m.orient(b, c, d) <= 0 ? c : a;
      int p = r == c ? a : c;
      if (m.orient(b, d, p) == 0) continue;
      double drop = m.above(b, d, p, r);
      if (drop >= -eps * scale) continue;
      if (remove_vertex(m, t, r, stack, hint[r])) continue;
      if (lowered[r] - drop > slack) continue;
      m.zs[r] += drop;
      lowered[r] -= drop;
      star(m, t, r, around);
      for (int w : around) stack.push_back({w, find_slot(m.tris[w], r)});
      stack.push_back({t, k});
      continue;
    }
    m.tris[t] = {{b, c, d}, {ncd, u, nbc}};
    m.tris[u] = {{d, a, b}, {nab, t, nda}};
    set_neighbour(m, ncd, u, t);
    set_neighbour(m, nab, t, u);
    stack.push_back({t, 0});
    stack.push_back({t, 2});
    stack.push_back({u, 0});
    stack.push_back({u, 2});
  }

  // dropped vertices take the value of the hull facet above which they sat
  std::uint64_t walkState = 0x9e3779b97f4a7c15ull;
  for (std::size_t r = 0; r < hint.size(); ++r) {
    if (hint[r] < 0) continue;
    int t = hint[r];
    while (m.tris[t].v[0] < 0) t = (t + 1) % int(m.tris.size());  // slot died: any live start works
    for (long steps = 0;; ++steps) {
      const auto& tri = m.tris[t];
      walkState = walkState * 6364136223846793005ull + 1442695040888963407ull;
      int start = int((walkState >> 33) % 3), next = -1;
      for (int q = 0; q < 3 && next < 0; ++q) {
        int k = (start + q) % 3;
        if (tri.nbr[k] >= 0 && m.orient(tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], int(r)) < 0)
          next = tri.nbr[k];
      }
      if (next < 0) break;
      t = next;
      if (steps > long(m.tris.size())) throw NotConverged("lower hull point location", double(steps));
    }
    const auto& v = m.tris[t].v;
    double det = double(m.orient(v[0], v[1], v[2]));
    double w1 = double(m.orient(v[0], int(r), v[2])) / det;
    double w2 = double(m.orient(v[0], v[1], int(r))) / det;
    m.zs[r] = m.zs[v[0]] + w1 * (m.zs[v[1]] - m.zs[v[0]]) + w2 * (m.zs[v[2]] - m.zs[v[0]]);
  }
  return m;
}

}  // namespace

GridMA ma_grid_nodes(const GridConvexFunction& f, double eps_conv) {
  if (f.n1 < 3 || f.n2 < 3) throw InvalidInput("ma_grid needs at least a 3x3 lattice");
  double defect = f.convexity_defect();
  if (defect > eps_conv)
    throw InvalidInput("grid function is not discretely convex (defect " + std::to_string(defect) +
                       ")");
  LiftedMesh mesh = lower_hull_mesh(f, eps_conv);
  const double h = f.h;
  const std::size_t nNodes = f.values.size();
  std::vector<DPoint> grad;
  std::vector<int> count(nNodes + 1, 0);
  std::erase_if(mesh.tris, [](const LiftedMesh::Tri& t) { return t.v[0] < 0; });
  grad.resize(mesh.tris.size());
  for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
    const auto& v = mesh.tris[t].v;
    double det = double(mesh.orient(v[0], v[1], v[2]));
    double e1x = mesh.ix(v[1]) - mesh.ix(v[0]), e1y = mesh.iy(v[1]) - mesh.iy(v[0]);
    double e2x = mesh.ix(v[2]) - mesh.ix(v[0]), e2y = mesh.iy(v[2]) - mesh.iy(v[0]);
    double dz1 = mesh.zs[v[1]] - mesh.zs[v[0]], dz2 = mesh.zs[v[2]] - mesh.zs[v[0]];
    grad[t] = {(dz1 * e2y - dz2 * e1y) / det / h, (e1x * dz2 - e2x * dz1) / det / h};
    for (int q : v) ++count[q + 1];
  }
  for (std::size_t q = 0; q < nNodes; ++q) count[q + 1] += count[q];
  std::vector<int> incident(count[nNodes]);
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (std::size_t t = 0; t < mesh.tris.size(); ++t)
    for (int q : mesh.tris[t].v) incident[fill[q]++] = int(t);

  GridMA out;
  out.node_mass.assign(nNodes, 0.0);
  std::vector<DPoint> local;
  for (int j = 1; j < f.n2 - 1; ++j)
    for (int i = 1; i < f.n1 - 1; ++i) {
      std::size_t q = f.index(i, j);
      local.clear();
      for (int k = count[q]; k < count[q + 1]; ++k) local.push_back(grad[incident[k]]);
      out.node_mass[q] = 2 * hull_area(local);
    }
  std::vector<DPoint> all = grad;
  double body = hull_area(all);
  all.push_back({0, 0});
  double withOrigin = hull_area(all);
  out.pole_mass = 2 * (withOrigin - body);
  out.boundary_mass = std::max(0.0, 2 * body - out.interior_mass());
  return out;
}

GridConvexFunction lower_convex_hull(const GridConvexFunction& f) {
  if (f.n1 < 2 || f.n2 < 2) return f;
  GridConvexFunction start = f;
  // Lowering propagates slowly over long distances. The hull of the even
  // sublattice, interpolated, lies above the hull of f (any average of its
  // values does), so min(f, that) has the same hull and is already close.
  if (f.n1 >= 33 && f.n2 >= 33 && f.n1 % 2 == 1 && f.n2 % 2 == 1) {
    GridConvexFunction coarse = f;
    coarse.n1 = (f.n1 + 1) / 2;
    coarse.n2 = (f.n2 + 1) / 2;
    coarse.h = 2 * f.h;
    coarse.values.resize(std::size_t(coarse.n1) * coarse.n2);
    for (int j = 0; j < coarse.n2; ++j)
      for (int i = 0; i < coarse.n1; ++i) coarse.at(i, j) = f.at(2 * i, 2 * j);
    GridConvexFunction ch = lower_convex_hull(coarse);
    for (int j = 0; j < f.n2; ++j)
      for (int i = 0; i < f.n1; ++i) {
        int i0 = i / 2, j0 = j / 2, i1 = (i + 1) / 2, j1 = (j + 1) / 2;
        double v = 0.25 * (ch.at(i0, j0) + ch.at(i1, j0) + ch.at(i0, j1) + ch.at(i1, j1));
        start.at(i, j) = std::min(f.at(i, j), v);
      }
  }
  // Boundary nodes cannot leave the triangulation and would only creep down;
  // on the four sides the hull is the 1D lower hull of that side.
  auto side = [&start](int first, int stride, int n) {
    std::vector<int> h;  // hull vertices by position
    auto z = [&](int i) { return start.values[std::size_t(first) + std::size_t(i) * stride]; };
    for (int i = 0; i < n; ++i) {
      while (h.size() >= 2) {
        int a = h[h.size() - 2], b = h.back();
        // drop b when it is not below the chord a-i
        if ((z(b) - z(a)) * (i - a) >= (z(i) - z(a)) * (b - a)) h.pop_back();
        else break;
      }
      h.push_back(i);
    }
    for (std::size_t k = 0; k + 1 < h.size(); ++k)
      for (int i = h[k] + 1; i < h[k + 1]; ++i)
        start.values[std::size_t(first) + std::size_t(i) * stride] =
            z(h[k]) + (z(h[k + 1]) - z(h[k])) * double(i - h[k]) / double(h[k + 1] - h[k]);
  };
  side(0, 1, f.n1);
  side(int(f.index(0, f.n2 - 1)), 1, f.n1);
  side(0, f.n1, f.n2);
  side(f.n1 - 1, f.n1, f.n2);
  GridConvexFunction out = f;
  out.values = lower_hull_mesh(start, std::numeric_limits<double>::infinity()).zs;
  return out;
}

LogMeasure to_measure(const GridConvexFunction& f, const GridMA& m, double min_mass) {
  LogMeasure out;
  for (int j = 0; j < f.n2; ++j)
    for (int i = 0; i < f.n1; ++i) {
      double w = m.node_mass[f.index(i, j)];
      if (std::abs(w) > min_mass) out.atoms.push_back({f.x1(i), f.x2(j), w});
    }
  out.pole_mass = m.pole_mass;
  out.boundary_mass = m.boundary_mass;
  return out;
}

LogMeasure ma_grid(const GridConvexFunction& f, double eps_conv) {
  return to_measure(f, ma_grid_nodes(f, eps_conv));
}

GridMA ma_mixed(const GridConvexFunction& u, const GridConvexFunction& h, double* worst_negative) {
  if (u.n1 != h.n1 || u.n2 != h.n2 || u.lo1 != h.lo1 || u.lo2 != h.lo2 || u.h != h.h)
    throw InvalidInput("mixed measure needs both functions on the same lattice");
  GridConvexFunction sum = u;
  for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] += h.values[k];
  GridMA a = ma_grid_nodes(sum), b = ma_grid_nodes(u), c = ma_grid_nodes(h);
  GridMA out;
  out.node_mass.resize(a.node_mass.size());
  double worst = 0;
  for (std::size_t k = 0; k < out.node_mass.size(); ++k) {
    out.node_mass[k] = 0.5 * (a.node_mass[k] - b.node_mass[k] - c.node_mass[k]);
    worst = std::min(worst, out.node_mass[k]);
  }
  out.pole_mass = 0.5 * (a.pole_mass - b.pole_mass - c.pole_mass);
  out.boundary_mass = 0.5 * (a.boundary_mass - b.boundary_mass - c.boundary_mass);
  if (worst_negative) *worst_negative = worst;
  return out;
}

}  // namespace cma
