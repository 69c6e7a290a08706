#pragma once

#include "cma/rational.hpp"

#include <algorithm>
#include <vector>

namespace cma {

template <class T>
struct Point2 {
  T x{};
  T y{};

  friend Point2 operator+(const Point2& a, const Point2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

using QPoint = Point2<Rational>;
using DPoint = Point2<double>;

template <class T>
T cross(const Point2<T>& o, const Point2<T>& a, const Point2<T>& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Convex polygon, vertices counterclockwise. Degenerate polygons (a point or
/// a segment) are allowed and have zero area.
template <class T>
struct ConvexPolygon {
  std::vector<Point2<T>> vertices;

  T area() const {
    T twice = T(0);
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = vertices[i];
      const auto& q = vertices[(i + 1) % n];
      twice += p.x * q.y - q.x * p.y;
    }
    return twice / T(2);
  }
  bool empty() const { return vertices.empty(); }
};

using Polygon = ConvexPolygon<Rational>;
using DPolygon = ConvexPolygon<double>;

/// Andrew's monotone chain; collinear points dropped.
template <class T>
ConvexPolygon<T> convex_hull(std::vector<Point2<T>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return {pts};
  std::vector<Point2<T>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= T(0)) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= T(0)) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) {
    // all collinear: keep the two extremes
    return {{pts.front(), pts.back()}};
  }
  return {hull};
}

/// Keeps the part of `poly` where a*x + b*y + c >= 0 (Sutherland-Hodgman for
/// one half-plane). `labels`, when given, tracks for each output edge the id
/// of the constraint that created it (edge i runs from vertex i to i+1).
template <class T>
ConvexPolygon<T> clip_halfplane(const ConvexPolygon<T>& poly, const T& a, const T& b, const T& c,
                                std::vector<int>* labels = nullptr, int id = -1) {
  ConvexPolygon<T> out;
  const std::size_t n = poly.vertices.size();
  if (n == 0) return out;
  auto side = [&](const Point2<T>& p) -> T { return a * p.x + b * p.y + c; };
  if (std::all_of(poly.vertices.begin(), poly.vertices.end(),
                  [&](const Point2<T>& p) { return side(p) >= T(0); }))
    return poly;
  std::vector<int> outLabels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = poly.vertices[i];
    const auto& q = poly.vertices[(i + 1) % n];
    T sp = side(p), sq = side(q);
    int edgeLabel = labels && !labels->empty() ? (*labels)[i] : -1;
    if (sp >= T(0)) {
      out.vertices.push_back(p);
      if (sq >= T(0)) {
        outLabels.push_back(edgeLabel);
      } else {
        T t = sp / (sp - sq);
        out.vertices.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        outLabels.push_back(edgeLabel);
        outLabels.push_back(id);
      }
    } else if (sq > T(0)) {
      T t = sp / (sp - sq);
      out.vertices.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      outLabels.push_back(edgeLabel);
    }
  }
  // remove consecutive duplicates produced by touching vertices
  if (out.vertices.size() > 1) {
    ConvexPolygon<T> dedup;
    std::vector<int> dedupLabels;
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
      const auto& p = out.vertices[i];
      const auto& q = out.vertices[(i + 1) % out.vertices.size()];
      if (p == q) continue;
      dedup.vertices.push_back(p);
      dedupLabels.push_back(outLabels[i]);
    }
    out = std::move(dedup);
    outLabels = std::move(dedupLabels);
  }
  if (labels) *labels = std::move(outLabels);
  return out;
}

template <class T>
ConvexPolygon<T> box_polygon(const T& x0, const T& y0, const T& x1, const T& y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

inline DPoint to_double(const QPoint& p) { return {p.x.get_d(), p.y.get_d()}; }

}  // namespace cma
