#include "cma/grid_function.hpp"

#include "cma/errors.hpp"
#include "cma/pl_function.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace cma {

GridConvexFunction GridConvexFunction::sample(double lo, double hi, double h,
                                              const std::function<double(double, double)>& f,
                                              LogDomain domain) {
  if (!(h > 0) || !(hi > lo)) throw InvalidInput("grid needs h > 0 and a nonempty box");
  double cells = (hi - lo) / h;
  int n = int(std::llround(cells));
  if (std::abs(cells - n) > 1e-9 * std::max(1.0, cells))
    throw InvalidInput("grid box is not a whole number of cells");
  GridConvexFunction g;
  g.lo1 = g.lo2 = lo;
  g.h = h;
  g.n1 = g.n2 = n + 1;
  g.domain = std::move(domain);
  g.values.resize(std::size_t(g.n1) * g.n2);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) g.at(i, j) = f(g.x1(i), g.x2(j));
  g.refresh_slope_bound();
  return g;
}

GridConvexFunction GridConvexFunction::from_pl(const PLConvexFunction& f, double h) {
  double top = f.domain().top_d();
  double T = f.truncation().get_d();
  double cells = std::ceil((top + T) / h - 1e-9);
  LogDomain d = f.domain();
  d.truncation = f.truncation();
  return sample(top - cells * h, top, h, [&f](double a, double b) { return f.value(a, b); }, d);
}

double GridConvexFunction::value(double x1v, double x2v) const {
  double s = std::clamp((x1v - lo1) / h, 0.0, double(n1 - 1));
  double t = std::clamp((x2v - lo2) / h, 0.0, double(n2 - 1));
  int i = std::min(int(s), n1 - 2), j = std::min(int(t), n2 - 2);
  if (n1 < 2 || n2 < 2) return values.front();
  double fs = s - i, ft = t - j;
  double a = at(i, j), b = at(i + 1, j), c = at(i, j + 1), d = at(i + 1, j + 1);
  if (a + d <= b + c) {
    // diagonal a-d
    return fs >= ft ? a + fs * (b - a) + ft * (d - b) : a + ft * (c - a) + fs * (d - c);
  }
  // diagonal b-c
  return fs + ft <= 1 ? a + fs * (b - a) + ft * (c - a)
                      : d + (1 - fs) * (c - d) + (1 - ft) * (b - d);
}

double GridConvexFunction::convexity_defect() const {
  static const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  double worst = 0;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      for (const auto& d : dirs) {
        int ia = i - d[0], ja = j - d[1], ib = i + d[0], jb = j + d[1];
        if (ia < 0 || ib >= n1 || std::min(ja, jb) < 0 || std::max(ja, jb) >= n2) continue;
        worst = std::max(worst, at(i, j) - 0.5 * (at(ia, ja) + at(ib, jb)));
      }
    }
  }
  return worst;
}

double GridConvexFunction::monotonicity_defect() const {
  double worst = 0;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      if (i + 1 < n1) worst = std::max(worst, at(i, j) - at(i + 1, j));
      if (j + 1 < n2) worst = std::max(worst, at(i, j) - at(i, j + 1));
    }
  return worst;
}

double GridConvexFunction::sup_distance(const GridConvexFunction& other) const {
  if (other.n1 != n1 || other.n2 != n2) throw InvalidInput("grids have different shapes");
  double worst = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    worst = std::max(worst, std::abs(values[k] - other.values[k]));
  return worst;
}

double GridConvexFunction::sup_abs() const {
  double worst = 0;
  for (double v : values) worst = std::max(worst, std::abs(v));
  return worst;
}

void GridConvexFunction::refresh_slope_bound() {
  double s = 0;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      if (i + 1 < n1) s = std::max(s, std::abs(at(i + 1, j) - at(i, j)) / h);
      if (j + 1 < n2) s = std::max(s, std::abs(at(i, j + 1) - at(i, j)) / h);
    }
  slope_bound = s;
}

GridConvexFunction GridConvexFunction::max_with(double level) const {
  GridConvexFunction g = *this;
  for (double& v : g.values) v = std::max(v, level);
  return g;
}

void GridConvexFunction::write_csv(std::ostream& os) const {
  os << "x1,x2,value\n" << std::setprecision(17);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) os << x1(i) << ',' << x2(j) << ',' << at(i, j) << '\n';
}

GridConvexFunction GridConvexFunction::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x1,x2,value", 0) != 0)
    throw InvalidInput("grid csv: expected header 'x1,x2,value'");
  std::map<std::pair<double, double>, double> pts;
  int lineNo = 1;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream row(line);
    double a, b, v;
    char c1, c2;
    if (!(row >> a >> c1 >> b >> c2 >> v) || c1 != ',' || c2 != ',')
      throw InvalidInput("grid csv: malformed row at line " + std::to_string(lineNo));
    pts[{b, a}] = v;
  }
  if (pts.size() < 4) throw InvalidInput("grid csv: need at least a 2x2 lattice");
  std::vector<double> xs, ys;
  for (const auto& [key, v] : pts) {
    if (ys.empty() || key.first != ys.back()) ys.push_back(key.first);
    if (ys.size() == 1) xs.push_back(key.second);
  }
  GridConvexFunction g;
  g.n1 = int(xs.size());
  g.n2 = int(ys.size());
  if (std::size_t(g.n1) * g.n2 != pts.size()) throw InvalidInput("grid csv: not a full lattice");
  g.lo1 = xs.front();
  g.lo2 = ys.front();
  g.h = xs[1] - xs[0];
  g.values.reserve(pts.size());
  for (const auto& [key, v] : pts) g.values.push_back(v);
  g.refresh_slope_bound();
  return g;
}

GridConvexFunction ball_green_grid(double R, double T, double h) {
  double top = std::log(R);
  double cells = std::ceil((top + T) / h - 1e-9);
  return GridConvexFunction::sample(
      top - cells * h, top, h,
      [top](double a, double b) {
        double m = std::max(a, b);
        return m + 0.5 * std::log(std::exp(2 * (a - m)) + std::exp(2 * (b - m))) - top;
      },
      LogDomain::ball(R));
}

}  // namespace cma
