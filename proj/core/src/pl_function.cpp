#include "cma/pl_function.hpp"

#include "cma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cma {

double AffinePiece::value(double x1, double x2) const {
  double v = c.get_d();
  double s1 = a1.get_d(), s2 = a2.get_d();
  if (s1 != 0) v += s1 * x1;
  if (s2 != 0) v += s2 * x2;
  return v;
}

namespace {

Rational ceil_q(const Rational& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(r);
}

// Point where the tie lines of (p,q) and (p,r) meet, if they are not parallel.
bool tie_point(const AffinePiece& p, const AffinePiece& q, const AffinePiece& r, QPoint& out) {
  Rational u1 = p.a1 - q.a1, u2 = p.a2 - q.a2, uc = q.c - p.c;
  Rational v1 = p.a1 - r.a1, v2 = p.a2 - r.a2, vc = r.c - p.c;
  Rational det = u1 * v2 - u2 * v1;
  if (det == 0) return false;
  out.x = (uc * v2 - u2 * vc) / det;
  out.y = (u1 * vc - uc * v1) / det;
  return true;
}

}  // namespace

Rational auto_truncation(const std::vector<AffinePiece>& pieces, const LogDomain& domain) {
  const Rational top = domain.top();
  Rational far = 0;
  auto bump = [&far](const Rational& v) {
    Rational a = abs_q(v);
    if (a > far) far = a;
  };
  const std::size_t n = pieces.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational d1 = pieces[i].a1 - pieces[j].a1, d2 = pieces[i].a2 - pieces[j].a2;
      Rational dc = pieces[j].c - pieces[i].c;
      // crossings with the faces x1 = top and x2 = top
      if (d2 != 0) bump((dc - d1 * top) / d2);
      if (d1 != 0) bump((dc - d2 * top) / d1);
      for (std::size_t k = j + 1; k < n; ++k) {
        QPoint x;
        if (tie_point(pieces[i], pieces[j], pieces[k], x)) {
          bump(x.x);
          bump(x.y);
        }
      }
    }
  }
  Rational t = ceil_q(2 * far + 4);
  if (domain.truncation > t) t = domain.truncation;
  return t;
}

PLConvexFunction::PLConvexFunction(std::vector<AffinePiece> pieces, LogDomain domain)
    : pieces_(std::move(pieces)), domain_(std::move(domain)) {
  if (!domain_.is_polydisc())
    throw InvalidInput("exact PL functions live on polydisc domains; the ball is grid-only");
  if (pieces_.empty()) throw InvalidInput("a PL function needs at least one piece");
  for (const auto& p : pieces_) {
    if (p.a1 < 0 || p.a2 < 0)
      throw InvalidInput("slope (" + p.a1.get_str() + ", " + p.a2.get_str() +
                         ") has a negative component; not plurisubharmonic across the axes");
  }
  canonicalize();
}

PLConvexFunction PLConvexFunction::constant(const Rational& c, LogDomain domain) {
  return PLConvexFunction({{0, 0, c}}, std::move(domain));
}

void PLConvexFunction::canonicalize() {
  for (auto& p : pieces_) {
    p.a1.canonicalize();
    p.a2.canonicalize();
    p.c.canonicalize();
  }
  std::sort(pieces_.begin(), pieces_.end());
  // one piece per slope: the sort puts the largest constant last
  std::vector<AffinePiece> merged;
  for (const auto& p : pieces_) {
    if (!merged.empty() && merged.back().a1 == p.a1 && merged.back().a2 == p.a2)
      merged.back() = p;
    else
      merged.push_back(p);
  }
  pieces_ = std::move(merged);
  truncation_ = auto_truncation(pieces_, domain_);
  if (pieces_.size() == 1) return;

  std::vector<AffinePiece> kept;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (cell(i).area() > 0) kept.push_back(pieces_[i]);
  }
  pieces_ = std::move(kept);
  truncation_ = auto_truncation(pieces_, domain_);
}

Polygon PLConvexFunction::cell(std::size_t i) const {
  const Rational top = domain_.top();
  Polygon poly = box_polygon<Rational>(-truncation_, -truncation_, top, top);
  const auto& p = pieces_[i];
  for (std::size_t j = 0; j < pieces_.size() && !poly.empty(); ++j) {
    if (j == i) continue;
    const auto& q = pieces_[j];
    poly = clip_halfplane<Rational>(poly, p.a1 - q.a1, p.a2 - q.a2, p.c - q.c);
  }
  return poly;
}

Rational PLConvexFunction::value(const QPoint& x) const {
  Rational best = pieces_.front().value(x);
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    Rational v = pieces_[i].value(x);
    if (v > best) best = v;
  }
  return best;
}

double PLConvexFunction::value(double x1, double x2) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) best = std::max(best, p.value(x1, x2));
  return best;
}

double PLConvexFunction::value_rho(double rho1, double rho2) const {
  const double ninf = -std::numeric_limits<double>::infinity();
  double x1 = rho1 > 0 ? std::log(rho1) : ninf;
  double x2 = rho2 > 0 ? std::log(rho2) : ninf;
  double best = ninf;
  for (const auto& p : pieces_) {
    if ((x1 == ninf && p.a1 > 0) || (x2 == ninf && p.a2 > 0)) continue;
    double v = p.c.get_d();
    if (p.a1 > 0) v += p.a1.get_d() * x1;
    if (p.a2 > 0) v += p.a2.get_d() * x2;
    best = std::max(best, v);
  }
  return best;
}

std::vector<std::size_t> PLConvexFunction::active(const QPoint& x) const {
  Rational best = value(x);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    if (pieces_[i].value(x) == best) idx.push_back(i);
  return idx;
}

PLConvexFunction PLConvexFunction::scaled(const Rational& factor) const {
  if (factor <= 0) throw InvalidInput("scale factor must be positive");
  std::vector<AffinePiece> out;
  for (const auto& p : pieces_) out.push_back({p.a1 * factor, p.a2 * factor, p.c * factor});
  return PLConvexFunction(std::move(out), domain_);
}

PLConvexFunction PLConvexFunction::plus(const PLConvexFunction& other) const {
  std::vector<AffinePiece> out;
  for (const auto& p : pieces_)
    for (const auto& q : other.pieces_) out.push_back({p.a1 + q.a1, p.a2 + q.a2, p.c + q.c});
  LogDomain d = domain_;
  d.truncation = std::max(truncation_, other.truncation_);
  return PLConvexFunction(std::move(out), d);
}

PLConvexFunction PLConvexFunction::plus_constant(const Rational& c) const {
  std::vector<AffinePiece> out = pieces_;
  for (auto& p : out) p.c += c;
  return PLConvexFunction(std::move(out), domain_);
}

PLConvexFunction PLConvexFunction::on_domain(const LogDomain& d) const {
  return PLConvexFunction(pieces_, d);
}

bool PLConvexFunction::bounded_below() const {
  return std::any_of(pieces_.begin(), pieces_.end(),
                     [](const AffinePiece& p) { return p.a1 == 0 && p.a2 == 0; });
}

std::string PLConvexFunction::to_string() const {
  auto term = [](const Rational& q, const char* var, bool& first, std::ostringstream& os) {
    if (q == 0) return;
    if (!first) os << (q > 0 ? " + " : " - ");
    else if (q < 0) os << "-";
    Rational a = abs_q(q);
    if (a != 1 || var[0] == '\0') {
      os << a.get_str();
      if (var[0] != '\0') os << "*";
    }
    os << var;
    first = false;
  };
  std::ostringstream os;
  if (pieces_.size() > 1) os << "max(";
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (i) os << ", ";
    bool first = true;
    term(pieces_[i].a1, "x1", first, os);
    term(pieces_[i].a2, "x2", first, os);
    term(pieces_[i].c, "", first, os);
    if (first) os << "0";
  }
  if (pieces_.size() > 1) os << ")";
  return os.str();
}

PLConvexFunction pl_max(const PLConvexFunction& f, const PLConvexFunction& g) {
  std::vector<AffinePiece> all = f.pieces();
  all.insert(all.end(), g.pieces().begin(), g.pieces().end());
  LogDomain d = f.domain();
  d.truncation = std::max(f.truncation(), g.truncation());
  return PLConvexFunction(std::move(all), d);
}

Polygon subdifferential(const PLConvexFunction& f, const QPoint& x) {
  std::vector<QPoint> slopes;
  for (auto i : f.active(x)) slopes.push_back(f.pieces()[i].slope());
  return convex_hull(std::move(slopes));
}

bool pl_less_equal(const PLConvexFunction& f, const PLConvexFunction& g) {
  Rational far = 4 * std::max(f.truncation(), g.truncation()) + 16;
  LogDomain d = g.domain();
  d.truncation = far;
  PLConvexFunction wide(g.pieces(), d);
  for (std::size_t i = 0; i < wide.size(); ++i) {
    for (const auto& v : wide.cell(i).vertices) {
      if (f.value(v) > wide.pieces()[i].value(v)) return false;
    }
  }
  return true;
}

}  // namespace cma
