#include "cma/toric.hpp"

#include "cma/envelope.hpp"
#include "cma/errors.hpp"
#include "cma/monge_ampere.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cma {

std::string ClassFlags::to_string() const {
  auto show = [](const char* name, const std::optional<bool>& f, std::ostringstream& os) {
    os << name << '=' << (!f ? "unknown" : *f ? "yes" : "no") << ' ';
  };
  std::ostringstream os;
  show("E0", E0, os);
  show("F", F, os);
  show("Fa", Fa, os);
  show("N", N, os);
  show("M", M, os);
  show("bounded", bounded, os);
  std::string s = os.str();
  s.pop_back();
  return s;
}

ToricFunction::ToricFunction(PLConvexFunction f) : rep_(std::move(f)) {}

ToricFunction::ToricFunction(GridConvexFunction f, std::optional<PLConvexFunction> source)
    : rep_(std::move(f)), source_(std::move(source)) {}

const LogDomain& ToricFunction::domain() const {
  return is_pl() ? pl().domain() : grid().domain;
}

double ToricFunction::value(double x1, double x2) const {
  return is_pl() ? pl().value(x1, x2) : grid().value(x1, x2);
}

double ToricFunction::value_rho(double rho1, double rho2) const {
  if (is_pl()) return pl().value_rho(rho1, rho2);
  const auto& g = grid();
  double x1 = rho1 > 0 ? std::log(rho1) : g.lo1;
  double x2 = rho2 > 0 ? std::log(rho2) : g.lo2;
  return g.value(x1, x2);
}

LogMeasure ToricFunction::ma() const {
  return is_pl() ? ma_pl(pl()).to_log() : ma_grid(grid());
}

std::string ToricFunction::describe() const {
  if (is_pl()) return pl().to_string();
  const auto& g = grid();
  std::ostringstream os;
  os << "grid " << g.n1 << "x" << g.n2 << " h=" << g.h << " on " << g.domain.describe();
  return os.str();
}

namespace {

// Limit of f along the face {x_face = top} as the other coordinate -> -inf.
std::optional<Rational> face_limit(const PLConvexFunction& f, int face) {
  std::optional<Rational> best;
  const Rational top = f.domain().top();
  for (const auto& p : f.pieces()) {
    const Rational& other = face == 0 ? p.a2 : p.a1;
    const Rational& own = face == 0 ? p.a1 : p.a2;
    if (other != 0) continue;
    Rational v = own * top + p.c;
    if (!best || v > *best) best = v;
  }
  return best;
}

ClassFlags classify_pl(const PLConvexFunction& f) {
  ClassFlags flags;
  const Rational top = f.domain().top();
  bool zeroBoundary = f.value(QPoint{top, top}) == 0;
  for (int face = 0; face < 2 && zeroBoundary; ++face) {
    auto lim = face_limit(f, face);
    zeroBoundary = lim && *lim == 0;
  }
  ExactMeasure m = ma_pl(f);
  flags.bounded = f.bounded_below();
  flags.F = zeroBoundary;
  flags.M = m.interior_mass() == 0;
  flags.Fa = zeroBoundary && m.pole_mass == 0;
  flags.E0 = zeroBoundary && *flags.bounded;
  PLConvexFunction tilde = face_envelope(f);
  flags.N = tilde == PLConvexFunction::constant(0, f.domain());
  flags.notes.push_back("Fa tested by the toric surrogate: F and no mass at the pole");
  return flags;
}

ClassFlags classify_grid(const GridConvexFunction& g) {
  ClassFlags flags;
  const double tol = 1e-6;
  if (g.domain.is_polydisc() && std::abs(g.hi1() - g.domain.top_d()) < 1e-12 &&
      std::abs(g.hi2() - g.domain.top_d()) < 1e-12) {
    double face = 0;
    for (int i = 0; i < g.n1; ++i) face = std::max(face, std::abs(g.at(i, g.n2 - 1)));
    for (int j = 0; j < g.n2; ++j) face = std::max(face, std::abs(g.at(g.n1 - 1, j)));
    flags.F = face <= tol;
  } else if (g.domain.kind == LogDomain::Kind::BallLog) {
    // boundary of the ball in log coordinates: e^{2x1} + e^{2x2} = R^2
    double worst = 0;
    const double R = g.domain.radius;
    for (int i = 0; i < g.n1; ++i) {
      double r1 = std::exp(g.x1(i));
      if (r1 >= R) continue;
      double x2 = 0.5 * std::log(R * R - r1 * r1);
      if (x2 < g.lo2 || x2 > g.hi2()) continue;
      worst = std::max(worst, std::abs(g.value(g.x1(i), x2)));
    }
    flags.F = worst <= 10 * g.h;
    flags.notes.push_back("ball boundary values checked along the log-boundary curve at grid accuracy");
  }
  try {
    GridMA m = ma_grid_nodes(g);
    flags.M = m.total_mass() <= 1e-8;
    if (m.pole_mass > tol) flags.bounded = false;
    if (flags.F) flags.Fa = *flags.F && m.pole_mass <= tol;
    if (flags.F && flags.bounded) flags.E0 = *flags.F && *flags.bounded;
  } catch (const InvalidInput& e) {
    flags.notes.push_back(std::string("Monge-Ampere unavailable: ") + e.what());
  }
  if (flags.F && *flags.F) flags.N = true;
  flags.notes.push_back("Fa tested by the toric surrogate: F and no mass at the pole");
  return flags;
}

// ---- measure spec parser ----

class SpecParser {
 public:
  explicit SpecParser(const std::string& s) : s_(s) {}

  ToricMeasure parse() {
    ToricMeasure m = term();
    skip();
    while (peek() == '+') {
      ++pos_;
      m += term();
      skip();
    }
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("measure spec '" + s_ + "': " + what + " at column " +
                       std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(b, pos_ - b);
  }
  double number() {
    skip();
    if (s_.compare(pos_, 4, "exp(") == 0) {
      pos_ += 4;
      double v = std::exp(number());
      expect(')');
      return v;
    }
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                std::string("+-./eE^").find(s_[pos_]) != std::string::npos)) {
      // a '+' only belongs to the number right after an exponent marker
      if (s_[pos_] == '+' && (pos_ == b || (s_[pos_ - 1] != 'e' && s_[pos_ - 1] != 'E'))) break;
      ++pos_;
    }
    if (b == pos_) fail("expected a number");
    try {
      return parse_rational(s_.substr(b, pos_ - b)).get_d();
    } catch (const std::exception&) {
      pos_ = b;
      fail("malformed number");
    }
  }
  CoordLaw law() {
    std::string name = ident();
    expect('(');
    double r = number();
    expect(')');
    if (!(r > 0)) fail("radius must be positive");
    if (name == "sigma") return CoordLaw::circle(r);
    if (name == "discV") return CoordLaw::disc(r);
    fail("unknown coordinate law '" + name + "'");
  }
  ToricMeasure term() {
    double scale = 1;
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      scale = number();
      expect('*');
    }
    std::size_t start = pos_;
    std::string name = ident();
    ToricMeasure m;
    if (name == "zero") {
      return m;
    } else if (name == "orbitAtom") {
      expect('(');
      double r1 = number();
      expect(',');
      double r2 = number();
      expect(',');
      double mass = number();
      expect(')');
      if (!(r1 > 0 && r2 > 0)) fail("orbit radii must be positive");
      if (mass < 0) fail("negative mass");
      m.atoms.push_back({std::log(r1), std::log(r2), mass});
    } else if (name == "sigma") {
      expect('(');
      double r = number();
      expect(')');
      if (!(r > 0)) fail("radius must be positive");
      m.atoms.push_back({std::log(r), std::log(r), 1.0});
    } else if (name == "product") {
      expect('(');
      CoordLaw a = law();
      expect(',');
      CoordLaw b = law();
      double mass = 1;
      if (peek() == ',') {
        ++pos_;
        mass = number();
      }
      expect(')');
      if (mass < 0) fail("negative mass");
      if (a.kind == CoordLaw::Kind::Circle && b.kind == CoordLaw::Kind::Circle)
        m.atoms.push_back({std::log(a.radius), std::log(b.radius), mass});
      else
        m.products.push_back({a, b, mass});
    } else {
      pos_ = start;
      fail("unknown measure '" + name + "'");
    }
    if (scale < 0) fail("negative scale");
    return m.scaled(scale);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

ClassFlags classify(const ToricFunction& u) {
  return u.is_pl() ? classify_pl(u.pl()) : classify_grid(u.grid());
}

ToricMeasure push_measure(const std::string& spec) { return SpecParser(spec).parse(); }

double pull_integral(const ToricMeasure& m, const Integrand& phi) { return m.integrate(phi); }

ToricFunction green_origin(const Rational& a, const Rational& b, const LogDomain& domain,
                           double h, double truncation) {
  if (a <= 0 || b <= 0) throw InvalidInput("Green weights must be positive");
  if (domain.kind == LogDomain::Kind::BallLog) {
    if (a != 1 || b != 1) throw InvalidInput("weighted poles are supported on polydiscs only");
    return ToricFunction(ball_green_grid(domain.radius, truncation, h));
  }
  const Rational s = domain.top();
  return ToricFunction(PLConvexFunction({{a, 0, -a * s}, {0, b, -b * s}}, domain));
}

namespace {

struct RadialNode {
  double radius, weight;
};

std::vector<RadialNode> radial_nodes(const CoordLaw& law, int order) {
  if (law.kind == CoordLaw::Kind::Circle) return {{law.radius, 1.0}};
  const auto& q = Quadrature::gauss_legendre(order);
  std::vector<RadialNode> out;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double u = q.nodes[i];
    out.push_back({law.radius * u * u, q.weights[i] * 4 * u * u * u});
  }
  return out;
}

// Sorted samples of log|(r - rho e^{it}) / (1 - rho r e^{it})| over t.
std::vector<double> moebius_samples(double r, double rho, int n) {
  std::vector<double> out(n);
  for (int m = 0; m < n; ++m) {
    double t = 2 * std::numbers::pi * (m + 0.5) / n;
    double c = std::cos(t), s = std::sin(t);
    double num = (r - rho * c) * (r - rho * c) + rho * rho * s * s;
    double den = (1 - rho * r * c) * (1 - rho * r * c) + rho * rho * r * r * s * s;
    out[m] = 0.5 * std::log(num / den);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// mean of max(X_i, Y_j) over all pairs, both inputs sorted
double mean_max(const std::vector<double>& X, const std::vector<double>& Y) {
  double total = 0;
  std::size_t j = 0;
  for (double x : X) {
    while (j < Y.size() && Y[j] <= x) ++j;
    total += x * double(j);
  }
  std::size_t i = 0;
  for (double y : Y) {
    while (i < X.size() && X[i] < y) ++i;
    total += y * double(i);
  }
  return total / (double(X.size()) * double(Y.size()));
}

}  // namespace

ToricFunction potential(const ToricMeasure& nu, const PotentialOptions& opts) {
  struct Component {
    std::vector<RadialNode> first, second;
    double mass;
  };
  std::vector<Component> comps;
  for (const auto& a : nu.atoms) {
    if (a.x1 >= 0 || a.x2 >= 0) throw InvalidInput("potential: support touches the boundary");
    comps.push_back({{{std::exp(a.x1), 1.0}}, {{std::exp(a.x2), 1.0}}, a.mass});
  }
  for (const auto& p : nu.products) {
    if (p.first.radius >= 1 || p.second.radius >= 1)
      throw InvalidInput("potential: support touches the boundary");
    comps.push_back({radial_nodes(p.first, opts.radial_order),
                     radial_nodes(p.second, opts.radial_order), p.mass});
  }
  if (nu.pole_mass != 0) {
    comps.push_back({{{0.0, 1.0}}, {{0.0, 1.0}}, nu.pole_mass});
  }
  if (nu.boundary_mass != 0) throw InvalidInput("potential: measure has unlocated boundary mass");

  GridConvexFunction g = GridConvexFunction::sample(
      -opts.truncation, 0.0, opts.h, [](double, double) { return 0.0; }, LogDomain::quadrant());
  const int N = opts.angles;
  for (const auto& c : comps) {
    // per-axis sample tables, indexed [node][radial index]
    std::vector<std::vector<std::vector<double>>> X(g.n1), Y(g.n2);
    for (int i = 0; i < g.n1; ++i)
      for (const auto& rn : c.first) X[i].push_back(moebius_samples(std::exp(g.x1(i)), rn.radius, N));
    for (int j = 0; j < g.n2; ++j)
      for (const auto& rn : c.second) Y[j].push_back(moebius_samples(std::exp(g.x2(j)), rn.radius, N));
    for (int j = 0; j < g.n2; ++j)
      for (int i = 0; i < g.n1; ++i) {
        double v = 0;
        for (std::size_t a = 0; a < c.first.size(); ++a)
          for (std::size_t b = 0; b < c.second.size(); ++b)
            v += c.first[a].weight * c.second[b].weight * mean_max(X[i][a], Y[j][b]);
        g.at(i, j) += c.mass * v;
      }
  }
  g.refresh_slope_bound();
  return ToricFunction(std::move(g));
}

MajorantResult maximal_majorant(const PLConvexFunction& u, int J) {
  MajorantResult r{face_envelope(u), false, {}};
  r.is_zero = r.limit == PLConvexFunction::constant(0, u.domain());
  const Rational top = u.domain().top();
  const double T = u.truncation().get_d();
  for (int j = 1; j <= J; ++j) {
    Rational delta(1, 1);
    delta /= Rational(mpz_class(1) << j);
    PLConvexFunction uj = partial_convex_envelope(u, FreeRegion::lower_box(top - delta, top - delta));
    double gap = 0;
    for (int a = 0; a <= 40; ++a)
      for (int b = 0; b <= 40; ++b) {
        double x1 = top.get_d() - T * a / 40.0, x2 = top.get_d() - T * b / 40.0;
        gap = std::max(gap, std::abs(uj.value(x1, x2) - r.limit.value(x1, x2)));
      }
    r.sweep_gap.push_back(gap);
  }
  return r;
}

}  // namespace cma
