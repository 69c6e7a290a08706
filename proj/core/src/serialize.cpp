#include "cma/serialize.hpp"

#include "cma/errors.hpp"

#include <cctype>

namespace cma {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  /// Unsigned rational literal: digits, optional decimal part, optional /den.
  Rational number() {
    skip();
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
    };
    digits();
    if (pos_ == start) fail("expected a number");
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      std::size_t d = pos_;
      digits();
      if (pos_ == d) fail("expected a denominator");
    }
    return parse_rational(s_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput(what + " at column " + std::to_string(pos_ + 1) + " in '" + std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

AffinePiece parse_affine(Cursor& c) {
  AffinePiece p{0, 0, 0};
  bool first = true;
  for (;;) {
    int sign = 1;
    if (c.eat("+")) {
    } else if (c.eat("-")) {
      sign = -1;
    } else if (!first) {
      break;
    }
    Rational coef = 1;
    bool haveNumber = false;
    if (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.') {
      coef = c.number();
      haveNumber = true;
      if (!c.eat("*")) {
        p.c += sign * coef;
        first = false;
        continue;
      }
    }
    if (c.eat("x1")) p.a1 += sign * coef;
    else if (c.eat("x2")) p.a2 += sign * coef;
    else if (!haveNumber) c.fail("expected x1, x2 or a number");
    else c.fail("expected x1 or x2 after '*'");
    first = false;
  }
  return p;
}

std::string q(const Rational& r) { return to_fraction_string(r); }

Rational rq(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InvalidInput("expected a rational string 'num/den'");
}

}  // namespace

LogDomain parse_domain(std::string_view spec) {
  Cursor c(spec);
  LogDomain d;
  if (c.eat("bidisc")) {
    d = LogDomain::quadrant();
  } else if (c.eat("polydisc")) {
    c.expect("(");
    int sign = c.eat("-") ? -1 : 1;
    d = LogDomain::shifted(sign * c.number());
    c.expect(")");
  } else if (c.eat("ball")) {
    c.expect("(");
    d = LogDomain::ball(c.number().get_d());
    c.expect(")");
  } else {
    c.fail("unknown domain (bidisc | polydisc(s) | ball(R))");
  }
  if (!c.done()) c.fail("trailing input");
  return d;
}

std::string domain_spec(const LogDomain& d) {
  switch (d.kind) {
    case LogDomain::Kind::Quadrant: return "bidisc";
    case LogDomain::Kind::ShiftedQuadrant: return "polydisc(" + d.shift.get_str() + ")";
    case LogDomain::Kind::BallLog: return "ball(" + std::to_string(d.radius) + ")";
  }
  return "bidisc";
}

PLConvexFunction parse_pl(std::string_view spec, const LogDomain& domain) {
  Cursor c(spec);
  std::vector<AffinePiece> pieces;
  if (c.eat("max")) {
    c.expect("(");
    do {
      pieces.push_back(parse_affine(c));
    } while (c.eat(","));
    c.expect(")");
  } else {
    pieces.push_back(parse_affine(c));
  }
  if (!c.done()) c.fail("trailing input");
  for (const auto& p : pieces)
    if (p.a1 < 0 || p.a2 < 0) throw InvalidInput("negative slope in '" + std::string(spec) + "' (not psh on the polydisc)");
  return PLConvexFunction(std::move(pieces), domain);
}

void check_header(const Json& j, std::string_view format) {
  if (!j.is_object() || !j.contains("format") || j["format"] != std::string(format))
    throw InvalidInput("expected format '" + std::string(format) + "'");
  if (!j.contains("version") || j["version"] != kFormatVersion)
    throw InvalidInput("unsupported version for '" + std::string(format) + "'");
}

Json to_json(const LogDomain& d) {
  Json j;
  j["spec"] = domain_spec(d);
  if (d.truncation != 0) j["truncation"] = q(d.truncation);
  return j;
}

LogDomain domain_from_json(const Json& j) {
  LogDomain d = parse_domain(j.at("spec").get<std::string>());
  if (j.contains("truncation")) d.truncation = rq(j["truncation"]);
  return d;
}

Json to_json(const PLConvexFunction& f) {
  Json j;
  j["format"] = "cma-pl";
  j["version"] = kFormatVersion;
  j["domain"] = to_json(f.domain());
  Json pieces = Json::array();
  for (const auto& p : f.pieces()) pieces.push_back({q(p.a1), q(p.a2), q(p.c)});
  j["pieces"] = pieces;
  j["text"] = f.to_string();
  return j;
}

PLConvexFunction pl_from_json(const Json& j) {
  check_header(j, "cma-pl");
  std::vector<AffinePiece> pieces;
  for (const auto& p : j.at("pieces")) {
    if (!p.is_array() || p.size() != 3) throw InvalidInput("piece must be [a1, a2, c]");
    pieces.push_back({rq(p[0]), rq(p[1]), rq(p[2])});
  }
  return PLConvexFunction(std::move(pieces), domain_from_json(j.at("domain")));
}

Json to_json(const ExactMeasure& m) {
  Json j;
  j["format"] = "cma-exact-measure";
  j["version"] = kFormatVersion;
  Json atoms = Json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"x", {q(a.x.x), q(a.x.y)}}, {"mass", q(a.mass)}});
  j["atoms"] = atoms;
  j["pole"] = q(m.pole_mass);
  j["exterior"] = q(m.exterior_mass);
  return j;
}

ExactMeasure exact_measure_from_json(const Json& j) {
  check_header(j, "cma-exact-measure");
  ExactMeasure m;
  for (const auto& a : j.at("atoms")) m.atoms.push_back({{rq(a.at("x")[0]), rq(a.at("x")[1])}, rq(a.at("mass"))});
  m.pole_mass = rq(j.at("pole"));
  m.exterior_mass = rq(j.at("exterior"));
  return m;
}

namespace {
Json law_json(const CoordLaw& l) {
  return {{"kind", l.kind == CoordLaw::Kind::Circle ? "circle" : "disc"}, {"radius", l.radius}};
}
CoordLaw law_from(const Json& j) {
  std::string k = j.at("kind").get<std::string>();
  double r = j.at("radius").get<double>();
  if (k == "circle") return CoordLaw::circle(r);
  if (k == "disc") return CoordLaw::disc(r);
  throw InvalidInput("unknown law kind '" + k + "'");
}
}  // namespace

Json to_json(const LogMeasure& m) {
  Json j;
  j["format"] = "cma-measure";
  j["version"] = kFormatVersion;
  Json atoms = Json::array();
  for (const auto& a : m.atoms) atoms.push_back({a.x1, a.x2, a.mass});
  j["atoms"] = atoms;
  Json prods = Json::array();
  for (const auto& p : m.products)
    prods.push_back({{"first", law_json(p.first)}, {"second", law_json(p.second)}, {"mass", p.mass}});
  j["products"] = prods;
  j["pole"] = m.pole_mass;
  j["boundary"] = m.boundary_mass;
  return j;
}

LogMeasure log_measure_from_json(const Json& j) {
  check_header(j, "cma-measure");
  LogMeasure m;
  for (const auto& a : j.at("atoms")) m.atoms.push_back({a.at(0), a.at(1), a.at(2)});
  for (const auto& p : j.at("products"))
    m.products.push_back({law_from(p.at("first")), law_from(p.at("second")), p.at("mass").get<double>()});
  m.pole_mass = j.value("pole", 0.0);
  m.boundary_mass = j.value("boundary", 0.0);
  return m;
}

}  // namespace cma
