#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "cma/boundary.hpp"
#include "cma/envelope.hpp"
#include "cma/errors.hpp"
#include "cma/masolver.hpp"
#include "cma/monge_ampere.hpp"
#include "cma/random_pl.hpp"
#include "cma/scenario.hpp"
#include "cma/serialize.hpp"
#include "cma/sweep.hpp"
#include "cma/toric.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace cma;

TEST_CASE("ratio reduces so equal values compare equal") {
  CHECK(ratio(2, 10) == Rational(1, 5));
  CHECK(-2 * ratio(2, 20) == Rational(-1, 5));
  CHECK(ratio(-3, 6).get_den() == 2);
}

TEST_CASE("PL text round-trips and bad input is rejected") {
  PLConvexFunction f = parse_pl("max(2*x1, x2 - 1/2, 1/3*x1 + 1/4*x2, -1)");
  CHECK(f.size() == 4);
  CHECK(parse_pl(f.to_string()) == f);
  CHECK(f.value(QPoint{0, 0}) == 0);
  CHECK(f.value(QPoint{-1, -1}) == Rational(-7, 12));
  CHECK(parse_pl("x1 + x2").size() == 1);
  CHECK_THROWS_AS(parse_pl("max(-x1, x2)"), InvalidInput);
  CHECK_THROWS_AS(parse_pl("max(x1, x3)"), InvalidInput);
  CHECK_THROWS_AS(parse_pl("max(x1, x2"), InvalidInput);
  CHECK_THROWS_AS(parse_pl("max(1/0*x1)"), InvalidInput);
}

TEST_CASE("domains parse and print") {
  CHECK(parse_domain("bidisc").kind == LogDomain::Kind::Quadrant);
  LogDomain p = parse_domain("polydisc(1/4)");
  CHECK(p.top() == Rational(1, 4));
  CHECK(parse_domain(domain_spec(p)).top() == Rational(1, 4));
  CHECK(parse_domain("ball(2)").radius == doctest::Approx(2));
  CHECK_THROWS_AS(parse_domain("annulus"), InvalidInput);
}

TEST_CASE("JSON round-trips") {
  PLConvexFunction f = parse_pl("max(3/2*x1, x2, 1/7*x1 + 2/9*x2 - 5/11)");
  Json j = to_json(f);
  CHECK(j["format"] == "cma-pl");
  CHECK(pl_from_json(Json::parse(j.dump())) == f);

  ExactMeasure m = ma_pl(parse_pl("max(x1, x2, 1/3*x1 + 1/3*x2 - 1)"));
  ExactMeasure m2 = exact_measure_from_json(Json::parse(to_json(m).dump()));
  REQUIRE(m2.atoms.size() == m.atoms.size());
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    CHECK(m2.atoms[i].x == m.atoms[i].x);
    CHECK(m2.atoms[i].mass == m.atoms[i].mass);
  }
  CHECK(m2.pole_mass == m.pole_mass);

  LogMeasure lm = push_measure("product(sigma(1), discV(0.5)) + orbitAtom(0.5, 0.25, 2)");
  LogMeasure lm2 = log_measure_from_json(Json::parse(to_json(lm).dump()));
  CHECK(lm2.total_mass() == doctest::Approx(lm.total_mass()));
  CHECK(lm2.products.size() == lm.products.size());
  CHECK(lm2.atoms.size() == lm.atoms.size());

  Json bad = j;
  bad["format"] = "something-else";
  CHECK_THROWS_AS(pl_from_json(bad), InvalidInput);
  bad = j;
  bad["version"] = 99;
  CHECK_THROWS_AS(pl_from_json(bad), InvalidInput);
}

TEST_CASE("exact Monge-Ampere against hand computations") {
  // max(x1, x2): no kink vertex, pole 2 * area of the unit simplex
  ExactMeasure a = ma_pl(parse_pl("max(x1, x2)"));
  CHECK(a.atoms.empty());
  CHECK(a.pole_mass == 1);
  // max(x1, x2, -1): the simplex moves to the vertex (-1, -1)
  ExactMeasure b = ma_pl(parse_pl("max(x1, x2, -1)"));
  REQUIRE(b.atoms.size() == 1);
  CHECK(b.atoms[0].x == QPoint{-1, -1});
  CHECK(b.atoms[0].mass == 1);
  CHECK(b.pole_mass == 0);
  // max(2 x1, x2): pole 2 * area conv{0, (2,0), (0,1)}
  CHECK(ma_pl(parse_pl("max(2*x1, x2)")).pole_mass == 2);
}

TEST_CASE("total mass equals twice the slope hull area, random F") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    PLConvexFunction u = random_f_function(rng, 4, i % 2 == 0);
    CHECK(ma_pl(u).total_mass() == oracle::total_mass(u));
    for (const auto& p : u.pieces()) {
      CHECK(p.a1 >= 0);
      CHECK(p.a2 >= 0);
    }
  }
}

TEST_CASE("lattice lower hull against brute force") {
  // the hull value at a node is the least convex combination of samples that
  // reproduces the node; on a lattice it is attained on a triangle or segment
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 3; ++trial) {
    auto f = GridConvexFunction::sample(0, 6, 1, [&](double, double) { return U(rng); });
    auto L = lower_convex_hull(f);
    const int n = f.n1;
    for (int q = 0; q < n * n; ++q) {
      const double qx = q % n, qy = q / n;
      double best = f.values[q];
      for (int a = 0; a < n * n; ++a)
        for (int b = a + 1; b < n * n; ++b) {
          double ax = a % n, ay = a / n, bx = b % n, by = b / n;
          // segment
          double cr = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax);
          double dot = (qx - ax) * (bx - ax) + (qy - ay) * (by - ay), len = (bx - ax) * (bx - ax) + (by - ay) * (by - ay);
          if (cr == 0 && dot >= 0 && dot <= len) {
            double t = dot / len;
            best = std::min(best, (1 - t) * f.values[a] + t * f.values[b]);
          }
          for (int c = b + 1; c < n * n; ++c) {
            double cx = c % n, cy = c / n;
            double det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
            if (det == 0) continue;
            double s = ((qx - ax) * (cy - ay) - (qy - ay) * (cx - ax)) / det;
            double t = ((bx - ax) * (qy - ay) - (by - ay) * (qx - ax)) / det;
            if (s < 0 || t < 0 || s + t > 1) continue;
            best = std::min(best, (1 - s - t) * f.values[a] + s * f.values[b] + t * f.values[c]);
          }
        }
      CHECK(std::abs(L.values[q] - best) <= 1e-10);  // flips are decided with a 1e-12 slack
    }
  }
}

TEST_CASE("grid Monge-Ampere of a sampled PL function") {
  PLConvexFunction u = parse_pl("max(x1, x2, -1)");
  auto G = GridConvexFunction::sample(-2, 0, 1.0 / 8, [&](double a, double b) { return u.value(a, b); });
  GridMA m = ma_grid_nodes(G);
  CHECK(m.total_mass() == doctest::Approx(1).epsilon(1e-12));
  // the only interior node with mass is the kink vertex
  std::size_t at = G.index(8, 8);
  CHECK(G.x1(8) == -1);
  CHECK(m.node_mass[at] == doctest::Approx(1).epsilon(1e-12));
  CHECK(m.pole_mass == doctest::Approx(0).scale(1));
}

TEST_CASE("grid envelope matches the exact envelope") {
  PLConvexFunction u = parse_pl("max(2*x1, x2, 1/2*x1 + 1/2*x2 - 1/4)");
  FreeRegion K = FreeRegion::box(-2, ratio(-1, 2), -2, ratio(-1, 2));
  PLConvexFunction exact = partial_convex_envelope(u, K);
  auto G = GridConvexFunction::sample(-3, 0, 1.0 / 16, [&](double a, double b) { return u.value(a, b); });
  auto E = partial_convex_envelope(G, K);
  double err = 0;
  for (int j = 0; j < E.n2; ++j)
    for (int i = 0; i < E.n1; ++i) err = std::max(err, std::abs(E.at(i, j) - exact.value(E.x1(i), E.x2(j))));
  CHECK(err < 1e-9);
  CHECK(pl_less_equal(exact, u));
}

TEST_CASE("level-set split of max(u, r)") {
  PLConvexFunction u = parse_pl("max(x1, x2, 1/3*x1 + 1/3*x2 - 1)");
  for (int i = 1; i <= 10; ++i) {
    Rational r = -3 * ratio(i, 10);
    DemaillySplit s = demailly_split(u, r);
    CHECK(s.residual == 0);
    CHECK(s.off_level_mass == 0);
    CHECK(s.min_sphere_mass >= 0);
  }
}

TEST_CASE("Dirichlet solver reproduces the gauge cone") {
  for (double m : {1.0, 4.0}) {
    DirichletSolution sol = ma_dirichlet({{0, 0, m}}, DirichletDomain::square(1));
    CHECK(sol.residual < 1e-9);
    for (double x : {-0.75, -0.25, 0.0, 0.5})
      for (double y : {-0.5, 0.0, 0.25, 0.9})
        CHECK(sol.value(x, y) == doctest::Approx(oracle::gauge_cone(m, 1, x, y)).epsilon(1e-6));
  }
}

TEST_CASE("Dirichlet solver with two atoms") {
  // not a cone any more: Newton has to move the heights
  std::vector<Atom> target = {{-0.3, 0.1, 1.0}, {0.4, -0.2, 0.5}};
  DirichletSolution sol = ma_dirichlet(target, DirichletDomain::square(1));
  CHECK(sol.iterations > 0);
  CHECK(sol.residual < 1e-9);
  // the grid measure of the solution puts the mass back
  GridMA m = ma_grid_nodes(sol.to_grid(-1, 1, 1.0 / 64));
  CHECK(m.interior_mass() == doctest::Approx(1.5).epsilon(1e-6));  // corners carry the rest
  for (double x : {-1.0, 1.0})
    for (double y : {-1.0, -0.5, 0.0, 0.7, 1.0}) {
      CHECK(std::abs(sol.value(x, y)) < 1e-9);
      CHECK(std::abs(sol.value(y, x)) < 1e-9);
    }
}

TEST_CASE("peak functions against sigma x sigma") {
  ExactMeasure mu;
  mu.atoms.push_back({QPoint{0, 0}, 3});
  HenkinTable t = henkin_test(mu.to_log(), "peak", 12);
  for (std::size_t i = 0; i < t.k.size(); ++i) {
    double c = oracle::peak_circle_mean(t.k[i]);
    CHECK(t.value[i] == doctest::Approx(3 * c * c).epsilon(1e-12));
  }
  CHECK(t.decay_rate == doctest::Approx(std::log(4.0)).epsilon(1e-9));
  CHECK_THROWS_AS(henkin_test(mu.to_log(), "nope", 3), InvalidInput);
}

TEST_CASE("diagonal selection") {
  // gaps[k][j - 1]; the selected j are 1-based
  std::vector<std::vector<double>> gaps = {{0.5, 0.2, 0.1}, {0.3, 0.05, 0.01}, {0.4, 0.3, 0.2}};
  std::vector<double> tol = {0.25, 0.1, 0.05};
  std::vector<std::string> warn;
  auto js = diagonal_select(gaps, tol, &warn);
  REQUIRE(js.size() == 3);
  CHECK(js[0] == 2);
  CHECK(js[1] == 2);
  CHECK(js[2] == 3);  // budget exhausted
  CHECK(!warn.empty());
}

TEST_CASE("scenario configs") {
  CHECK(list_scenarios().size() >= 11);
  for (const auto& name : list_scenarios()) CHECK(validate_config(builtin_scenario(name)).empty());
  CHECK_THROWS_AS(builtin_scenario("no_such"), InvalidInput);

  try {
    parse_config("{\n  \"kind\": \"henkin\",\n  oops\n}");
    FAIL("expected a syntax error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  Json c = builtin_scenario("henkin_decay");
  c["kmax"] = "many";
  c["colour"] = 1;
  auto diags = validate_config(c);
  CHECK(diags.size() >= 2);
  bool sawField = false;
  for (const auto& d : diags) sawField = sawField || d.rfind("kmax:", 0) == 0;
  CHECK(sawField);
  CHECK(run_scenario(c).exit_code == kExitBadConfig);

  Json unknownCheck = builtin_scenario("henkin_decay");
  unknownCheck["checks"] = {"not_a_check"};
  CHECK(run_scenario(unknownCheck).exit_code == kExitBadConfig);

  Json failing = builtin_scenario("henkin_decay");
  failing["tolerance"] = -1.0;
  CHECK(run_scenario(failing).exit_code == kExitChecksFailed);
  failing["checks"] = Json::array();
  CHECK(run_scenario(failing).exit_code == kExitOk);

  Json solver = builtin_scenario("dirichlet_gauge");
  solver["atoms"] = {{0, 0, -1}};
  CHECK(validate_config(solver).size() == 1);
  CHECK(run_scenario(solver).exit_code == kExitBadConfig);
  solver["atoms"] = {{-0.3, 0.1, 1}, {0.4, -0.2, 0.5}, {0.1, 0.6, 2}};
  solver["max_iterations"] = 1;
  ScenarioResult sf = run_scenario(solver);
  CHECK(sf.exit_code == kExitSolverFailed);
  CHECK(sf.error.find("residual") != std::string::npos);
}

TEST_CASE("artifacts are written and deterministic") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "cma_unit_artifacts";
  fs::remove_all(dir);
  auto read = [](const fs::path& p) {
    std::ifstream is(p);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  ScenarioResult a = run_scenario(builtin_scenario("artifacts_only"));
  CHECK(a.exit_code == kExitOk);
  write_artifacts(a, dir / "a");
  write_artifacts(run_scenario(builtin_scenario("artifacts_only")), dir / "b");
  for (const char* f : {"report.json", "moments.csv", "measures.csv"}) {
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(read(dir / "a" / f) == read(dir / "b" / f));
  }
  CHECK(read(dir / "a" / "moments.csv").rfind("j,k,l,value\n", 0) == 0);
  CHECK(read(dir / "a" / "measures.csv").rfind("label,x1,x2,mass\n", 0) == 0);
  Json rep = Json::parse(read(dir / "a" / "report.json"));
  CHECK(rep["format"] == "cma-report");
  CHECK(rep["exit_code"] == 0);
  fs::remove_all(dir);
}
