#include "cma/boundary.hpp"
#include "cma/envelope.hpp"
#include "cma/masolver.hpp"
#include "cma/monge_ampere.hpp"
#include "cma/random_pl.hpp"
#include "cma/serialize.hpp"
#include "cma/sweep.hpp"
#include "cma/toric.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace cma;

namespace {

GridConvexFunction sampled(int inv_h) {
  static const PLConvexFunction u = parse_pl("max(2*x1, x2, 1/2*x1 + 1/2*x2 - 1/4, -3)");
  return GridConvexFunction::sample(-3, 0, 1.0 / inv_h, [](double a, double b) { return u.value(a, b); });
}

void BM_ExactMA(benchmark::State& st) {
  std::mt19937_64 rng(1);
  std::vector<PLConvexFunction> fs;
  for (int i = 0; i < 64; ++i) fs.push_back(random_f_function(rng, int(st.range(0))));
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(ma_pl(fs[i++ % fs.size()]));
}
BENCHMARK(BM_ExactMA)->Arg(2)->Arg(6)->Arg(12);

void BM_ExactSweep(benchmark::State& st) {
  std::mt19937_64 rng(2);
  PLConvexFunction u = random_f_function(rng, 4, true);
  FreeRegion K = FreeRegion::box(-3, ratio(-1, 2), -3, ratio(-1, 2));
  for (auto _ : st) benchmark::DoNotOptimize(sweep_out(ToricFunction(u), K));
}
BENCHMARK(BM_ExactSweep);

void BM_GreenLogLevels(benchmark::State& st) {
  ToricFunction g = green_origin(1, 1, LogDomain::quadrant());
  auto sched = SweepSchedule::log_levels(g.pl(), int(st.range(0)), 1e-4);
  for (auto _ : st) benchmark::DoNotOptimize(boundary_measure(g, sched));
}
BENCHMARK(BM_GreenLogLevels)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GridMA(benchmark::State& st) {
  auto G = sampled(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(ma_grid_nodes(G));
  st.counters["nodes"] = double(G.values.size());
}
BENCHMARK(BM_GridMA)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LowerHull(benchmark::State& st) {
  auto G = sampled(int(st.range(0)));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(0, 1e-2);
  for (auto& v : G.values) v += noise(rng);
  for (auto _ : st) benchmark::DoNotOptimize(lower_convex_hull(G));
}
BENCHMARK(BM_LowerHull)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GridEnvelope(benchmark::State& st) {
  auto G = sampled(int(st.range(0)));
  FreeRegion K = FreeRegion::box(-3, ratio(-1, 2), -3, ratio(-1, 2));
  for (auto _ : st) benchmark::DoNotOptimize(partial_convex_envelope(G, K));
}
BENCHMARK(BM_GridEnvelope)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Dirichlet(benchmark::State& st) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-0.8, 0.8), mass(0.1, 1);
  std::vector<Atom> atoms;
  for (int i = 0; i < st.range(0); ++i) atoms.push_back({pos(rng), pos(rng), mass(rng)});
  for (auto _ : st) benchmark::DoNotOptimize(ma_dirichlet(atoms, DirichletDomain::square(1)));
}
BENCHMARK(BM_Dirichlet)->Arg(4)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
