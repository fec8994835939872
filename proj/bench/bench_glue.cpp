// Serial vs OpenMP gluing matrix on grid modules of increasing size.
#include <benchmark/benchmark.h>

#include "logff/fixtures.hpp"
#include "logff/transport.hpp"

using namespace logff;

namespace {

// range(0): p, range(1): n, range(2): d
NamedFixture fixture_for(const benchmark::State& state) {
  const auto p = static_cast<std::int64_t>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const int d = static_cast<int>(state.range(2));
  return grid_fixture(p, n, d, 1, 3, 4242, 0);
}

template <GlueMap (*Glue)(const FilteredModule&, const RingMap&, const RingMap&)>
void run(benchmark::State& state) {
  NamedFixture f = fixture_for(state);
  const RingMap& g1 = f.file.lifts[0].second.as_map();
  const RingMap& g2 = f.file.lifts[2].second.as_map();
  for (auto _ : state) {
    GlueMap g = Glue(f.file.module.filtered, g1, g2);
    benchmark::DoNotOptimize(g.G);
  }
}

GlueMap parallel(const FilteredModule& m, const RingMap& g1, const RingMap& g2) { return glue_map(m, g1, g2); }

void grid_args(benchmark::internal::Benchmark* b) {
  for (int p : {3, 5})
    for (int n : {1, 2, 3})
      for (int d : {1, 2}) b->Args({p, n, d});
}

}  // namespace

BENCHMARK(run<glue_map_serial>)->Name("glue_map_serial")->Apply(grid_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(run<parallel>)->Name("glue_map_openmp")->Apply(grid_args)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
