#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "vasc/centerline_map.hpp"
#include "vasc/init_field.hpp"
#include "vasc/network.hpp"
#include "vasc/rcr.hpp"

using namespace vasc;

namespace {

void BM_BuildNodeMap(benchmark::State& state) {
  const int slices = static_cast<int>(state.range(0));
  const double length = slices * 0.1;
  const auto mesh = testing::make_tube_mesh(1.0, length, 13, slices);
  const auto cl = testing::make_tube_centerline(1.0, length, slices / 4 + 2);
  for (auto _ : state) {
    auto map = build_node_map(cl, mesh);
    benchmark::DoNotOptimize(map.index.data());
  }
  state.counters["nodes"] = static_cast<double>(mesh.nodes.size());
}
BENCHMARK(BM_BuildNodeMap)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_InitialConditions(benchmark::State& state) {
  const auto mesh = testing::make_tube_mesh(1.0, 10.0, 8, 60);
  const auto cl = testing::make_tube_centerline(1.0, 10.0, 21, 80.0, 1.5);
  const auto map = build_node_map(cl, mesh);
  for (auto _ : state) {
    auto field = build_initial_conditions(mesh, map, cl);
    benchmark::DoNotOptimize(field.pressure.data());
  }
  state.counters["nodes"] = static_cast<double>(mesh.nodes.size());
}
BENCHMARK(BM_InitialConditions)->Unit(benchmark::kMillisecond);

void BM_Rk4Cycle(benchmark::State& state) {
  const RcrParameters p{0.1, 2.0, 0.9};
  const auto inflow = testing::make_pulsatile_inflow(1.0, 1.0);
  for (auto _ : state) {
    auto trace = simulate_rcr_rk4(p, inflow, 0.0, 1e-3, 1);
    benchmark::DoNotOptimize(trace.node_pressure[0].data());
  }
}
BENCHMARK(BM_Rk4Cycle)->Unit(benchmark::kMicrosecond);

void BM_SemianalyticCycle(benchmark::State& state) {
  const RcrParameters p{0.1, 2.0, 0.9};
  const auto inflow = testing::make_pulsatile_inflow(1.0, 1.0);
  for (auto _ : state) {
    auto series = rcr_pressure_semianalytic(p, inflow, 0.0, 1.0, 1e-3);
    benchmark::DoNotOptimize(series.data());
  }
}
BENCHMARK(BM_SemianalyticCycle)->Unit(benchmark::kMicrosecond);

void BM_GenAlphaCycle(benchmark::State& state) {
  const RcrParameters p{0.1, 2.0, 0.9};
  const auto inflow = testing::make_pulsatile_inflow(1.0, 1.0);
  const auto net = testing::make_rcr_network(p, inflow);
  for (auto _ : state) {
    auto trace = simulate_network(net, 1e-3, 1);
    benchmark::DoNotOptimize(trace.node_pressure[0].data());
  }
}
BENCHMARK(BM_GenAlphaCycle)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
