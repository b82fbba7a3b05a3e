// Microbenchmarks for the hot paths: closure edge updates, cycle
// queries, reduction rebuilds, and end-to-end request service.
// Not part of the test suite; run the binary directly.
#include <benchmark/benchmark.h>

#include <optional>
#include <random>
#include <vector>

#include "icd/closure.hpp"
#include "icd/generate.hpp"
#include "icd/graph.hpp"
#include "icd/oracle.hpp"
#include "icd/reduction.hpp"
#include "icd/rng.hpp"
#include "icd/scenario.hpp"

namespace {

using namespace icd;

CompositeModel bench_model(std::size_t ports, std::size_t models) {
  GeneratorParams p;
  p.ports = ports;
  p.models = models;
  p.target_edges = static_cast<std::uint64_t>(ports) * (ports - 1) / 8;
  p.seed = ports;
  return generate_random_dag(p);
}

// Distinct acyclic candidate edges, cycling forever.
struct EdgeFeed {
  std::vector<std::pair<PortId, PortId>> edges;
  std::size_t next = 0;
  explicit EdgeFeed(const CompositeGraph& g, std::size_t want) {
    std::mt19937_64 rng(7);
    const PathCountClosure cl = PathCountClosure::from_graph(g);
    const auto n = g.size();
    while (edges.size() < want) {
      const auto u = static_cast<PortId>(uniform_below(rng, n));
      const auto v = static_cast<PortId>(uniform_below(rng, n));
      if (u == v || g.has_edge(u, v) || cl.would_close_cycle(u, v)) continue;
      edges.emplace_back(u, v);
    }
  }
  std::pair<PortId, PortId> take() { return edges[next++ % edges.size()]; }
};

void BM_closure_insert_erase(benchmark::State& state) {
  const auto model = bench_model(static_cast<std::size_t>(state.range(0)), 10);
  const CompositeGraph g = build_composite_graph(model);
  PathCountClosure cl = PathCountClosure::from_graph(g, CountMode::modular);
  EdgeFeed feed(g, 64);
  for (auto _ : state) {
    const auto [u, v] = feed.take();
    cl.insert_edge(u, v);
    cl.erase_edge(u, v);
  }
}
BENCHMARK(BM_closure_insert_erase)->Arg(100)->Arg(200)->Arg(400);

void BM_closure_recompute(benchmark::State& state) {
  const auto model = bench_model(static_cast<std::size_t>(state.range(0)), 10);
  const CompositeGraph g = build_composite_graph(model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PathCountClosure::from_graph(g, CountMode::modular));
  }
}
BENCHMARK(BM_closure_recompute)->Arg(100)->Arg(200)->Arg(400);

void BM_cycle_query_closure(benchmark::State& state) {
  const auto model = bench_model(static_cast<std::size_t>(state.range(0)), 10);
  const CompositeGraph g = build_composite_graph(model);
  const PathCountClosure cl =
      PathCountClosure::from_graph(g, CountMode::modular);
  EdgeFeed feed(g, 64);
  for (auto _ : state) {
    const auto [u, v] = feed.take();
    benchmark::DoNotOptimize(cl.would_close_cycle(u, v));
  }
}
BENCHMARK(BM_cycle_query_closure)->Arg(100)->Arg(200)->Arg(400);

void BM_cycle_query_dfs(benchmark::State& state) {
  const auto model = bench_model(static_cast<std::size_t>(state.range(0)), 10);
  CompositeGraph g = build_composite_graph(model);
  EdgeFeed feed(g, 64);
  for (auto _ : state) {
    const auto [u, v] = feed.take();
    g.add_edge(u, v);
    benchmark::DoNotOptimize(dfs_has_cycle(g));
    g.remove_edge(u, v);
  }
}
BENCHMARK(BM_cycle_query_dfs)->Arg(100)->Arg(200)->Arg(400);

void BM_update_tr(benchmark::State& state) {
  const auto model = bench_model(static_cast<std::size_t>(state.range(0)), 10);
  const CompositeGraph g = build_composite_graph(model);
  const PathCountClosure cl =
      PathCountClosure::from_graph(g, CountMode::modular);
  const Partitioning parts = per_model_partitioning(model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_tr(cl, parts));
  }
}
BENCHMARK(BM_update_tr)->Arg(100)->Arg(200)->Arg(400);

void BM_service_mcr(benchmark::State& state) {
  const auto model = bench_model(200, 10);
  OracleConfig ocfg;
  ocfg.arithmetic = CountMode::modular;
  std::optional<Oracle> oracle;
  oracle.emplace(model, ocfg);
  ScenarioConfig cfg;
  cfg.seed = 11;
  cfg.total = 4096;
  switch (state.range(0)) {
    case 0: cfg.mix = {1, 0, 0}; break;
    case 1: cfg.mix = {0, 1, 0}; break;
    default: cfg.mix = {0, 0, 1}; break;
  }
  const auto stream = generate_mcr_stream(model, oracle->partitioning(), cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    if (i == stream.size()) {
      state.PauseTiming();
      oracle.emplace(model, ocfg);
      i = 0;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(oracle->service_mcr(stream[i++]));
    state.PauseTiming();
    oracle->drain_maintenance();
    state.ResumeTiming();
  }
}
BENCHMARK(BM_service_mcr)->Arg(0)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
