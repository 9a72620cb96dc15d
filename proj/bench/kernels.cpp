// Serial reference path vs OpenMP path for each parallel kernel.
#include <benchmark/benchmark.h>

#include <map>

#include "mlcd/coassoc.hpp"
#include "mlcd/consensus.hpp"
#include "mlcd/filters.hpp"
#include "mlcd/metrics.hpp"
#include "support/fixtures.hpp"

using namespace mlcd;

namespace {

struct Workload {
  MultilayerGraph graph;
  Ensemble ensemble;
  CoassociationMatrix matrix;
  CoassociationGraph coassoc;
  EcmParameters ecm;
  std::vector<CommunityId> membership;
};

const Workload& workload(std::size_t nodes) {
  static std::map<std::size_t, Workload> cache;
  auto it = cache.find(nodes);
  if (it != cache.end()) return it->second;
  Workload w;
  w.graph = test::planted({nodes, 6, nodes / 25, 0.3, 2.0 / static_cast<double>(nodes), 0.85}, 1);
  w.ensemble = build_ensemble(w.graph);
  w.matrix = build_coassociation(w.graph, w.ensemble);
  w.coassoc = build_coassociation_graph(w.matrix);
  w.ecm = ecm_fit(w.coassoc.graph);
  w.membership.assign(w.ensemble[0].labels().begin(), w.ensemble[0].labels().end());
  for (auto& c : w.membership) {
    if (c == kUncovered) c = 0;
  }
  return cache.emplace(nodes, std::move(w)).first->second;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? Exec::parallel : Exec::serial;
}

void set_label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

void BM_Ensemble(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_ensemble(w.graph, 0, exec_of(state)));
  set_label(state);
}

void BM_Coassociation(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_coassociation(w.graph, w.ensemble, exec_of(state)));
  }
  set_label(state);
}

void BM_MlfPvalues(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mlf_pvalues(w.coassoc, exec_of(state)));
  set_label(state);
}

void BM_EcmPvalues(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ecm_pvalues(w.coassoc, w.ecm, exec_of(state)));
  set_label(state);
}

void BM_Silhouette(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(multilayer_silhouette(w.graph, w.membership, exec_of(state)));
  }
  set_label(state);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (const std::int64_t n : {250, 1000}) {
    b->Args({n, 0});
    b->Args({n, 1});
  }
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Ensemble)->Apply(sizes);
BENCHMARK(BM_Coassociation)->Apply(sizes);
BENCHMARK(BM_MlfPvalues)->Apply(sizes);
BENCHMARK(BM_EcmPvalues)->Apply(sizes);
BENCHMARK(BM_Silhouette)->Apply(sizes);

BENCHMARK_MAIN();
