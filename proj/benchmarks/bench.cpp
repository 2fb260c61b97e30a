#include <benchmark/benchmark.h>

#include <random>

#include "homlab/constructions.hpp"
#include "homlab/covers.hpp"
#include "homlab/equivalence.hpp"
#include "homlab/formula.hpp"
#include "homlab/graphs.hpp"
#include "homlab/hom_count.hpp"
#include "homlab/normal_forms.hpp"

using namespace homlab;
namespace g = homlab::graphs;

namespace {

RelStructure random_graph(std::size_t n, double p, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<Element, Element>> edges;
  for (Element u = 0; u < n; ++u)
    for (Element v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return g::undirected(n, edges);
}

void BM_HomCountCycle(benchmark::State& state) {
  auto c = g::cycle(static_cast<std::size_t>(state.range(0)));
  auto a = random_graph(12, 0.4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(hom_count(c, a));
}
BENCHMARK(BM_HomCountCycle)->DenseRange(3, 7);

void BM_HomCountTreeDecomposition(benchmark::State& state) {
  auto c = g::cycle(static_cast<std::size_t>(state.range(0)));
  auto cover = *find_pebble_forest_cover(c, 3);
  auto a = random_graph(12, 0.4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(hom_count_treedec(c, cover, a));
}
BENCHMARK(BM_HomCountTreeDecomposition)->DenseRange(3, 7);

void BM_TreeDepth(benchmark::State& state) {
  auto a = random_graph(static_cast<std::size_t>(state.range(0)), 0.4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_tree_depth(a).depth);
}
BENCHMARK(BM_TreeDepth)->DenseRange(5, 9);

void BM_ColourRefinement(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = random_graph(n, 0.3, 3), b = random_graph(n, 0.3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kwl_refine(a, b, 1).equivalent);
}
BENCHMARK(BM_ColourRefinement)->RangeMultiplier(2)->Range(8, 64);

void BM_TwoDimensionalWL(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto a = g::cycle(n), b = disjoint_union(g::cycle(n / 2), g::cycle(n - n / 2)).sum;
  for (auto _ : state) benchmark::DoNotOptimize(kwl_refine(a, b, 2).equivalent);
}
BENCHMARK(BM_TwoDimensionalWL)->DenseRange(6, 12, 2);

void BM_PebbleGame(benchmark::State& state) {
  auto a = g::cycle(6), b = disjoint_union(g::complete(3), g::complete(3)).sum;
  const int width = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(equiv_counting(a, b, std::nullopt, width));
}
BENCHMARK(BM_PebbleGame)->DenseRange(2, 3);

void BM_ThresholdLiftEval(benchmark::State& state) {
  auto gamma = canonical_conjunctive_query(g::path(3), compute_tree_depth(g::path(3)).cover);
  auto lifted = threshold_lift(gamma, static_cast<std::size_t>(state.range(0)));
  auto b = random_graph(6, 0.5, 5);
  for (auto _ : state) benchmark::DoNotOptimize(eval_formula(b, lifted));
}
BENCHMARK(BM_ThresholdLiftEval)->Arg(2)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
