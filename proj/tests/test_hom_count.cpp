#include <doctest.h>

#include "homlab/constructions.hpp"
#include "homlab/covers.hpp"
#include "homlab/error.hpp"
#include "homlab/graphs.hpp"
#include "homlab/hom_count.hpp"
#include "oracle.hpp"

using namespace homlab;
namespace g = homlab::graphs;

namespace {

const Signature kBin = Signature::graph();

RelStructure two_k3() { return disjoint_union(g::complete(3), g::complete(3)).sum; }

// A pebble cover of `a` of the least width found by the library search.
PebbleForestCover some_cover(const RelStructure& a) {
  for (int k = 1;; ++k) {
    if (auto c = find_pebble_forest_cover(a, k)) return *c;
  }
}

}  // namespace

TEST_SUITE("hom-count") {

TEST_CASE("hom_count examples") {
  for (std::size_t n = 0; n <= 5; ++n) CHECK(hom_count(g::edgeless(1), g::cycle(4 + n)) == 4 + n);
  CHECK(hom_count(g::complete(2), g::complete(3)) == 6);
  CHECK(hom_count(g::complete(3), g::cycle(6)) == 0);
  CHECK(hom_count(g::complete(3), two_k3()) == 12);
  CHECK(hom_count(RelStructure(kBin, 0), g::complete(3)) == 1);
  CHECK(hom_count(g::edgeless(1), RelStructure(kBin, 0)) == 0);
  CHECK_THROWS_AS(hom_count(g::complete(2), RelStructure(Signature::graph("F"), 1)), SignatureMismatch);
}

TEST_CASE("strong_emb_count examples") {
  CHECK(strong_emb_count(g::complete(2), g::complete(3)) == 6);
  CHECK(strong_emb_count(g::complete(2), g::path(3)) == 4);
  CHECK(strong_emb_count(g::edgeless(2), g::complete(2)) == 0);
}

TEST_CASE("pointed_hom_count examples") {
  auto k1 = PointedStructure(g::edgeless(1), 0);
  auto a = g::directed(4, {{0, 1}, {0, 2}, {1, 2}, {3, 0}});
  for (Element p = 0; p < 4; ++p) CHECK(pointed_hom_count(k1, {a, p}) == 1);
  auto arrow = PointedStructure(g::directed(2, {{0, 1}}), 0);
  CHECK(pointed_hom_count(arrow, {a, 0}) == 2);
  CHECK(pointed_hom_count(arrow, {a, 2}) == 0);
  CHECK(pointed_hom_count({a, 3}, {a, 3}) >= 1);
}

TEST_CASE("hom_count_treedec examples") {
  auto p3 = g::path(3);
  auto c2 = find_pebble_forest_cover(p3, 2);
  REQUIRE(c2);
  CHECK(hom_count_treedec(p3, *c2, g::complete(3)) == 12);
  auto k1 = g::edgeless(1);
  CHECK(hom_count_treedec(k1, *find_pebble_forest_cover(k1, 1), g::cycle(5)) == 5);
  auto c6 = g::cycle(6);
  auto c3 = find_pebble_forest_cover(c6, 3);
  REQUIRE(c3);
  CHECK(hom_count_treedec(c6, *c3, g::complete(3)) == 66);
  CHECK(oracle::hom_count(c6, g::complete(3)) == 66);
  auto bad = *c3;
  bad.pebbles.assign(6, 1);
  CHECK_THROWS_AS(hom_count_treedec(c6, bad, g::complete(3)), PreconditionViolation);
}

TEST_CASE("counts agree with brute force") {
  Signature sig({{"E", 2}, {"P", 1}, {"R", 3}});
  std::mt19937 rng(17);
  for (int i = 0; i < 300; ++i) {
    auto c = oracle::random_structure(rng, sig, 1 + i % 4, 0.15);
    auto a = oracle::random_structure(rng, sig, 1 + (i / 4) % 4, 0.4);
    CHECK(hom_count(c, a) == oracle::hom_count(c, a));
    CHECK(strong_emb_count(c, a) == oracle::strong_emb_count(c, a));
    const Element pc = i % c.size(), pa = (i / 3) % a.size();
    Count visited = 0;
    for_each_hom(c, a, [&](const std::vector<Element>& m) {
      CHECK(oracle::preserves(c, a, m));
      ++visited;
      return true;
    });
    CHECK(visited == hom_count(c, a));
  }
  Signature kripke({{"E", 2}, {"P", 1}});
  for (int i = 0; i < 300; ++i) {
    auto c = oracle::random_structure(rng, kripke, 1 + i % 4, 0.3);
    auto a = oracle::random_structure(rng, kripke, 1 + (i / 4) % 4, 0.4);
    const Element pc = i % c.size(), pa = (i / 3) % a.size();
    CHECK(pointed_hom_count({c, pc}, {a, pa}) == oracle::pointed_hom_count(c, pc, a, pa));
  }
}

TEST_CASE("sum over connected sources and product over components") {
  auto small = oracle::iso_classes_up_to(kBin, 1, 3);
  auto graphs4 = oracle::iso_classes_up_to(kBin, 1, 2);
  for (const auto& c : oracle::iso_classes_up_to(kBin, 1, 4)) {
    if (gaifman_components(c).size() != 1) continue;
    for (const auto& a : graphs4) {
      for (const auto& b : graphs4) {
        CHECK(hom_count(c, disjoint_union(a, b).sum) == hom_count(c, a) + hom_count(c, b));
      }
    }
  }
  for (const auto& c1 : oracle::iso_classes_up_to(kBin, 1, 2)) {
    for (const auto& c2 : oracle::iso_classes_up_to(kBin, 1, 2)) {
      for (const auto& a : small) {
        CHECK(hom_count(disjoint_union(c1, c2).sum, a) == hom_count(c1, a) * hom_count(c2, a));
      }
    }
  }
}

TEST_CASE("strong embeddings bounded by homomorphisms") {
  auto all = oracle::iso_classes_up_to(kBin, 1, 3);
  for (const auto& c : all) {
    for (const auto& a : all) CHECK(strong_emb_count(c, a) <= hom_count(c, a));
  }
}

TEST_CASE("tree-decomposition DP on random instances") {
  std::mt19937 rng(23);
  Signature sig({{"E", 2}, {"P", 1}});
  for (int i = 0; i < 200; ++i) {
    auto c = oracle::random_structure(rng, sig, 1 + i % 6, 0.25);
    auto a = oracle::random_structure(rng, sig, 1 + (i / 6) % 5, 0.5);
    auto cover = some_cover(c);
    CHECK(hom_count_treedec(c, cover, a) == oracle::hom_count(c, a));
  }
}

TEST_CASE("overflow is reported, never wrapped") {
  CHECK_THROWS_AS(checked_mul(Count{1} << 40, Count{1} << 40), CountOverflow);
  CHECK_THROWS_AS(checked_pow(10, 30), CountOverflow);
  CHECK(checked_pow(3, 4) == 81);
}

TEST_CASE("classical Lovasz on graphs with at most 4 vertices") {
  auto graphs = oracle::simple_graphs_up_to(1, 4);
  auto vec = [&](const RelStructure& a) {
    std::vector<Count> v;
    for (const auto& c : graphs) v.push_back(hom_count(c, a));
    return v;
  };
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (std::size_t j = i + 1; j < graphs.size(); ++j) {
      if (graphs[i].size() == graphs[j].size()) CHECK(vec(graphs[i]) != vec(graphs[j]));
    }
  }
}

}  // TEST_SUITE
