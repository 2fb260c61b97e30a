#include <doctest.h>

#include "generators.hpp"
#include "homlab/constructions.hpp"
#include "homlab/covers.hpp"
#include "homlab/error.hpp"
#include "homlab/graphs.hpp"
#include "homlab/iso.hpp"
#include "oracle.hpp"

using namespace homlab;
namespace g = homlab::graphs;

namespace {

const Signature kBin = Signature::graph();
const Signature kPlus({{"E", 2}, {"I", 2}});

PebbleForestCover chain(const RelStructure& a, std::vector<int> pebbles, int k) {
  std::vector<int> parent(a.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i) - 1;
  return {ForestCover::make(a, parent), std::move(pebbles), k};
}

}  // namespace

TEST_SUITE("covers") {

TEST_CASE("sees") {
  auto a = g::edgeless(2);
  CHECK(sees(chain(a, {1, 2}, 2), 0, 1));
  CHECK(sees(chain(a, {1, 2}, 2), 1, 0));
  CHECK_FALSE(sees(chain(a, {1, 1}, 1), 0, 1));
  PebbleForestCover two_roots{ForestCover::make(a, {-1, -1}), {1, 2}, 2};
  CHECK_FALSE(sees(two_roots, 0, 1));
}

TEST_CASE("validate_pebble_cover") {
  auto k1 = g::edgeless(1);
  CHECK(validate_pebble_cover(k1, chain(k1, {1}, 1), 1, 1));
  auto k2 = g::complete(2);
  CHECK_FALSE(validate_pebble_cover(k2, chain(k2, {1, 1}, 1), 1, 2));
  auto k3 = g::complete(3);
  CHECK(validate_pebble_cover(k3, chain(k3, {1, 2, 3}, 3), 3, 3));
  CHECK_FALSE(validate_pebble_cover(k3, chain(k3, {1, 2, 3}, 3), 3, 2));
  CHECK_FALSE(validate_pebble_cover(k3, chain(k3, {1, 2, 3}, 3), 2, 3));
  CHECK_THROWS_AS(ForestCover::make(k3, {1, 2, 0}), MalformedInput);
  CHECK_THROWS_AS(ForestCover::make(k3, {-1, 0}), MalformedInput);
}

TEST_CASE("tree-depth examples") {
  CHECK(compute_tree_depth(g::edgeless(1)).depth == 1);
  CHECK(compute_tree_depth(g::path(4)).depth == 3);
  CHECK(compute_tree_depth(g::complete(3)).depth == 3);
  CHECK(compute_tree_depth(g::complete(4)).depth == 4);
  CHECK(compute_tree_depth(g::cycle(6)).depth == 4);
  CHECK(compute_tree_depth(RelStructure(kBin, 0)).depth == 0);
  CHECK_THROWS_AS(compute_tree_depth(g::edgeless(11)), CapExceeded);
}

TEST_CASE("tree-depth agrees with exhaustive cover search") {
  for (const auto& a : oracle::iso_classes_up_to(kBin, 1, 4)) {
    auto td = compute_tree_depth(a);
    CHECK(td.depth == oracle::tree_depth(a));
    CHECK(validate_forest_cover(a, td.cover, td.depth));
  }
  for (const auto& a : oracle::simple_graphs(5)) {
    auto td = compute_tree_depth(a);
    CHECK(td.depth == oracle::tree_depth(a));
    CHECK(validate_forest_cover(a, td.cover, td.depth));
  }
}

TEST_CASE("pebble covers and tree-width") {
  auto p4 = g::path(4);
  CHECK(find_pebble_forest_cover(p4, 2));
  CHECK_FALSE(find_pebble_forest_cover(p4, 1));
  CHECK(tree_width(p4) == 1);
  auto k3 = g::complete(3);
  CHECK(find_pebble_forest_cover(k3, 3));
  CHECK_FALSE(find_pebble_forest_cover(k3, 2));
  auto k1 = find_pebble_forest_cover(g::edgeless(1), 1, 1);
  REQUIRE(k1);
  CHECK(k1->cover.parent == std::vector<int>{-1});
  CHECK(tree_width(g::star(4)) == 1);
  for (std::size_t n = 3; n <= 6; ++n) CHECK(tree_width(g::cycle(n)) == 2);
  for (std::size_t n = 2; n <= 4; ++n) CHECK(tree_width(g::complete(n)) == static_cast<int>(n) - 1);
  CHECK(tree_width(g::edgeless(3)) == 0);
}

TEST_CASE("pebble cover search agrees with exhaustive search") {
  for (const auto& a : oracle::iso_classes_up_to(kBin, 1, 3)) {
    for (int k = 1; k <= 3; ++k) {
      for (int n = 1; n <= 3; ++n) {
        auto c = find_pebble_forest_cover(a, k, n);
        CHECK(c.has_value() == oracle::has_pebble_cover(a, k, n));
        if (c) CHECK(validate_pebble_cover(a, *c, k, n));
      }
    }
  }
  for (const auto& a : oracle::simple_graphs(4)) {
    for (int k = 1; k <= 3; ++k) {
      for (int n = 1; n <= 4; ++n) {
        auto c = find_pebble_forest_cover(a, k, n);
        CHECK(c.has_value() == oracle::has_pebble_cover(a, k, n));
      }
    }
  }
}

TEST_CASE("quotient_forest_cover") {
  auto a = g::path(3);
  auto td = compute_tree_depth(a);
  auto j = functor_J(a);
  auto same = quotient_forest_cover(j, ForestCover::make(j, td.cover.parent));
  CHECK(same.parent == td.cover.parent);

  RelStructure d(kPlus, 3, {{{1, 2}}, {{0, 2}}});
  auto q = quotient_forest_cover(d, ForestCover::make(d, {-1, 0, 1}));
  auto h = functor_H(d);
  CHECK(h.structure.size() == 2);
  CHECK(validate_forest_cover(h.structure, q, 3));
  CHECK(q.parent == std::vector<int>{-1, 0});

  RelStructure all(kPlus, 3, {{}, {{0, 1}, {1, 2}}});
  auto one = quotient_forest_cover(all, ForestCover::make(all, {-1, 0, 1}));
  CHECK(one.size() == 1);
  CHECK(one.height == 1);

  std::mt19937 rng(31);
  for (int i = 0; i < 300; ++i) {
    auto inst = gen::random_quotient_instance(rng, 6);
    auto reduct = drop_symbol(inst.structure, "P");
    auto cover = ForestCover::make(reduct, inst.cover.cover.parent);
    auto qc = quotient_forest_cover(reduct, cover);
    CHECK(qc.height <= cover.height);
    CHECK(validate_forest_cover(functor_H(reduct).structure, qc, cover.height));
  }
}

TEST_CASE("one-step quotient examples") {
  // Chain u < v < w with (u,v) in I.
  RelStructure a(kPlus, 3, {{}, {{0, 1}}});
  auto r1 = one_step_quotient(a, chain(a, {1, 2, 2}, 2), 0, 1);
  CHECK(r1.cover.cover.parent == std::vector<int>{-1, 0});
  CHECK(r1.cover.pebbles == std::vector<int>{1, 2});
  auto r2 = one_step_quotient(a, chain(a, {1, 2, 1}, 2), 0, 1);
  CHECK(r2.cover.pebbles == std::vector<int>{1, 2});
  CHECK(r2.old_to_new == std::vector<Element>{0, 0, 1});

  // w off the branch through v keeps its pebble.
  RelStructure b(kPlus, 4, {{}, {{0, 1}}});
  PebbleForestCover fork{ForestCover::make(b, {-1, 0, 0, 1}), {1, 2, 3, 1}, 3};
  auto r3 = one_step_quotient(b, fork, 0, 1);
  CHECK(r3.cover.pebbles[1] == 3);

  CHECK_THROWS_AS(one_step_quotient(a, chain(a, {1, 2, 2}, 2), 0, 2), PreconditionViolation);
  CHECK_THROWS_AS(one_step_quotient(a, chain(a, {1, 2, 2}, 2), 1, 0), PreconditionViolation);
}

TEST_CASE("eliminate_equalities examples") {
  auto p3 = g::path(3);
  auto cover = *find_pebble_forest_cover(p3, 2);
  auto j = functor_J(p3);
  PebbleForestCover jc{ForestCover::make(j, cover.cover.parent), cover.pebbles, cover.k};
  auto e = eliminate_equalities(j, jc);
  CHECK(e.structure == p3);
  CHECK(e.cover.cover.parent == cover.cover.parent);
  CHECK(e.steps == 0);

  RelStructure a(kPlus, 3, {{{1, 2}}, {{0, 1}}});
  for (auto pebbles : {std::vector<int>{1, 2, 2}, std::vector<int>{1, 2, 1}}) {
    auto c = chain(a, pebbles, 2);
    if (!validate_pebble_cover(a, c, 2, 3)) continue;
    auto r = eliminate_equalities(a, c);
    CHECK(r.structure.size() == 2);
    CHECK(validate_pebble_cover(r.structure, r.cover, 2, 3));
  }
}

TEST_CASE("one-step quotient on random instances") {
  std::mt19937 rng(41);
  for (int i = 0; i < 1000; ++i) {
    auto inst = gen::random_quotient_instance(rng);
    const auto& a = inst.structure;
    const auto& c = inst.cover;
    REQUIRE(validate_pebble_cover(a, c, c.k, inst.n));
    auto r = one_step_quotient(a, c, inst.u, inst.v);
    CHECK(validate_pebble_cover(r.structure, r.cover, c.k, inst.n));
    CHECK(r.cover.cover.height <= c.cover.height);
    for (Element w = 0; w < a.size(); ++w) {
      if (w == inst.v) continue;
      const Element nw = r.old_to_new[w];
      if (w != inst.u && sees(c, inst.v, w)) CHECK(sees(r.cover, r.old_to_new[inst.u], nw));
      for (Element w2 = 0; w2 < a.size(); ++w2) {
        if (w2 == inst.v || w2 == w) continue;
        if (sees(c, w, w2)) CHECK(sees(r.cover, nw, r.old_to_new[w2]));
      }
    }
    auto e = eliminate_equalities(a, c);
    CHECK(validate_pebble_cover(e.structure, e.cover, c.k, inst.n));
    CHECK(isomorphic(e.structure, functor_H(a).structure));
  }
}

}  // TEST_SUITE
