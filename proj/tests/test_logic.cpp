#include <doctest.h>

#include "homlab/constructions.hpp"
#include "homlab/equivalence.hpp"
#include "homlab/error.hpp"
#include "homlab/formula.hpp"
#include "homlab/graphs.hpp"
#include "oracle.hpp"

using namespace homlab;
namespace g = homlab::graphs;

namespace {

const Signature kBin = Signature::graph();
const Signature kKripke({{"E", 2}, {"P", 1}});

RelStructure two_k3() { return disjoint_union(g::complete(3), g::complete(3)).sum; }

ModalFormula random_modal(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 1);
  switch (pick(rng)) {
    case 0: return ModalFormula::prop("P");
    case 1: return ModalFormula::negation(ModalFormula::prop("P"));
    case 2: return ModalFormula::conjunction({random_modal(rng, depth - 1), random_modal(rng, depth - 1)});
    case 3: return ModalFormula::disjunction({random_modal(rng, depth - 1), ModalFormula::prop("P")});
    case 4: return ModalFormula::diamond("E", 1 + rng() % 3, random_modal(rng, depth - 1));
    default: return ModalFormula::box("E", 1 + rng() % 2, random_modal(rng, depth - 1));
  }
}

// Formulas of modal depth <= k: literals, then graded diamonds over
// literals, top, and pairwise conjunctions of the previous layer.
std::vector<ModalFormula> modal_basis(int k) {
  std::vector<ModalFormula> layer{ModalFormula::prop("P"), ModalFormula::negation(ModalFormula::prop("P"))};
  for (int d = 0; d < k; ++d) {
    std::vector<ModalFormula> bodies = layer;
    bodies.push_back(ModalFormula::top());
    for (const auto& x : layer)
      for (const auto& y : layer) bodies.push_back(ModalFormula::conjunction({x, y}));
    auto next = layer;
    for (std::size_t n = 1; n <= 3; ++n)
      for (const auto& b : bodies) next.push_back(ModalFormula::diamond("E", n, b));
    layer = std::move(next);
  }
  return layer;
}

struct PointedRep {
  RelStructure a;
  Element point;
};

std::vector<PointedRep> pointed_classes(const Signature& sig, std::size_t max) {
  std::vector<PointedRep> out;
  for (const auto& a : oracle::iso_classes_up_to(sig, 1, max)) {
    std::set<std::vector<std::vector<Tuple>>> seen;
    for (Element p = 0; p < a.size(); ++p) {
      if (seen.insert(oracle::canonical_form(a, p)).second) out.push_back({a, p});
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("logic") {

TEST_CASE("eval_formula examples") {
  auto k3 = g::complete(3);
  auto tri = parse_counting("(geq 1 x (geq 1 y (geq 1 z (and (E x y) (E y z) (E z x)))))");
  CHECK(eval_formula(k3, tri));
  CHECK_FALSE(eval_formula(g::cycle(6), tri));
  auto deg2 = parse_counting("(geq 2 y (E x y))");
  CHECK(eval_formula(k3, deg2, {{"x", 0}}));
  CHECK_FALSE(eval_formula(g::path(3), deg2, {{"x", 0}}));
  CHECK(eval_formula(g::path(3), deg2, {{"x", 1}}));
  CHECK(eval_formula(k3, parse_counting("(leq 3 x true)")));
  CHECK_FALSE(eval_formula(k3, parse_counting("(leq 2 x true)")));
  CHECK(eval_formula(k3, parse_counting("(geq 1 x (geq 1 y (not (= x y))))")));
  CHECK_FALSE(eval_formula(g::edgeless(1), parse_counting("(geq 1 x (geq 1 y (not (= x y))))")));
  CHECK(eval_formula(k3, CountingFormula::top()));
  CHECK_FALSE(eval_formula(k3, CountingFormula::bottom()));
  CHECK_THROWS_AS(eval_formula(k3, deg2), PreconditionViolation);
  CHECK_THROWS_AS(eval_formula(k3, parse_counting("(exists x (F x x))")), MalformedInput);
  CHECK_THROWS_AS(eval_formula(k3, parse_counting("(exists x (E x))")), MalformedInput);
}

TEST_CASE("eval_modal examples") {
  RelStructure a(kKripke, 3, {{{0, 1}, {0, 2}}, {{1}}});
  auto p = ModalFormula::prop("P");
  CHECK(eval_modal({a, 1}, p));
  CHECK_FALSE(eval_modal({a, 0}, p));
  CHECK(eval_modal({a, 0}, ModalFormula::diamond("E", 1, p)));
  CHECK_FALSE(eval_modal({a, 0}, ModalFormula::diamond("E", 2, p)));
  CHECK(eval_modal({a, 0}, ModalFormula::diamond("E", 2, ModalFormula::top())));
  CHECK_FALSE(eval_modal({a, 0}, ModalFormula::box("E", 1, p)));
  CHECK(eval_modal({a, 1}, ModalFormula::box("E", 1, ModalFormula::negation(ModalFormula::top()))));
  CHECK(eval_modal_all(a, p) == std::vector<bool>{false, true, false});
}

TEST_CASE("standard translation examples") {
  auto p = ModalFormula::prop("P");
  CHECK(to_sexp(standard_translation(p)) == "(P x)");
  auto dp = standard_translation(ModalFormula::diamond("E", 1, p));
  CHECK(to_sexp(dp) == "(geq 1 y (and (E x y) (P y)))");
  auto ddp = standard_translation(ModalFormula::diamond("E", 2, ModalFormula::diamond("E", 1, p)));
  CHECK(ddp.width() == 2);
  CHECK(ddp.free_variables() == std::set<std::string>{"x"});
  CHECK(ddp.depth() == 2);
}

TEST_CASE("standard translation preserves truth") {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    auto phi = random_modal(rng, 1 + i % 3);
    auto a = oracle::random_structure(rng, kKripke, 1 + i % 4, 0.4);
    auto tr = standard_translation(phi);
    CHECK(tr.width() <= 2);
    CHECK(tr.depth() == phi.depth());
    auto truth = eval_modal_all(a, phi);
    for (Element x = 0; x < a.size(); ++x) CHECK(eval_formula(a, tr, {{"x", x}}) == truth[x]);
  }
}

TEST_CASE("equiv_counting examples") {
  auto k2 = g::complete(2), e2 = g::edgeless(2);
  CHECK(equiv_counting(k2, e2, 1));
  CHECK_FALSE(equiv_counting(k2, e2, 2));
  CHECK(equiv_counting(g::cycle(6), two_k3(), std::nullopt, 2));
  CHECK_FALSE(equiv_counting(g::cycle(6), two_k3(), std::nullopt, 3));
  CHECK(equiv_counting(g::cycle(6), two_k3(), 2));
  CHECK_FALSE(equiv_counting(g::cycle(6), two_k3(), 3));
  CHECK_FALSE(equiv_counting(g::edgeless(1), g::edgeless(2), 1));
  CHECK(equiv_counting(g::edgeless(1), g::edgeless(2), 0));
  CHECK_THROWS(equiv_counting(k2, e2, std::nullopt));
}

TEST_CASE("game agrees with the naive game on small graphs") {
  auto graphs = oracle::simple_graphs_up_to(1, 4);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (std::size_t j = i; j < graphs.size(); ++j) {
      const auto &a = graphs[i], &b = graphs[j];
      for (int n = 0; n <= 3; ++n) CHECK(equiv_counting(a, b, n) == oracle::game_equiv(a, b, n));
      for (int k = 1; k <= 2; ++k)
        for (int n = 1; n <= 3; ++n) CHECK(equiv_counting(a, b, n, k) == oracle::game_equiv(a, b, n, k));
    }
  }
  auto directed = oracle::iso_classes_up_to(kBin, 1, 3);
  for (std::size_t i = 0; i < directed.size(); ++i) {
    for (std::size_t j = i + 1; j < directed.size(); ++j) {
      const auto &a = directed[i], &b = directed[j];
      if (a.size() != b.size()) continue;
      for (int n = 1; n <= 2; ++n) {
        CHECK(equiv_counting(a, b, n) == oracle::game_equiv(a, b, n));
        CHECK(equiv_counting(a, b, n, 2) == oracle::game_equiv(a, b, n, 2));
      }
    }
  }
}

TEST_CASE("equivalence relation and monotonicity") {
  auto graphs = oracle::simple_graphs_up_to(1, 4);
  const auto m = graphs.size();
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 3; ++k) {
      std::vector<std::vector<bool>> eq(m, std::vector<bool>(m));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          eq[i][j] = equiv_counting(graphs[i], graphs[j], n, k);
          if (eq[i][j]) {
            CHECK(equiv_counting(graphs[i], graphs[j], n - 1, k));
            if (k > 1) CHECK(equiv_counting(graphs[i], graphs[j], n, k - 1));
          }
        }
        CHECK(eq[i][i]);
      }
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          CHECK(eq[i][j] == eq[j][i]);
          for (std::size_t l = 0; l < m; ++l)
            if (eq[i][j] && eq[j][l]) CHECK(eq[i][l]);
        }
    }
  }
}

TEST_CASE("distinguishing formulas are sound") {
  auto graphs = oracle::simple_graphs_up_to(1, 4);
  graphs.push_back(g::cycle(6));
  graphs.push_back(two_k3());
  int checked = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (std::size_t j = 0; j < graphs.size(); ++j) {
      if (i == j) continue;
      const auto &a = graphs[i], &b = graphs[j];
      for (auto [n, k] : {std::pair<int, std::optional<int>>{1, {}}, {2, {}}, {3, {}}, {3, 2}, {2, 3}}) {
        auto f = distinguishing_formula(a, b, n, k);
        CHECK(f.has_value() != equiv_counting(a, b, n, k));
        if (!f) continue;
        ++checked;
        CHECK(f->depth() <= n);
        if (k) CHECK(f->width() <= *k);
        CHECK(f->free_variables().empty());
        CHECK(eval_formula(a, *f));
        CHECK_FALSE(eval_formula(b, *f));
      }
    }
  }
  CHECK(checked >= 50);
  auto f = distinguishing_formula(g::cycle(6), two_k3(), std::nullopt, 3);
  REQUIRE(f);
  CHECK(f->width() <= 3);
  CHECK(eval_formula(g::cycle(6), *f) != eval_formula(two_k3(), *f));
}

TEST_CASE("Weisfeiler-Leman examples") {
  auto r1 = kwl_refine(g::cycle(6), two_k3(), 1);
  CHECK(r1.equivalent);
  CHECK(r1.first.histogram() == r1.second.histogram());
  CHECK_FALSE(kwl_refine(g::cycle(6), two_k3(), 2).equivalent);
  CHECK_FALSE(kwl_refine(g::path(4), g::star(4), 1).equivalent);
  CHECK(kwl_refine(g::path(4), g::path(4), 2).equivalent);
  CHECK_FALSE(kwl_refine(g::edgeless(2), g::edgeless(3), 1).equivalent);
  CHECK(kwl_refine(g::cycle(4), g::cycle(4), 2).first.colors.size() == 16);
}

TEST_CASE("modal types examples") {
  RelStructure a(kKripke, 3, {{{0, 1}, {0, 2}}, {{1}}});
  RelStructure b(kKripke, 2, {{{0, 1}}, {{1}}});
  CHECK(modal_equiv({a, 1}, {b, 1}, 3));
  CHECK(modal_equiv({a, 0}, {b, 0}, 0));
  CHECK_FALSE(modal_equiv({a, 0}, {b, 0}, 1));
  RelStructure c(kKripke, 3, {{{0, 1}, {0, 2}}, {{1}, {2}}});
  RelStructure d(kKripke, 2, {{{0, 1}}, {{1}}});
  CHECK_FALSE(modal_equiv({c, 0}, {d, 0}, 1));
  // Graded: two P-successors versus one.
  CHECK(modal_equiv({c, 1}, {c, 2}, 2));
}

TEST_CASE("modal types match a formula basis") {
  auto reps = pointed_classes(kKripke, 3);
  for (int k = 0; k <= 2; ++k) {
    auto basis = modal_basis(k);
    ModalTypeDictionary dict;
    std::vector<int> ids;
    std::vector<std::vector<bool>> truth(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
      ids.push_back(modal_types(reps[i].a, k, dict)[reps[i].point]);
      for (const auto& phi : basis) truth[i].push_back(eval_modal_all(reps[i].a, phi)[reps[i].point]);
    }
    int mismatches = 0;
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        if ((ids[i] == ids[j]) != (truth[i] == truth[j])) ++mismatches;
    CHECK(mismatches == 0);
    std::mt19937 rng(k);
    std::uniform_int_distribution<std::size_t> pick(0, reps.size() - 1);
    for (int s = 0; s < 300; ++s) {
      auto i = pick(rng), j = pick(rng);
      CHECK(modal_equiv({reps[i].a, reps[i].point}, {reps[j].a, reps[j].point}, k) == (ids[i] == ids[j]));
    }
  }
}

TEST_CASE("S-expression round trip") {
  for (std::string s : {"(geq 2 x (and (E x y) (not (= x y))))", "(leq 1 x (or (P x) false))", "true",
                        "(geq 1 x1 (geq 1 x2 (E x1 x2)))"}) {
    CHECK(to_sexp(parse_counting(s)) == s);
  }
  CHECK(to_sexp(parse_counting("(exists x (E x x))")) == "(geq 1 x (E x x))");
  for (std::string s : {"(diamond E 2 (prop P))", "(box E 1 (and (prop P) (not (prop Q))))"}) {
    CHECK(to_sexp(parse_modal(s)) == s);
  }
  CHECK_THROWS_AS(parse_counting("(geq x (E x x))"), ParseError);
  CHECK_THROWS_AS(parse_counting("(and (E x y)"), ParseError);
  CHECK_THROWS_AS(parse_modal("(diamond E (prop P))"), ParseError);
}

}  // TEST_SUITE
