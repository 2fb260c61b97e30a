#include <doctest.h>

#include <json.hpp>

#include "homlab/comonads.hpp"
#include "homlab/covers.hpp"
#include "homlab/error.hpp"
#include "homlab/graphs.hpp"
#include "homlab/io.hpp"

using namespace homlab;
namespace g = homlab::graphs;
using nlohmann::json;

TEST_SUITE("io") {

TEST_CASE("plain graph format") {
  auto l = parse_structure("# triangle\nn 3\ne 0 1\ne 1 2\n\ne 2 0\n");
  CHECK(l.structure == g::complete(3));
  CHECK_FALSE(l.point);
  CHECK_THROWS_AS(l.pointed(), PreconditionViolation);
  CHECK_THROWS_AS(parse_structure("n 2\ne 0 5\n"), MalformedInput);
  CHECK_THROWS_AS(parse_structure("n 2\nx 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_structure(""), ParseError);
}

TEST_CASE("structure JSON round trip") {
  Signature sig({{"E", 2}, {"P", 1}, {"R", 3}});
  RelStructure a(sig, 3, {{{0, 1}, {2, 2}}, {{1}}, {{0, 1, 2}}});
  CHECK(parse_structure(structure_to_json(a)).structure == a);
  RelStructure k(Signature({{"E", 2}, {"P", 1}}), 3, {{{0, 1}, {2, 2}}, {{1}}});
  auto back = parse_structure(structure_to_json(k, 2));
  CHECK(back.structure == k);
  REQUIRE(back.point);
  CHECK(back.pointed().point == 2);
  CHECK_THROWS_AS(parse_structure(structure_to_json(a, 2)).pointed(), MalformedInput);
  auto j = json::parse(structure_to_json(a));
  CHECK(j.at("size") == 3);
  CHECK_FALSE(j.contains("point"));

  CHECK_THROWS_AS(parse_structure("{\"size\": 2, "), ParseError);
  CHECK_THROWS_AS(parse_structure("{\"relations\": {}}"), MalformedInput);
  CHECK_THROWS_AS(parse_structure(R"({"signature":[{"name":"E","arity":2}],"size":2,"relations":{"E":[[0,3]]}})"),
                  MalformedInput);
}

TEST_CASE("cover JSON") {
  auto p3 = g::path(3);
  auto td = compute_tree_depth(p3);
  auto f = parse_cover(cover_to_json(td.cover), p3);
  REQUIRE(std::holds_alternative<ForestCover>(f));
  CHECK(std::get<ForestCover>(f).parent == td.cover.parent);

  auto pc = *find_pebble_forest_cover(p3, 2);
  auto p = parse_cover(cover_to_json(pc), p3);
  REQUIRE(std::holds_alternative<PebbleForestCover>(p));
  CHECK(std::get<PebbleForestCover>(p).pebbles == pc.pebbles);
  CHECK(std::get<PebbleForestCover>(p).k == pc.k);

  auto inferred = parse_cover(R"({"parent":[-1,0,1],"pebbles":[1,2,1]})", p3);
  CHECK(std::get<PebbleForestCover>(inferred).k == 2);
  CHECK_THROWS_AS(parse_cover(R"({"parent":[-1,0]})", p3), MalformedInput);
  CHECK_THROWS_AS(parse_cover(R"({"parent":[-1,0,1],"pebbles":[1]})", p3), MalformedInput);
  CHECK_THROWS_AS(parse_cover("[", p3), ParseError);
}

TEST_CASE("comonad export") {
  auto cs = build_comonad(ComonadKind::ef(2), g::complete(2));
  auto carrier = parse_structure(comonad_carrier_json(cs));
  CHECK(carrier.structure == cs.carrier);
  auto side = json::parse(comonad_sidecar_json(cs));
  CHECK(side.at("plays").size() == cs.plays.size());
  CHECK(side.at("counit").get<std::vector<Element>>() == cs.counit);
  auto both = json::parse(comonad_to_json(cs));
  CHECK(both.contains("carrier"));
  CHECK(both.contains("sidecar"));

  auto pcs = build_comonad(ComonadKind::pebble(2, 1), g::complete(2));
  auto pside = json::parse(comonad_sidecar_json(pcs));
  CHECK(pside.at("plays").at(0).at(0).size() == 2);
}

}  // TEST_SUITE
