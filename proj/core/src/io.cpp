#include "homlab/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "homlab/error.hpp"

namespace homlab {

using nlohmann::json;

namespace {

json structure_json(const RelStructure& a) {
  json sig = json::array();
  json rels = json::object();
  for (std::size_t s = 0; s < a.signature().size(); ++s) {
    sig.push_back({{"name", a.signature()[s].name}, {"arity", a.signature()[s].arity}});
    rels[a.signature()[s].name] = a.tuples(s);
  }
  return {{"signature", sig}, {"size", a.size()}, {"relations", rels}};
}

LoadedStructure from_json(const json& j) {
  if (!j.is_object() || !j.contains("size")) throw MalformedInput("structure JSON needs a size");
  std::vector<Symbol> symbols;
  if (j.contains("signature")) {
    for (const auto& s : j.at("signature")) symbols.push_back({s.at("name").get<std::string>(), s.at("arity").get<int>()});
  }
  Signature sig(symbols);
  const auto size = j.at("size").get<std::size_t>();
  std::vector<std::vector<Tuple>> rels(sig.size());
  if (j.contains("relations")) {
    for (const auto& [name, tuples] : j.at("relations").items()) {
      const auto idx = sig.index_of(name);
      for (const auto& t : tuples) rels[idx].push_back(t.get<Tuple>());
    }
  }
  LoadedStructure out{RelStructure(sig, size, std::move(rels)), std::nullopt};
  if (j.contains("point") && !j.at("point").is_null()) {
    out.point = j.at("point").get<Element>();
    PointedStructure check(out.structure, *out.point);
  }
  return out;
}

LoadedStructure from_plain_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<std::size_t> size;
  std::vector<std::pair<Element, Element>> edges;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "n") {
      std::size_t n = 0;
      if (!(ls >> n)) throw ParseError("line " + std::to_string(line_no) + ": expected 'n <size>'");
      size = n;
    } else if (tag == "e") {
      Element u = 0, v = 0;
      if (!(ls >> u >> v)) throw ParseError("line " + std::to_string(line_no) + ": expected 'e <u> <v>'");
      edges.emplace_back(u, v);
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
    }
  }
  if (!size) throw ParseError("plain graph needs an 'n <size>' line");
  std::vector<std::vector<Tuple>> rels(1);
  for (auto [u, v] : edges) {
    rels[0].push_back({u, v});
    rels[0].push_back({v, u});
  }
  return {RelStructure(Signature::graph(), *size, std::move(rels)), std::nullopt};
}

json witness_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  json j = {{"id", w->id}, {"structure", structure_json(w->structure)}, {"counts", {w->count_a, w->count_b}}};
  if (w->point) j["point"] = *w->point;
  return j;
}

json pair_json(const VerificationReport& r) {
  return {{"a", r.a_id},         {"b", r.b_id},         {"logic", r.logic_verdict},
          {"agree", r.hom_vectors_agree}, {"witness", witness_json(r.witness)}, {"exhausted", r.exhausted},
          {"exhausted_at", r.exhausted_at}, {"failure", r.failure()}};
}

json spec_json(const ClassSpec& s) {
  const char* universe = s.universe == Universe::kGraph ? "graph" : s.universe == Universe::kPointed ? "pointed" : "structure";
  json j = {{"class", s.name()}, {"universe", universe}, {"min_size", s.min_size}, {"max_size", s.max_size}};
  if (s.universe != Universe::kGraph) j["signature"] = structure_json(RelStructure(s.signature, 0))["signature"];
  return j;
}

}  // namespace

PointedStructure LoadedStructure::pointed() const {
  if (!point) throw PreconditionViolation("structure has no point");
  return {structure, *point};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedStructure parse_structure(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty structure file");
  if (text[first] != '{') return from_plain_graph(text);
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("structure JSON: ") + e.what());
  }
}

LoadedStructure load_structure(const std::string& path) { return parse_structure(read_text_file(path)); }

std::string structure_to_json(const RelStructure& a, std::optional<Element> point) {
  auto j = structure_json(a);
  if (point) j["point"] = *point;
  return j.dump();
}

std::variant<ForestCover, PebbleForestCover> parse_cover(const std::string& text, const RelStructure& base) {
  try {
    auto j = json::parse(text);
    auto cover = ForestCover::make(base, j.at("parent").get<std::vector<int>>());
    if (!j.contains("pebbles")) return cover;
    auto pebbles = j.at("pebbles").get<std::vector<int>>();
    if (pebbles.size() != base.size()) throw MalformedInput("pebble array length differs from universe size");
    int k = 0;
    for (int p : pebbles) k = std::max(k, p);
    if (j.contains("k")) k = j.at("k").get<int>();
    return PebbleForestCover{std::move(cover), std::move(pebbles), k};
  } catch (const json::exception& e) {
    throw ParseError(std::string("cover JSON: ") + e.what());
  }
}

std::variant<ForestCover, PebbleForestCover> load_cover(const std::string& path, const RelStructure& base) {
  return parse_cover(read_text_file(path), base);
}

std::string cover_to_json(const ForestCover& cover) {
  return json{{"parent", cover.parent}, {"height", cover.height}}.dump();
}

std::string cover_to_json(const PebbleForestCover& cover) {
  return json{{"parent", cover.cover.parent}, {"pebbles", cover.pebbles}, {"k", cover.k}, {"height", cover.cover.height}}
      .dump();
}

std::string comonad_carrier_json(const ComonadStructure& cs) {
  return structure_to_json(cs.carrier, cs.point ? std::optional<Element>(0) : std::nullopt);
}

std::string comonad_sidecar_json(const ComonadStructure& cs) {
  json plays = json::array();
  for (const auto& p : cs.plays) {
    json moves = json::array();
    for (const auto& m : p) {
      if (cs.kind.tag == ComonadTag::kEF) moves.push_back(m.element);
      else moves.push_back({m.label, m.element});
    }
    plays.push_back(moves);
  }
  return json{{"kind", cs.kind.name()}, {"plays", plays}, {"counit", cs.counit}}.dump();
}

std::string comonad_to_json(const ComonadStructure& cs) {
  return json{{"carrier", json::parse(comonad_carrier_json(cs))}, {"sidecar", json::parse(comonad_sidecar_json(cs))}}
      .dump();
}

std::string report_to_json(const VerificationReport& report) {
  auto j = pair_json(report);
  j["seconds"] = report.seconds;
  return j.dump(2);
}

std::string sweep_to_json(const SweepReport& report) {
  json pairs = json::array();
  for (const auto& r : report.pairs) pairs.push_back(pair_json(r));
  const auto& s = report.summary;
  json j = {{"theorem", theorem_name(report.theorem)},
            {"params", {{"n", report.params.n}, {"k", report.params.k}, {"witness_cap", report.witness_cap}}},
            {"pair_universe", spec_json(report.pair_spec)},
            {"witness_class", spec_json(report.witness_spec)},
            {"pairs_listed", report.all_pairs_listed ? "all" : "anomalies"},
            {"pairs", pairs},
            {"summary",
             {{"structures", s.structures},
              {"witnesses", s.witnesses},
              {"pairs", s.pairs},
              {"agree_equivalent", s.agree_equivalent},
              {"agree_distinguished", s.agree_distinguished},
              {"exhausted", s.exhausted},
              {"failures", s.failures}}}};
  return j.dump(2);
}

}  // namespace homlab
