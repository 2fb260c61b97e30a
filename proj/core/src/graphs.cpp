#include "homlab/graphs.hpp"

#include "homlab/error.hpp"

namespace homlab::graphs {

RelStructure undirected(std::size_t n, const std::vector<std::pair<Element, Element>>& edges) {
  RelStructure g(Signature::graph(), n);
  for (auto [u, v] : edges) {
    if (u == v) throw MalformedInput("undirected graphs are loop-free");
    g.add_symmetric("E", u, v);
  }
  return g;
}

RelStructure directed(std::size_t n, const std::vector<std::pair<Element, Element>>& arcs) {
  RelStructure g(Signature::graph(), n);
  for (auto [u, v] : arcs) g.add_tuple(0, {u, v});
  return g;
}

RelStructure complete(std::size_t n) {
  std::vector<std::pair<Element, Element>> edges;
  for (Element u = 0; u < n; ++u) {
    for (Element v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return undirected(n, edges);
}

RelStructure cycle(std::size_t n) {
  if (n < 3) throw MalformedInput("cycle needs at least 3 vertices");
  std::vector<std::pair<Element, Element>> edges;
  for (Element u = 0; u < n; ++u) edges.emplace_back(u, static_cast<Element>((u + 1) % n));
  return undirected(n, edges);
}

RelStructure path(std::size_t n) {
  std::vector<std::pair<Element, Element>> edges;
  for (Element u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return undirected(n, edges);
}

RelStructure edgeless(std::size_t n) { return RelStructure(Signature::graph(), n); }

RelStructure star(std::size_t leaves) {
  std::vector<std::pair<Element, Element>> edges;
  for (Element v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
  return undirected(leaves + 1, edges);
}

bool is_simple_graph(const RelStructure& g) {
  if (g.signature().size() != 1 || g.signature()[0].arity != 2) return false;
  for (const auto& t : g.tuples(0)) {
    if (t[0] == t[1]) return false;
    if (!g.holds(0, Tuple{t[1], t[0]})) return false;
  }
  return true;
}

}  // namespace homlab::graphs
