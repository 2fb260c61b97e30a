#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "homlab/structure.hpp"

namespace homlab::graphs {

/// Loop-free graph on n vertices with each listed edge stored in both
/// orientations of the binary symbol E.
RelStructure undirected(std::size_t n, const std::vector<std::pair<Element, Element>>& edges);
/// Directed graph with the listed arcs only.
RelStructure directed(std::size_t n, const std::vector<std::pair<Element, Element>>& arcs);

RelStructure complete(std::size_t n);
/// Cycle C_n (n >= 3).
RelStructure cycle(std::size_t n);
/// Path on n vertices.
RelStructure path(std::size_t n);
/// n isolated vertices (n·K1).
RelStructure edgeless(std::size_t n);
RelStructure star(std::size_t leaves);

/// True iff the binary symbol is symmetric and irreflexive.
bool is_simple_graph(const RelStructure& g);

}  // namespace homlab::graphs
