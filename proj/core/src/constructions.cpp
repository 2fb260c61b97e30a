#include "homlab/constructions.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "homlab/error.hpp"

namespace homlab {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Calls `visit` with every tuple in {0..m-1}^arity, lexicographically.
template <typename Visit>
void for_each_tuple(std::size_t m, int arity, Visit&& visit) {
  if (m == 0) return;
  Tuple t(static_cast<std::size_t>(arity), 0);
  while (true) {
    visit(t);
    int i = arity - 1;
    while (i >= 0 && t[i] + 1 == m) t[i--] = 0;
    if (i < 0) return;
    ++t[i];
  }
}

}  // namespace

std::vector<Element> canonical_blocks(std::size_t n,
                                      const std::vector<std::pair<Element, Element>>& pairs) {
  DisjointSets sets(n);
  for (auto [a, b] : pairs) sets.unite(a, b);
  std::vector<Element> block(n);
  std::vector<std::int64_t> root_block(n, -1);
  Element next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = sets.find(i);
    if (root_block[r] < 0) root_block[r] = next++;
    block[i] = static_cast<Element>(root_block[r]);
  }
  return block;
}

std::vector<std::vector<Element>> gaifman_adjacency(const RelStructure& a) {
  std::vector<std::set<Element>> adj(a.size());
  for (const auto& rel : a.relations()) {
    for (const auto& t : rel) {
      for (auto x : t) {
        for (auto y : t) {
          if (x != y) adj[x].insert(y);
        }
      }
    }
  }
  std::vector<std::vector<Element>> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
  return out;
}

RelStructure gaifman(const RelStructure& a) {
  auto adj = gaifman_adjacency(a);
  std::vector<std::vector<Tuple>> rels(1);
  for (Element x = 0; x < a.size(); ++x) {
    for (auto y : adj[x]) rels[0].push_back({x, y});
  }
  return RelStructure(Signature::graph(), a.size(), std::move(rels));
}

std::vector<std::vector<Element>> gaifman_components(const RelStructure& a) {
  std::vector<std::pair<Element, Element>> pairs;
  for (const auto& rel : a.relations()) {
    for (const auto& t : rel) {
      for (std::size_t i = 1; i < t.size(); ++i) pairs.emplace_back(t[0], t[i]);
    }
  }
  auto block = canonical_blocks(a.size(), pairs);
  std::size_t count = a.size() == 0 ? 0 : *std::max_element(block.begin(), block.end()) + 1;
  std::vector<std::vector<Element>> comps(count);
  for (Element x = 0; x < a.size(); ++x) comps[block[x]].push_back(x);
  return comps;
}

DisjointUnion disjoint_union(const RelStructure& a, const RelStructure& b) {
  require_same_signature(a, b, "disjoint_union");
  const auto shift = static_cast<Element>(a.size());
  std::vector<std::vector<Tuple>> rels(a.signature().size());
  for (std::size_t s = 0; s < rels.size(); ++s) {
    rels[s] = a.tuples(s);
    for (auto t : b.tuples(s)) {
      for (auto& e : t) e += shift;
      rels[s].push_back(std::move(t));
    }
  }
  RelStructure sum(a.signature(), a.size() + b.size(), std::move(rels));
  std::vector<Element> left(a.size()), right(b.size());
  std::iota(left.begin(), left.end(), 0);
  std::iota(right.begin(), right.end(), shift);
  return {sum, {a, sum, std::move(left)}, {b, sum, std::move(right)}};
}

Pushout pushout(const Homomorphism& f, const Homomorphism& g) {
  require_same_signature(f.source, g.source, "pushout");
  require_same_signature(f.target, g.target, "pushout");
  require_same_signature(f.source, f.target, "pushout");
  if (!(f.source == g.source)) throw PreconditionViolation("pushout: f and g need a common source");
  if (!validate_hom(f) || !validate_hom(g)) throw PreconditionViolation("pushout: invalid homomorphism");

  auto sum = disjoint_union(f.target, g.target);
  const auto shift = static_cast<Element>(f.target.size());
  std::vector<std::pair<Element, Element>> glue;
  for (Element a = 0; a < f.source.size(); ++a) glue.emplace_back(f.map[a], g.map[a] + shift);
  auto block = canonical_blocks(sum.sum.size(), glue);
  std::size_t count = sum.sum.size() == 0 ? 0 : *std::max_element(block.begin(), block.end()) + 1;
  RelStructure d = pushforward(sum.sum, block, count);

  std::vector<Element> into_left(block.begin(), block.begin() + shift);
  std::vector<Element> into_right(block.begin() + shift, block.end());
  return {d, {f.target, d, std::move(into_left)}, {g.target, d, std::move(into_right)}};
}

Factorization epi_mono_factorize(const Homomorphism& f) {
  if (!validate_hom(f)) throw PreconditionViolation("epi_mono_factorize: invalid homomorphism");
  std::vector<Element> image(f.map.begin(), f.map.end());
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  RelStructure middle = induced_substructure(f.target, image);
  std::vector<Element> onto(f.map.size());
  for (std::size_t i = 0; i < onto.size(); ++i) {
    onto[i] = static_cast<Element>(std::lower_bound(image.begin(), image.end(), f.map[i]) - image.begin());
  }
  return {{f.source, middle, std::move(onto)}, {middle, f.target, std::move(image)}};
}

std::vector<QuotientObject> enumerate_quotient_objects(const RelStructure& c, QuotientLimits limits) {
  const std::size_t n = c.size();
  if (n > limits.max_base_size) {
    throw CapExceeded("enumerate_quotient_objects: structure larger than cap");
  }
  std::vector<QuotientObject> out;

  // Restricted growth strings enumerate set partitions; rgs[i] is the block of i.
  std::vector<Element> rgs(n, 0);
  auto emit_partition = [&] {
    std::size_t blocks = n == 0 ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
    RelStructure forced = pushforward(c, rgs, blocks);

    // Tuples over the blocks that may be added freely.
    std::vector<std::pair<std::size_t, Tuple>> free;
    for (std::size_t s = 0; s < c.signature().size(); ++s) {
      for_each_tuple(blocks, c.signature()[s].arity, [&](const Tuple& t) {
        if (!forced.holds(s, t)) free.emplace_back(s, t);
      });
    }
    if (free.size() >= 40 || out.size() + (std::size_t{1} << free.size()) > limits.max_objects) {
      throw CapExceeded("enumerate_quotient_objects: too many quotient objects");
    }
    std::vector<std::vector<Element>> partition(blocks);
    for (Element x = 0; x < n; ++x) partition[rgs[x]].push_back(x);
    const bool discrete = blocks == n;

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
      auto rels = forced.relations();
      for (std::size_t i = 0; i < free.size(); ++i) {
        if (mask >> i & 1U) rels[free[i].first].push_back(free[i].second);
      }
      RelStructure codomain(c.signature(), blocks, std::move(rels));
      QuotientObject q{c, partition, codomain, {c, codomain, rgs}, false};
      q.strict = !(discrete && codomain == c);
      out.push_back(std::move(q));
    }
  };

  if (n == 0) {
    emit_partition();
    return out;
  }
  // Iterate restricted growth strings in lexicographic order.
  while (true) {
    emit_partition();
    std::int64_t i = static_cast<std::int64_t>(n) - 1;
    for (; i > 0; --i) {
      Element prefix_max = *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= prefix_max) break;
    }
    if (i <= 0) break;
    ++rgs[i];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j) rgs[j] = 0;
  }
  return out;
}

RelStructure functor_J(const RelStructure& a) {
  if (a.signature().find(kEqualitySymbol)) {
    throw PreconditionViolation("functor_J: signature already contains I");
  }
  auto rels = a.relations();
  std::vector<Tuple> diagonal;
  for (Element x = 0; x < a.size(); ++x) diagonal.push_back({x, x});
  rels.push_back(std::move(diagonal));
  return RelStructure(a.signature().with({std::string(kEqualitySymbol), 2}), a.size(), std::move(rels));
}

Collapse functor_H(const RelStructure& d) {
  if (!d.signature().has_equality_witness()) {
    throw PreconditionViolation("functor_H: signature has no binary symbol I");
  }
  std::vector<std::pair<Element, Element>> pairs;
  for (const auto& t : d.tuples(kEqualitySymbol)) pairs.emplace_back(t[0], t[1]);
  auto block = canonical_blocks(d.size(), pairs);
  std::size_t count = d.size() == 0 ? 0 : *std::max_element(block.begin(), block.end()) + 1;
  RelStructure reduct = drop_symbol(d, kEqualitySymbol);
  return {pushforward(reduct, block, count), std::move(block)};
}

}  // namespace homlab
