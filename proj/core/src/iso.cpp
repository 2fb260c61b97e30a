#include "homlab/iso.hpp"

#include <algorithm>

namespace homlab {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finaliser applied to a running combination.
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_sorted(std::vector<std::uint64_t>& items, std::uint64_t seed) {
  std::sort(items.begin(), items.end());
  std::uint64_t h = seed;
  for (auto v : items) h = mix(h, v);
  return mix(h, items.size());
}

}  // namespace

std::vector<std::uint64_t> refined_colors(const RelStructure& a) {
  const std::size_t n = a.size();
  // Per element: (symbol, tuple) occurrences.
  std::vector<std::vector<std::pair<std::size_t, const Tuple*>>> occurs(n);
  for (std::size_t s = 0; s < a.signature().size(); ++s) {
    for (const auto& t : a.tuples(s)) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (std::find(t.begin(), t.begin() + i, t[i]) == t.begin() + i) occurs[t[i]].emplace_back(s, &t);
      }
    }
  }
  std::vector<std::uint64_t> color(n, 0x1234);
  std::size_t classes = n == 0 ? 0 : 1;
  for (std::size_t round = 0; round <= n; ++round) {
    std::vector<std::uint64_t> next(n);
    for (Element x = 0; x < n; ++x) {
      std::vector<std::uint64_t> items;
      for (auto [s, t] : occurs[x]) {
        std::uint64_t h = mix(0xabcdef, s);
        for (auto e : *t) h = mix(h, e == x ? 0x5bd1e995 : mix(color[e], 7));
        items.push_back(h);
      }
      next[x] = hash_sorted(items, color[x]);
    }
    auto distinct = next;
    std::sort(distinct.begin(), distinct.end());
    std::size_t now = static_cast<std::size_t>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    color = std::move(next);
    if (now == classes && round > 0) break;
    classes = now;
  }
  return color;
}

std::vector<std::uint64_t> iso_invariant(const RelStructure& a) {
  std::vector<std::uint64_t> inv{a.size(), a.signature().size()};
  for (const auto& rel : a.relations()) inv.push_back(rel.size());
  auto colors = refined_colors(a);
  std::sort(colors.begin(), colors.end());
  inv.insert(inv.end(), colors.begin(), colors.end());
  return inv;
}

std::optional<std::vector<Element>> iso_check(const RelStructure& a, const RelStructure& b) {
  if (a.signature() != b.signature() || a.size() != b.size()) return std::nullopt;
  for (std::size_t s = 0; s < a.signature().size(); ++s) {
    if (a.tuples(s).size() != b.tuples(s).size()) return std::nullopt;
  }
  const std::size_t n = a.size();
  auto ca = refined_colors(a);
  auto cb = refined_colors(b);
  {
    auto sa = ca, sb = cb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }

  // Tuples of `a` grouped by their largest element; they are checked once
  // that element is assigned. Equal tuple counts make preservation suffice.
  std::vector<std::vector<std::pair<std::size_t, const Tuple*>>> closing(n);
  for (std::size_t s = 0; s < a.signature().size(); ++s) {
    for (const auto& t : a.tuples(s)) closing[*std::max_element(t.begin(), t.end())].emplace_back(s, &t);
  }

  std::vector<Element> map(n);
  std::vector<bool> used(n, false);
  Tuple image;
  auto consistent = [&](Element x) {
    for (auto [s, t] : closing[x]) {
      image.resize(t->size());
      for (std::size_t i = 0; i < t->size(); ++i) image[i] = map[(*t)[i]];
      if (!b.holds(s, image)) return false;
    }
    return true;
  };
  auto search = [&](auto&& self, Element x) -> bool {
    if (x == n) return true;
    for (Element y = 0; y < n; ++y) {
      if (used[y] || ca[x] != cb[y]) continue;
      map[x] = y;
      if (!consistent(x)) continue;
      used[y] = true;
      if (self(self, x + 1)) return true;
      used[y] = false;
    }
    return false;
  };
  if (!search(search, 0)) return std::nullopt;
  return map;
}

}  // namespace homlab
