#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rootfinder/error.hpp"
#include "rootfinder/tree.hpp"

namespace rootfinder {

/// log(k!) for k = 0..max, by cumulative summation.
class LogFactorials {
 public:
  explicit LogFactorials(std::size_t max = 0) : table_{0.0} { reserve(max); }

  void reserve(std::size_t max) {
    while (table_.size() <= max) {
      table_.push_back(table_.back() + std::log(static_cast<double>(table_.size())));
    }
  }

  double operator()(std::size_t k) const { return table_.at(k); }

 private:
  std::vector<double> table_;
};

/// AHU encoding of a rooted tree: "(" + sorted child encodings + ")".
/// Exact: two rooted trees are isomorphic iff their codes are equal, and
/// the byte order of codes is a labeling-independent total order.
struct CanonicalCode {
  std::string bytes;

  std::size_t vertex_count() const noexcept { return bytes.size() / 2; }
  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
  friend bool operator==(const CanonicalCode&, const CanonicalCode&) = default;
};

inline CanonicalCode canonical_code(const ShapeTree& shape, Vertex root) {
  const RootedView view = subtree_sizes(shape, root);
  std::vector<std::string> code(static_cast<std::size_t>(shape.size()) + 1);
  std::vector<std::string> parts;
  for (auto it = view.order.rbegin(); it != view.order.rend(); ++it) {
    const Vertex v = *it;
    parts.clear();
    std::size_t length = 2;
    for (Vertex w : shape.neighbors(v)) {
      if (w == view.parent[v]) continue;
      length += code[w].size();
      parts.push_back(std::move(code[w]));
      code[w].clear();
      code[w].shrink_to_fit();
    }
    std::sort(parts.begin(), parts.end());
    std::string& out = code[v];
    out.reserve(length);
    out.push_back('(');
    for (const auto& p : parts) out += p;
    out.push_back(')');
  }
  return {std::move(code[root])};
}

/// Dense ids for rooted isomorphism classes, keyed by the sorted multiset of
/// child class ids. Ids are comparable only within one interner.
class ClassInterner {
 public:
  using Key = std::vector<std::uint32_t>;

  std::uint32_t intern(const Key& sorted_children) {
    const auto it = ids_.find(sorted_children);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(ids_.size());
    ids_.emplace(sorted_children, id);
    return id;
  }

  std::size_t size() const noexcept { return ids_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept {
      std::uint64_t h = 0xCBF29CE484222325ULL ^ key.size();
      for (auto x : key) h = splitmix64(h ^ x);
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<Key, std::uint32_t, KeyHash> ids_;
};

namespace detail {

/// Visits the vertices of `view` bottom-up, assigning class ids and passing
/// each vertex with the sorted class ids of its children.
template <class Visit>
std::vector<std::uint32_t> classify_rooted(const ShapeTree& shape, const RootedView& view,
                                           ClassInterner& interner, Visit&& visit) {
  std::vector<std::uint32_t> class_id(static_cast<std::size_t>(shape.size()) + 1, 0);
  ClassInterner::Key key;
  for (auto it = view.order.rbegin(); it != view.order.rend(); ++it) {
    const Vertex v = *it;
    key.clear();
    for (Vertex w : shape.neighbors(v)) {
      if (w != view.parent[v]) key.push_back(class_id[w]);
    }
    std::sort(key.begin(), key.end());
    class_id[v] = interner.intern(key);
    visit(v, key);
  }
  return class_id;
}

/// Sum of log(m!) over the runs of equal values in a sorted key.
inline double log_aut_of_sorted(const ClassInterner::Key& key, const LogFactorials& lf) {
  double total = 0.0;
  for (std::size_t i = 0; i < key.size();) {
    std::size_t j = i + 1;
    while (j < key.size() && key[j] == key[i]) ++j;
    if (j - i > 1) total += lf(j - i);
    i = j;
  }
  return total;
}

}  // namespace detail

/// Multiplicities l_1..l_L of the isomorphism classes among v's children in (T, root).
inline std::vector<std::vector<std::uint32_t>> child_class_multiplicities(const ShapeTree& shape, Vertex root) {
  const RootedView view = subtree_sizes(shape, root);
  ClassInterner interner;
  std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(shape.size()) + 1);
  detail::classify_rooted(shape, view, interner, [&](Vertex v, const ClassInterner::Key& key) {
    for (std::size_t i = 0; i < key.size();) {
      std::size_t j = i + 1;
      while (j < key.size() && key[j] == key[i]) ++j;
      out[v].push_back(static_cast<std::uint32_t>(j - i));
      i = j;
    }
  });
  return out;
}

/// log Aut(v, (T, root)) for every vertex v (slot 0 unused).
inline std::vector<double> aut_log(const ShapeTree& shape, Vertex root) {
  const RootedView view = subtree_sizes(shape, root);
  LogFactorials lf(shape.size());
  ClassInterner interner;
  std::vector<double> out(static_cast<std::size_t>(shape.size()) + 1, 0.0);
  detail::classify_rooted(shape, view, interner, [&](Vertex v, const ClassInterner::Key& key) {
    out[v] = detail::log_aut_of_sorted(key, lf);
  });
  return out;
}

/// Per-root quantities needed by the exact likelihoods.
struct RootAnalysis {
  std::vector<std::uint32_t> root_class;  // class of (T,u); equal ids <=> isomorphic
  std::vector<std::uint32_t> orbit;       // number of v with (T,v) isomorphic to (T,u)
  std::vector<double> log_aut_total;      // sum over v of log Aut(v, (T,u))
};

namespace detail {

inline std::vector<std::uint32_t> orbits_from_classes(const std::vector<std::uint32_t>& root_class) {
  std::unordered_map<std::uint32_t, std::uint32_t> count;
  for (std::size_t u = 1; u < root_class.size(); ++u) ++count[root_class[u]];
  std::vector<std::uint32_t> orbit(root_class.size(), 0);
  for (std::size_t u = 1; u < root_class.size(); ++u) orbit[u] = count[root_class[u]];
  return orbit;
}

}  // namespace detail

/// Re-roots at every vertex and classifies from scratch: n bottom-up passes.
inline RootAnalysis analyze_roots_naive(const ShapeTree& shape) {
  const Vertex n = shape.size();
  LogFactorials lf(n);
  ClassInterner interner;
  RootAnalysis out;
  out.root_class.assign(static_cast<std::size_t>(n) + 1, 0);
  out.log_aut_total.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (Vertex u = 1; u <= n; ++u) {
    const RootedView view = subtree_sizes(shape, u);
    double total = 0.0;
    const auto cls = detail::classify_rooted(shape, view, interner, [&](Vertex, const ClassInterner::Key& key) {
      total += detail::log_aut_of_sorted(key, lf);
    });
    out.root_class[u] = cls[u];
    out.log_aut_total[u] = total;
  }
  out.orbit = detail::orbits_from_classes(out.root_class);
  return out;
}

/// All-roots analysis in one down pass and one up pass over directed edges.
/// Class of the directed edge u->w is the class of the component of w in
/// T minus u, rooted at w; every rooted subtree of every rerooting is one of
/// these, so a single interner covers all roots.
inline RootAnalysis analyze_roots_rerooted(const ShapeTree& shape) {
  const Vertex n = shape.size();
  LogFactorials lf(n);
  ClassInterner interner;
  const RootedView view = subtree_sizes(shape, 1);
  std::vector<std::uint32_t> edge_class(shape.slot_count(), 0);
  auto slot_of = [&](Vertex u, Vertex w) { return shape.slot_begin(u) + shape.neighbor_index(u, w); };

  ClassInterner::Key key;
  for (auto it = view.order.rbegin(); it != view.order.rend(); ++it) {
    const Vertex v = *it;
    if (v == view.root) continue;
    key.clear();
    for (Vertex w : shape.neighbors(v)) {
      if (w != view.parent[v]) key.push_back(edge_class[slot_of(v, w)]);
    }
    std::sort(key.begin(), key.end());
    edge_class[slot_of(view.parent[v], v)] = interner.intern(key);
  }

  // Full sorted out-edge multiset per vertex, built in BFS order so the
  // edge toward the parent is known before it is needed.
  RootAnalysis out;
  out.root_class.assign(static_cast<std::size_t>(n) + 1, 0);
  std::vector<double> full_aut(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<std::vector<std::uint32_t>> sorted_out(static_cast<std::size_t>(n) + 1);
  for (Vertex v : view.order) {
    const auto nb = shape.neighbors(v);
    auto& all = sorted_out[v];
    all.assign(edge_class.begin() + static_cast<std::ptrdiff_t>(shape.slot_begin(v)),
               edge_class.begin() + static_cast<std::ptrdiff_t>(shape.slot_begin(v) + nb.size()));
    std::sort(all.begin(), all.end());
    out.root_class[v] = interner.intern(all);
    full_aut[v] = detail::log_aut_of_sorted(all, lf);

    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i + 1;
      while (j < all.size() && all[j] == all[i]) ++j;
      const std::uint32_t x = all[i];
      bool has_child = false;
      for (Vertex c : nb) has_child |= c != view.parent[v] && edge_class[slot_of(v, c)] == x;
      if (has_child) {
        key.assign(all.begin(), all.end());
        key.erase(key.begin() + static_cast<std::ptrdiff_t>(i));
        const std::uint32_t up = interner.intern(key);
        for (Vertex c : nb) {
          if (c != view.parent[v] && edge_class[slot_of(v, c)] == x) edge_class[slot_of(c, v)] = up;
        }
      }
      i = j;
    }
  }

  // log Aut(v) with v's parent edge excluded: drop one member of its group.
  auto multiplicity = [&](Vertex v, std::uint32_t x) {
    const auto& all = sorted_out[v];
    const auto range = std::equal_range(all.begin(), all.end(), x);
    return static_cast<std::size_t>(range.second - range.first);
  };
  auto aut_excluding = [&](Vertex v, Vertex excluded) {
    return full_aut[v] - std::log(static_cast<double>(multiplicity(v, edge_class[slot_of(v, excluded)])));
  };

  out.log_aut_total.assign(static_cast<std::size_t>(n) + 1, 0.0);
  double total = full_aut[view.root];
  for (Vertex v : view.order) {
    if (v != view.root) total += aut_excluding(v, view.parent[v]);
  }
  out.log_aut_total[view.root] = total;
  for (Vertex c : view.order) {
    if (c == view.root) continue;
    const Vertex p = view.parent[c];
    out.log_aut_total[c] = out.log_aut_total[p] - full_aut[p] - aut_excluding(c, p) + full_aut[c] +
                           aut_excluding(p, c);
  }
  out.orbit = detail::orbits_from_classes(out.root_class);
  return out;
}

/// Trees up to this size use the naive all-roots path.
inline constexpr Vertex kNaiveRootAnalysisLimit = 5000;

inline RootAnalysis analyze_roots(const ShapeTree& shape) {
  return shape.size() <= kNaiveRootAnalysisLimit ? analyze_roots_naive(shape) : analyze_roots_rerooted(shape);
}

/// Number of vertices v with (T,v) isomorphic to (T,u).
inline std::uint32_t orbit_count(const ShapeTree& shape, Vertex u) {
  if (u < 1 || u > shape.size()) throw Error(ErrorKind::BadVertex, "vertex out of range");
  const CanonicalCode target = canonical_code(shape, u);
  std::uint32_t count = 0;
  for (Vertex v = 1; v <= shape.size(); ++v) {
    if (shape.degree(v) == shape.degree(u) && canonical_code(shape, v) == target) ++count;
  }
  return count;
}

}  // namespace rootfinder
