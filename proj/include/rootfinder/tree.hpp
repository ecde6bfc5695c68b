#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rootfinder/error.hpp"
#include "rootfinder/rng.hpp"

namespace rootfinder {

/// Vertices are dense 1-based identifiers; slot 0 of every per-vertex array is unused.
using Vertex = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Chronologically labeled tree: vertex i > 1 was attached to parent(i) < i.
class GrowthTree {
 public:
  /// `parent` has n + 1 entries; entries 0 and 1 are ignored.
  explicit GrowthTree(std::vector<Vertex> parent) : parent_(std::move(parent)) {
    if (parent_.size() < 3) {
      throw Error(ErrorKind::BadSize, "growth tree needs at least 2 vertices");
    }
    parent_[0] = 0;
    parent_[1] = 0;
    for (std::size_t i = 2; i < parent_.size(); ++i) {
      if (parent_[i] < 1 || parent_[i] >= i) {
        throw Error(ErrorKind::BadVertex, "parent[" + std::to_string(i) + "] = " +
                                              std::to_string(parent_[i]) + " is not in 1.." +
                                              std::to_string(i - 1));
      }
    }
  }

  Vertex size() const noexcept { return static_cast<Vertex>(parent_.size() - 1); }
  Vertex parent(Vertex i) const { return parent_.at(i); }
  std::span<const Vertex> parents() const noexcept { return parent_; }

  std::vector<Vertex> degrees() const {
    std::vector<Vertex> deg(parent_.size(), 0);
    for (std::size_t i = 2; i < parent_.size(); ++i) {
      ++deg[i];
      ++deg[parent_[i]];
    }
    return deg;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(parent_.size() - 2);
    for (std::size_t i = 2; i < parent_.size(); ++i) {
      out.push_back({static_cast<Vertex>(i), parent_[i]});
    }
    return out;
  }

  friend bool operator==(const GrowthTree&, const GrowthTree&) = default;

 private:
  std::vector<Vertex> parent_;
};

class ShapeTree;
ShapeTree build_shape(std::span<const Edge> edges);

/// Unlabeled tree as observed: undirected adjacency in flat (CSR) form with
/// every neighbor list sorted ascending. Labels carry no chronological meaning.
class ShapeTree {
 public:
  Vertex size() const noexcept { return static_cast<Vertex>(offsets_.size() - 2); }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  Vertex degree(Vertex v) const noexcept {
    return static_cast<Vertex>(offsets_[v + 1] - offsets_[v]);
  }

  /// Position of v's first neighbor in the flat adjacency array.
  std::size_t slot_begin(Vertex v) const noexcept { return offsets_[v]; }
  std::size_t slot_count() const noexcept { return adjacency_.size(); }

  /// Index of `w` within neighbors(v), or degree(v) if not adjacent.
  std::size_t neighbor_index(Vertex v, Vertex w) const noexcept {
    const auto nb = neighbors(v);
    const auto it = std::lower_bound(nb.begin(), nb.end(), w);
    if (it == nb.end() || *it != w) return nb.size();
    return static_cast<std::size_t>(it - nb.begin());
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(adjacency_.size() / 2);
    for (Vertex v = 1; v <= size(); ++v) {
      for (Vertex w : neighbors(v)) {
        if (v < w) out.push_back({v, w});
      }
    }
    return out;
  }

  std::vector<Vertex> degree_sequence() const {
    std::vector<Vertex> out;
    out.reserve(size());
    for (Vertex v = 1; v <= size(); ++v) out.push_back(degree(v));
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const ShapeTree&, const ShapeTree&) = default;

 private:
  friend ShapeTree build_shape(std::span<const Edge> edges);
  ShapeTree() = default;

  std::vector<std::size_t> offsets_;  // n + 2 entries
  std::vector<Vertex> adjacency_;     // 2(n - 1) entries
};

/// Validates an edge list over vertices 1..n (n = largest identifier) and
/// builds the adjacency. Rejects self-loops, duplicate edges, and anything
/// that is not a spanning tree of 1..n.
inline ShapeTree build_shape(std::span<const Edge> edges) {
  if (edges.empty()) throw Error(ErrorKind::BadSize, "empty edge list");
  Vertex n = 0;
  for (const auto& e : edges) {
    if (e.u == 0 || e.v == 0) throw Error(ErrorKind::BadVertex, "vertex identifiers start at 1");
    if (e.u == e.v) throw Error(ErrorKind::SelfLoop, "self-loop at " + std::to_string(e.u));
    n = std::max({n, e.u, e.v});
  }

  ShapeTree t;
  t.offsets_.assign(static_cast<std::size_t>(n) + 2, 0);
  for (const auto& e : edges) {
    ++t.offsets_[e.u + 1];
    ++t.offsets_[e.v + 1];
  }
  std::partial_sum(t.offsets_.begin(), t.offsets_.end(), t.offsets_.begin());
  t.adjacency_.resize(2 * edges.size());
  std::vector<std::size_t> fill(t.offsets_.begin(), t.offsets_.end() - 1);
  for (const auto& e : edges) {
    t.adjacency_[fill[e.u]++] = e.v;
    t.adjacency_[fill[e.v]++] = e.u;
  }
  for (Vertex v = 1; v <= n; ++v) {
    auto first = t.adjacency_.begin() + static_cast<std::ptrdiff_t>(t.offsets_[v]);
    auto last = t.adjacency_.begin() + static_cast<std::ptrdiff_t>(t.offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) {
      throw Error(ErrorKind::DuplicateEdge,
                  "duplicate edge {" + std::to_string(v) + "," + std::to_string(*std::adjacent_find(first, last)) + "}");
    }
  }

  if (edges.size() != static_cast<std::size_t>(n) - 1) {
    throw Error(ErrorKind::CycleOrDisconnected, std::to_string(edges.size()) + " edges on " +
                                                    std::to_string(n) + " vertices");
  }
  // n - 1 edges: connected <=> acyclic.
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Vertex> stack{1};
  seen[1] = 1;
  Vertex reached = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : t.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorKind::CycleOrDisconnected, "graph is not connected");
  }
  return t;
}

inline ShapeTree build_shape(std::initializer_list<Edge> edges) {
  return build_shape(std::span<const Edge>(edges.begin(), edges.size()));
}

inline ShapeTree to_shape(const GrowthTree& t) {
  const auto e = t.edges();
  return build_shape(e);
}

/// Uniform permutation of 1..n; perm[i] is the new label of vertex i (perm[0] = 0).
inline std::vector<Vertex> random_permutation(Vertex n, RngStream& rng) {
  std::vector<Vertex> perm(static_cast<std::size_t>(n) + 1);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  for (Vertex i = n; i >= 2; --i) {
    const auto j = static_cast<Vertex>(1 + rng.below(i));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

inline ShapeTree relabel(const ShapeTree& shape, std::span<const Vertex> perm) {
  auto e = shape.edges();
  for (auto& edge : e) {
    edge.u = perm[edge.u];
    edge.v = perm[edge.v];
  }
  return build_shape(e);
}

struct ObservedTree {
  ShapeTree shape;
  Vertex true_root = 0;  // label carried by the first vertex
};

/// Hides the chronology of `t` behind the relabeling `perm` (perm[i] = new label of i).
inline ObservedTree forget_labels(const GrowthTree& t, std::span<const Vertex> perm) {
  if (perm.size() != static_cast<std::size_t>(t.size()) + 1) {
    throw Error(ErrorKind::BadArgument, "permutation size does not match tree");
  }
  auto e = t.edges();
  for (auto& edge : e) {
    edge.u = perm[edge.u];
    edge.v = perm[edge.v];
  }
  return {build_shape(e), perm[1]};
}

inline ObservedTree forget_labels(const GrowthTree& t, RngStream& rng) {
  const auto perm = random_permutation(t.size(), rng);
  return forget_labels(t, perm);
}

/// The tree oriented away from `root`.
struct RootedView {
  Vertex root = 0;
  std::vector<Vertex> parent;     // parent[root] = 0
  std::vector<Vertex> down_size;  // |(T,root)_{v down}|
  std::vector<Vertex> order;      // breadth-first: parents precede children

  Vertex size() const noexcept { return static_cast<Vertex>(order.size()); }
  bool is_leaf(const ShapeTree& shape, Vertex v) const noexcept {
    return v == root ? shape.degree(v) == 0 : shape.degree(v) == 1;
  }

  std::vector<Vertex> children(const ShapeTree& shape, Vertex v) const {
    std::vector<Vertex> out;
    for (Vertex w : shape.neighbors(v)) {
      if (w != parent[v]) out.push_back(w);
    }
    return out;
  }

  std::vector<Vertex> leaves(const ShapeTree& shape) const {
    std::vector<Vertex> out;
    for (Vertex v : order) {
      if (is_leaf(shape, v)) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline RootedView subtree_sizes(const ShapeTree& shape, Vertex root) {
  const Vertex n = shape.size();
  if (root < 1 || root > n) throw Error(ErrorKind::BadVertex, "root out of range");
  RootedView view;
  view.root = root;
  view.parent.assign(static_cast<std::size_t>(n) + 1, 0);
  view.down_size.assign(static_cast<std::size_t>(n) + 1, 1);
  view.order.reserve(n);
  view.order.push_back(root);
  for (std::size_t head = 0; head < view.order.size(); ++head) {
    const Vertex v = view.order[head];
    for (Vertex w : shape.neighbors(v)) {
      if (w != view.parent[v]) {
        view.parent[w] = v;
        view.order.push_back(w);
      }
    }
  }
  view.down_size[0] = 0;
  for (auto it = view.order.rbegin(); it != view.order.rend(); ++it) {
    if (*it != root) view.down_size[view.parent[*it]] += view.down_size[*it];
  }
  return view;
}

/// size(u -> v) = |component of v in T minus u| for every ordered edge,
/// stored parallel to the flat adjacency of the shape.
class SplitSizes {
 public:
  SplitSizes(const ShapeTree& shape, std::vector<Vertex> sizes)
      : n_(shape.size()), offsets_(static_cast<std::size_t>(n_) + 2), sizes_(std::move(sizes)) {
    for (Vertex v = 1; v <= n_ + 1; ++v) offsets_[v] = v <= n_ ? shape.slot_begin(v) : sizes_.size();
  }

  Vertex tree_size() const noexcept { return n_; }

  /// Sizes toward each neighbor of u, in the order of shape.neighbors(u).
  std::span<const Vertex> from(Vertex u) const noexcept {
    return {sizes_.data() + offsets_[u], sizes_.data() + offsets_[u + 1]};
  }

 private:
  Vertex n_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> sizes_;
};

inline SplitSizes split_sizes(const ShapeTree& shape) {
  const Vertex n = shape.size();
  const RootedView view = subtree_sizes(shape, 1);
  std::vector<Vertex> sizes(shape.slot_count());
  for (Vertex u = 1; u <= n; ++u) {
    const auto nb = shape.neighbors(u);
    const std::size_t base = shape.slot_begin(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      sizes[base + k] = nb[k] == view.parent[u] ? n - view.down_size[u] : view.down_size[nb[k]];
    }
  }
  return SplitSizes(shape, std::move(sizes));
}

}  // namespace rootfinder
