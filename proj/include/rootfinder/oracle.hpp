#pragma once

// Exact small-n ground truth: tree enumeration, closed-form embedding
// counts, exact root posteriors, and Monte Carlo validators for the tail
// inequalities used in the phi analysis.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "rootfinder/canonical.hpp"
#include "rootfinder/error.hpp"
#include "rootfinder/generators.hpp"
#include "rootfinder/rng.hpp"
#include "rootfinder/tree.hpp"

namespace rootfinder::oracle {

using ExactCount = boost::multiprecision::cpp_int;
using ExactRational = boost::multiprecision::cpp_rational;

inline ExactCount factorial(std::uint32_t k) {
  ExactCount out = 1;
  for (std::uint32_t i = 2; i <= k; ++i) out *= i;
  return out;
}

/// (2m - 1)!! = 1 * 3 * ... * (2m - 1); double_factorial_odd(0) = 1.
inline ExactCount double_factorial_odd(std::uint32_t m) {
  ExactCount out = 1;
  for (std::uint32_t i = 1; i <= m; ++i) out *= 2 * i - 1;
  return out;
}

namespace detail {

inline void check_range(std::uint32_t n, std::uint32_t max, const char* what) {
  if (n < 2) throw Error(ErrorKind::BadSize, std::string(what) + ": n must be at least 2");
  if (n > max) throw Error(ErrorKind::TooLarge, std::string(what) + ": n > " + std::to_string(max));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Enumeration

/// Streams every recursive tree on n vertices (all parent arrays with
/// parent[i] < i), (n - 1)! in total.
inline void enumerate_recursive(std::uint32_t n, const std::function<void(const GrowthTree&)>& visit) {
  detail::check_range(n, 9, "enumerate_recursive");
  std::vector<Vertex> parent(n + 1, 0);
  for (Vertex i = 2; i <= n; ++i) parent[i] = 1;
  while (true) {
    visit(GrowthTree(parent));
    Vertex i = n;
    while (i >= 2 && parent[i] == i - 1) parent[i--] = 1;
    if (i < 2) return;
    ++parent[i];
  }
}

/// Recursive tree plus a left-to-right order of every vertex's children.
struct PlaneRecursiveTree {
  std::vector<Vertex> parent;                 // parent[i] < i, slots 0 and 1 unused
  std::vector<std::vector<Vertex>> children;  // ordered children per vertex

  GrowthTree tree() const { return GrowthTree(parent); }
};

/// Streams every plane-oriented recursive tree on n vertices: vertex i is
/// inserted into one of the gaps of an existing vertex's child sequence.
/// (2n - 3)!! trees in total.
inline void enumerate_plane_recursive(std::uint32_t n, const std::function<void(const PlaneRecursiveTree&)>& visit) {
  detail::check_range(n, 8, "enumerate_plane_recursive");
  PlaneRecursiveTree t;
  t.parent.assign(n + 1, 0);
  t.children.assign(n + 1, {});
  std::function<void(Vertex)> grow = [&](Vertex i) {
    if (i > n) {
      visit(t);
      return;
    }
    for (Vertex j = 1; j < i; ++j) {
      auto& kids = t.children[j];
      for (std::size_t gap = 0; gap <= kids.size(); ++gap) {
        kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(gap), i);
        t.parent[i] = j;
        grow(i + 1);
        kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(gap));
      }
    }
  };
  grow(2);
}

/// Exact law of the degree-weighted attachment process: every growth
/// history with its probability. Each history is a distinct tree.
inline void pa_process_law(std::uint32_t n, const std::function<void(const GrowthTree&, const ExactRational&)>& visit) {
  detail::check_range(n, 9, "pa_process_law");
  std::vector<Vertex> parent(n + 1, 0);
  std::vector<std::uint32_t> degree(n + 1, 0);
  parent[2] = 1;
  degree[1] = degree[2] = 1;
  std::function<void(Vertex, const ExactRational&)> grow = [&](Vertex i, const ExactRational& p) {
    if (i > n) {
      visit(GrowthTree(parent), p);
      return;
    }
    const std::uint32_t total = 2 * (i - 2);
    for (Vertex j = 1; j < i; ++j) {
      parent[i] = j;
      ++degree[j];
      degree[i] = 1;
      grow(i + 1, p * ExactRational(degree[j] - 1, total));
      --degree[j];
      degree[i] = 0;
    }
  };
  if (n == 2) {
    visit(GrowthTree(parent), ExactRational(1));
    return;
  }
  grow(3, ExactRational(1));
}

/// Builds the rooted tree described by a canonical code; the root is vertex 1.
inline ShapeTree shape_from_code(const CanonicalCode& code) {
  std::vector<Edge> edges;
  std::vector<Vertex> stack;
  Vertex next = 0;
  for (char c : code.bytes) {
    if (c == '(') {
      ++next;
      if (!stack.empty()) edges.push_back({stack.back(), next});
      stack.push_back(next);
    } else {
      stack.pop_back();
    }
  }
  if (next == 1) throw Error(ErrorKind::BadSize, "single-vertex tree has no edge list");
  return build_shape(edges);
}

/// Every rooted unlabeled tree on n vertices, by growing each tree on n - 1
/// vertices with one leaf in every position and deduplicating by code.
inline std::set<CanonicalCode> enumerate_rooted_shapes(std::uint32_t n) {
  detail::check_range(n, 14, "enumerate_rooted_shapes");
  std::set<CanonicalCode> current{CanonicalCode{"(())"}};
  for (std::uint32_t size = 3; size <= n; ++size) {
    std::set<CanonicalCode> next;
    for (const auto& code : current) {
      const ShapeTree shape = shape_from_code(code);
      auto edges = shape.edges();
      const Vertex leaf = shape.size() + 1;
      for (Vertex v = 1; v <= shape.size(); ++v) {
        edges.push_back({v, leaf});
        next.insert(canonical_code(build_shape(edges), 1));
        edges.pop_back();
      }
    }
    current = std::move(next);
  }
  return current;
}

/// Number of recursive (or plane-oriented recursive) trees t with
/// t-degree = rooted shape, found by enumerating all of them.
using RootedCensus = std::map<CanonicalCode, ExactCount>;

inline RootedCensus census_recursive(std::uint32_t n) {
  RootedCensus out;
  enumerate_recursive(n, [&](const GrowthTree& t) { out[canonical_code(to_shape(t), 1)] += 1; });
  return out;
}

inline RootedCensus census_plane(std::uint32_t n) {
  RootedCensus out;
  enumerate_plane_recursive(n, [&](const PlaneRecursiveTree& t) { out[canonical_code(to_shape(t.tree()), 1)] += 1; });
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form counts

namespace detail {

/// prod over non-leaves v of |T_{v down}| * Aut(v, T).
inline ExactCount embedding_denominator(const ShapeTree& shape, Vertex root) {
  const RootedView view = subtree_sizes(shape, root);
  const auto groups = child_class_multiplicities(shape, root);
  ExactCount denom = 1;
  for (Vertex v = 1; v <= shape.size(); ++v) {
    if (groups[v].empty()) continue;  // leaf
    denom *= view.down_size[v];
    for (auto m : groups[v]) denom *= factorial(m);
  }
  return denom;
}

inline ExactCount exact_quotient(const ExactCount& num, const ExactCount& denom) {
  if (num % denom != 0) {
    throw Error(ErrorKind::NonIntegerResult, "count formula did not divide exactly");
  }
  return num / denom;
}

}  // namespace detail

/// Recursive trees whose rooted shape is (shape, root): n! / prod(size * Aut).
inline ExactCount embedding_count(const ShapeTree& shape, Vertex root) {
  if (shape.size() > 20) throw Error(ErrorKind::TooLarge, "embedding_count: n > 20");
  return detail::exact_quotient(factorial(shape.size()), detail::embedding_denominator(shape, root));
}

/// Plane-oriented recursive trees over (shape, root):
/// n! d(root)! prod_{v != root} (d(v) - 1)! / prod(size * Aut).
inline ExactCount embedding_count_plane(const ShapeTree& shape, Vertex root) {
  if (shape.size() > 16) throw Error(ErrorKind::TooLarge, "embedding_count_plane: n > 16");
  ExactCount num = factorial(shape.size());
  for (Vertex v = 1; v <= shape.size(); ++v) num *= factorial(v == root ? shape.degree(v) : shape.degree(v) - 1);
  return detail::exact_quotient(num, detail::embedding_denominator(shape, root));
}

// ---------------------------------------------------------------------------
// Exact posteriors

namespace detail {

inline void check_posterior_model(const ShapeTree& shape, const ModelSpec& model) {
  if (model.is_uniform()) {
    if (shape.size() > 8) throw Error(ErrorKind::TooLarge, "exact UA posterior: n > 8");
  } else if (model.is_preferential()) {
    if (shape.size() > 7) throw Error(ErrorKind::TooLarge, "exact PA posterior: n > 7");
  } else {
    throw Error(ErrorKind::UnsupportedModel, "exact posterior needs alpha in {0, 1}");
  }
}

inline std::vector<ExactRational> normalize(std::vector<ExactRational> weight) {
  ExactRational total = 0;
  for (std::size_t u = 1; u < weight.size(); ++u) total += weight[u];
  for (std::size_t u = 1; u < weight.size(); ++u) weight[u] /= total;
  return weight;
}

}  // namespace detail

/// P(u is the first vertex | shape) from the closed-form counts:
/// count(T, u) / orbit(u), normalized. PA uses the plane-oriented counts.
inline std::vector<ExactRational> exact_posterior(const ShapeTree& shape, const ModelSpec& model) {
  detail::check_posterior_model(shape, model);
  std::vector<ExactRational> weight(static_cast<std::size_t>(shape.size()) + 1, ExactRational(0));
  for (Vertex u = 1; u <= shape.size(); ++u) {
    const ExactCount count = model.is_uniform() ? embedding_count(shape, u) : embedding_count_plane(shape, u);
    weight[u] = ExactRational(count, orbit_count(shape, u));
  }
  return detail::normalize(std::move(weight));
}

/// Same posterior from a raw census of enumerated trees.
inline std::vector<ExactRational> exact_posterior_enumerated(const ShapeTree& shape, const RootedCensus& census) {
  const Vertex n = shape.size();
  std::vector<CanonicalCode> codes(static_cast<std::size_t>(n) + 1);
  for (Vertex u = 1; u <= n; ++u) codes[u] = canonical_code(shape, u);
  std::vector<ExactRational> weight(static_cast<std::size_t>(n) + 1, ExactRational(0));
  for (Vertex u = 1; u <= n; ++u) {
    std::uint32_t orbit = 0;
    for (Vertex v = 1; v <= n; ++v) orbit += codes[v] == codes[u] ? 1 : 0;
    const auto it = census.find(codes[u]);
    weight[u] = it == census.end() ? ExactRational(0) : ExactRational(it->second, orbit);
  }
  return detail::normalize(std::move(weight));
}

inline std::vector<ExactRational> exact_posterior_enumerated(const ShapeTree& shape, const ModelSpec& model) {
  detail::check_posterior_model(shape, model);
  return exact_posterior_enumerated(shape, model.is_uniform() ? census_recursive(shape.size()) : census_plane(shape.size()));
}

// ---------------------------------------------------------------------------
// Partitions

/// p(s), the number of integer partitions of s, by the coin-change recurrence.
inline ExactCount partition_count(std::uint32_t s) {
  if (s < 1) throw Error(ErrorKind::BadArgument, "partition_count: s must be positive");
  std::vector<ExactCount> p(s + 1, 0);
  p[0] = 1;
  for (std::uint32_t part = 1; part <= s; ++part) {
    for (std::uint32_t m = part; m <= s; ++m) p[m] += p[m - part];
  }
  return p[s];
}

/// Erdos' explicit form of the Hardy-Ramanujan bound: p(s) <= exp(pi sqrt(2s/3)).
inline double log_partition_bound(std::uint32_t s) {
  return std::numbers::pi * std::sqrt(2.0 * s / 3.0);
}

// ---------------------------------------------------------------------------
// Tail-bound validators

/// (j_1, ..., j_l): j_k parts of size k.
struct PartitionVector {
  std::vector<std::uint32_t> j;

  std::uint64_t weight() const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < j.size(); ++k) s += (k + 1) * static_cast<std::uint64_t>(j[k]);
    return s;
  }
};

/// Monte Carlo estimate of a probability that a proven inequality bounds.
/// Sampling can only refute a bound: the check passes when the estimate is
/// within a one-sided 3 sigma margin, sigma taken at p = bound; a bound of
/// at least 1 passes vacuously.
struct TailCheck {
  double empirical = 0.0;
  double bound = 0.0;
  double sigma = 0.0;
  std::uint64_t trials = 0;

  bool vacuous() const { return bound >= 1.0; }
  double margin() const { return bound + 3.0 * sigma; }
  bool passed() const { return vacuous() || empirical <= margin(); }
};

namespace detail {

inline TailCheck finish_check(std::uint64_t hits, std::uint64_t trials, double bound) {
  TailCheck out;
  out.trials = trials;
  out.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = bound;
  const double b = std::min(bound, 1.0);
  out.sigma = std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
  return out;
}

inline void check_trials(std::uint64_t trials) {
  if (trials < 10000) throw Error(ErrorKind::BadArgument, "tail checks need at least 10^4 trials");
}

}  // namespace detail

/// P(sum_k X_k < t) with X_k ~ Gamma(shape j_k, scale k), against
/// exp(-sqrt(s/2) log(s / (e t))). Integer shapes: X_k is k times a sum of
/// j_k unit exponentials.
inline TailCheck gamma_tail_check(const PartitionVector& parts, double t, std::uint64_t trials, RngStream& rng) {
  const auto s = parts.weight();
  if (parts.j.empty() || s < 1) throw Error(ErrorKind::BadArgument, "partition vector must have positive weight");
  if (!(t > 0.0 && t < static_cast<double>(s))) throw Error(ErrorKind::BadT, "t must lie in (0, s)");
  detail::check_trials(trials);
  std::uint64_t hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    double sum = 0.0;
    for (std::size_t k = 0; k < parts.j.size() && sum < t; ++k) {
      for (std::uint32_t i = 0; i < parts.j[k] && sum < t; ++i) sum += static_cast<double>(k + 1) * rng.exponential();
    }
    if (sum < t) ++hits;
  }
  const double sd = static_cast<double>(s);
  return detail::finish_check(hits, trials, std::exp(-std::sqrt(sd / 2.0) * std::log(sd / (std::numbers::e * t))));
}

/// One draw of X = prod_i min(E_1 + ... + E_i, 1); factors after the first
/// partial sum reaching 1 all equal 1, so the product is finite.
inline double sample_truncated_product(RngStream& rng) {
  double partial = 0.0;
  double product = 1.0;
  while (true) {
    partial += rng.exponential();
    if (partial >= 1.0) return product;
    product *= partial;
  }
}

/// P(X <= t) against 6 t^{1/4}.
inline TailCheck product_tail_check(double t, std::uint64_t trials, RngStream& rng) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::BadT, "t must lie in (0, 1)");
  detail::check_trials(trials);
  std::uint64_t hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    if (sample_truncated_product(rng) <= t) ++hits;
  }
  return detail::finish_check(hits, trials, 6.0 * std::pow(t, 0.25));
}

}  // namespace rootfinder::oracle
