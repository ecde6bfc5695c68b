#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rootfinder/canonical.hpp"
#include "rootfinder/error.hpp"
#include "rootfinder/generators.hpp"
#include "rootfinder/tree.hpp"

namespace rootfinder {

enum class Estimator { Psi, Phi, Zeta, Xi };

constexpr std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Psi: return "psi";
    case Estimator::Phi: return "phi";
    case Estimator::Zeta: return "zeta";
    case Estimator::Xi: return "xi";
  }
  return "?";
}

inline Estimator parse_estimator(std::string_view name) {
  if (name == "psi") return Estimator::Psi;
  if (name == "phi") return Estimator::Phi;
  if (name == "zeta") return Estimator::Zeta;
  if (name == "xi") return Estimator::Xi;
  throw Error(ErrorKind::BadArgument, "unknown estimator '" + std::string(name) + "'");
}

/// Per-vertex scores, lower = more likely to be the first vertex.
/// psi holds integer subtree sizes; phi, zeta and xi hold natural logs.
struct ScoreVector {
  Estimator estimator = Estimator::Psi;
  std::vector<double> score;  // slot 0 unused

  Vertex size() const noexcept { return static_cast<Vertex>(score.size() - 1); }
  double operator[](Vertex v) const { return score[v]; }
};

/// Scores closer than 1e-9 relative (floored at 1 absolute) count as tied.
inline bool scores_tied(double a, double b) {
  return std::abs(a - b) < 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

inline void check_estimable(const ShapeTree& shape) {
  if (shape.size() < 2) throw Error(ErrorKind::BadSize, "estimators need at least 2 vertices");
}

/// Visits every vertex once, parents before children, starting from vertex 1;
/// `visit(parent, child, size(parent -> child))`.
template <class Visit>
void walk_splits(const ShapeTree& shape, const SplitSizes& split, Visit&& visit) {
  const Vertex n = shape.size();
  std::vector<Vertex> parent(static_cast<std::size_t>(n) + 1, 0);
  std::vector<Vertex> stack{1};
  while (!stack.empty()) {
    const Vertex p = stack.back();
    stack.pop_back();
    const auto nb = shape.neighbors(p);
    const auto sizes = split.from(p);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] == parent[p]) continue;
      parent[nb[k]] = p;
      visit(p, nb[k], sizes[k]);
      stack.push_back(nb[k]);
    }
  }
}

}  // namespace detail

/// psi(u): largest component left after deleting u.
inline ScoreVector psi_scores(const ShapeTree& shape) {
  detail::check_estimable(shape);
  const SplitSizes split = split_sizes(shape);
  ScoreVector out{Estimator::Psi, std::vector<double>(static_cast<std::size_t>(shape.size()) + 1, 0.0)};
  for (Vertex u = 1; u <= shape.size(); ++u) {
    const auto sizes = split.from(u);
    out.score[u] = *std::max_element(sizes.begin(), sizes.end());
  }
  return out;
}

/// log phi(u) = sum over v != u of log |(T,u)_{v down}|, i.e. minus the log
/// rumor centrality. One product at vertex 1, then rerooting across each
/// edge p -> c with s = size(p -> c): phi(c) = phi(p) (n - s) / s.
inline ScoreVector phi_scores(const ShapeTree& shape) {
  detail::check_estimable(shape);
  const Vertex n = shape.size();
  const SplitSizes split = split_sizes(shape);
  ScoreVector out{Estimator::Phi, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
  double at_first = 0.0;
  detail::walk_splits(shape, split, [&](Vertex, Vertex, Vertex s) { at_first += std::log(static_cast<double>(s)); });
  out.score[1] = at_first;
  detail::walk_splits(shape, split, [&](Vertex p, Vertex c, Vertex s) {
    out.score[c] = out.score[p] + std::log(static_cast<double>(n - s)) - std::log(static_cast<double>(s));
  });
  return out;
}

namespace detail {

/// log zeta(u) = log orbit(u) + log n + log phi(u) + sum_v log Aut(v, (T,u)).
/// The product over non-leaves is taken over all vertices; leaves add log 1.
inline ScoreVector zeta_from(const ShapeTree& shape, const RootAnalysis& roots) {
  ScoreVector out = phi_scores(shape);
  out.estimator = Estimator::Zeta;
  const double log_n = std::log(static_cast<double>(shape.size()));
  for (Vertex u = 1; u <= shape.size(); ++u) {
    out.score[u] += std::log(static_cast<double>(roots.orbit[u])) + log_n + roots.log_aut_total[u];
  }
  return out;
}

inline ScoreVector xi_from_zeta(const ShapeTree& shape, ScoreVector zeta) {
  zeta.estimator = Estimator::Xi;
  for (Vertex u = 1; u <= shape.size(); ++u) zeta.score[u] -= std::log(static_cast<double>(shape.degree(u)));
  return zeta;
}

}  // namespace detail

/// Exact uniform-attachment likelihood objective (log domain); the MLE minimizes it.
inline ScoreVector zeta_scores(const ShapeTree& shape) {
  detail::check_estimable(shape);
  return detail::zeta_from(shape, analyze_roots(shape));
}

/// Exact preferential-attachment objective: zeta(u) / degree(u), log domain.
inline ScoreVector xi_scores(const ShapeTree& shape) {
  detail::check_estimable(shape);
  return detail::xi_from_zeta(shape, detail::zeta_from(shape, analyze_roots(shape)));
}

inline ScoreVector compute_scores(const ShapeTree& shape, Estimator estimator) {
  switch (estimator) {
    case Estimator::Psi: return psi_scores(shape);
    case Estimator::Phi: return phi_scores(shape);
    case Estimator::Zeta: return zeta_scores(shape);
    case Estimator::Xi: return xi_scores(shape);
  }
  throw Error(ErrorKind::BadArgument, "unknown estimator");
}

struct ConfidenceSet {
  std::size_t k = 0;
  std::vector<Vertex> vertices;  // ascending score

  bool contains(Vertex v) const { return std::find(vertices.begin(), vertices.end(), v) != vertices.end(); }
};

enum class TieOrder {
  Full,            // every tie group ordered by (canonical code, label)
  MembershipOnly,  // only the group cut by the K boundary is ordered by code
};

/// The K lowest-scoring vertices. Ties (see scores_tied) are resolved by the
/// canonical code of (T,u), then by label, so the set depends on labels only
/// through the choice among rooted-isomorphic vertices.
inline ConfidenceSet select_smallest(const ShapeTree& shape, const ScoreVector& scores, std::size_t k,
                                     TieOrder tie_order = TieOrder::Full) {
  if (k < 1) throw Error(ErrorKind::BadArgument, "K must be at least 1");
  if (scores.size() != shape.size()) throw Error(ErrorKind::BadArgument, "score vector does not match tree");
  const Vertex n = shape.size();
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{1});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return scores[a] < scores[b]; });

  ConfidenceSet out;
  out.k = k;
  const std::size_t want = std::min<std::size_t>(k, n);
  out.vertices.reserve(want);
  std::vector<std::pair<CanonicalCode, Vertex>> group;
  for (std::size_t i = 0; i < n && out.vertices.size() < want;) {
    std::size_t j = i + 1;
    while (j < n && scores_tied(scores[order[j - 1]], scores[order[j]])) ++j;
    const bool cut = out.vertices.size() + (j - i) > want;
    if (j - i == 1 || (!cut && tie_order == TieOrder::MembershipOnly)) {
      std::vector<Vertex> plain(order.begin() + static_cast<std::ptrdiff_t>(i),
                                order.begin() + static_cast<std::ptrdiff_t>(j));
      std::sort(plain.begin(), plain.end());
      for (Vertex v : plain) out.vertices.push_back(v);
    } else {
      group.clear();
      for (std::size_t g = i; g < j; ++g) group.emplace_back(canonical_code(shape, order[g]), order[g]);
      std::sort(group.begin(), group.end());
      for (const auto& [code, v] : group) {
        if (out.vertices.size() == want) break;
        out.vertices.push_back(v);
      }
    }
    i = j;
  }
  return out;
}

/// P(first vertex = u | observed shape): proportional to 1/zeta (UA) or 1/xi (PA).
inline std::vector<double> root_posterior(const ShapeTree& shape, const ModelSpec& model) {
  std::optional<ScoreVector> scores;
  if (model.is_uniform()) {
    scores = zeta_scores(shape);
  } else if (model.is_preferential()) {
    scores = xi_scores(shape);
  } else {
    throw Error(ErrorKind::UnsupportedModel, "posterior is only defined for alpha in {0, 1}");
  }
  const auto& s = scores->score;
  const double best = *std::min_element(s.begin() + 1, s.end());
  std::vector<double> p(s.size(), 0.0);
  double total = 0.0;
  for (std::size_t u = 1; u < s.size(); ++u) total += p[u] = std::exp(best - s[u]);
  for (std::size_t u = 1; u < s.size(); ++u) p[u] /= total;
  return p;
}

}  // namespace rootfinder
