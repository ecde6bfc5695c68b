#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rootfinder/error.hpp"
#include "rootfinder/rng.hpp"
#include "rootfinder/tree.hpp"

namespace rootfinder {

enum class ModelKind { UniformAttachment, PreferentialAttachment, AlphaAttachment };

/// Attachment rule: a new vertex joins an existing vertex i with probability
/// proportional to degree(i)^alpha. Only alpha in {0, 1} (UA, PA) has
/// root-finding guarantees; other finite values are simulated as-is.
struct ModelSpec {
  ModelKind kind = ModelKind::UniformAttachment;
  double alpha = 0.0;

  static ModelSpec uniform() { return {ModelKind::UniformAttachment, 0.0}; }
  static ModelSpec preferential() { return {ModelKind::PreferentialAttachment, 1.0}; }
  static ModelSpec with_alpha(double a) { return {ModelKind::AlphaAttachment, a}; }

  /// UA or PA, counting AlphaAttachment with alpha 0 or 1 as the same model.
  bool is_uniform() const {
    return kind == ModelKind::UniformAttachment || (kind == ModelKind::AlphaAttachment && alpha == 0.0);
  }
  bool is_preferential() const {
    return kind == ModelKind::PreferentialAttachment || (kind == ModelKind::AlphaAttachment && alpha == 1.0);
  }

  std::string name() const {
    switch (kind) {
      case ModelKind::UniformAttachment: return "ua";
      case ModelKind::PreferentialAttachment: return "pa";
      case ModelKind::AlphaAttachment: return "alpha";
    }
    return "?";
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline ModelSpec parse_model(std::string_view name, double alpha = 0.0) {
  if (name == "ua") return ModelSpec::uniform();
  if (name == "pa") return ModelSpec::preferential();
  if (name == "alpha") {
    if (!std::isfinite(alpha)) throw Error(ErrorKind::BadArgument, "alpha must be finite");
    return ModelSpec::with_alpha(alpha);
  }
  throw Error(ErrorKind::BadArgument, "unknown model '" + std::string(name) + "'");
}

namespace detail {

inline void check_size(std::uint64_t n) {
  if (n < 2) throw Error(ErrorKind::BadSize, "tree size must be at least 2");
  if (n > 0xFFFFFFFEull) throw Error(ErrorKind::BadSize, "tree size exceeds vertex range");
}

/// Fenwick tree over positive weights with prefix-sum search.
class WeightIndex {
 public:
  explicit WeightIndex(std::size_t n) : tree_(n + 1, 0.0), weight_(n + 1, 0.0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }

  void set(std::size_t i, double w) {
    const double delta = w - weight_[i];
    weight_[i] = w;
    total_ += delta;
    for (; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  double total() const noexcept { return total_; }

  /// Smallest i with prefix(i) > target, clamped to `limit`.
  std::size_t find(double target, std::size_t limit) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos + 1, limit);
  }

 private:
  std::vector<double> tree_;
  std::vector<double> weight_;
  std::size_t top_ = 1;
  double total_ = 0.0;
};

}  // namespace detail

/// Uniform attachment: vertex i joins a uniform vertex of 1..i-1.
inline GrowthTree sample_uniform_attachment(std::uint64_t n, RngStream& rng) {
  detail::check_size(n);
  std::vector<Vertex> parent(n + 1, 0);
  for (std::uint64_t i = 2; i <= n; ++i) parent[i] = static_cast<Vertex>(1 + rng.below(i - 1));
  return GrowthTree(std::move(parent));
}

/// Preferential attachment. Every edge contributes both endpoints to a flat
/// list, so a uniform entry of the list is a degree-biased vertex.
inline GrowthTree sample_preferential_attachment(std::uint64_t n, RngStream& rng) {
  detail::check_size(n);
  std::vector<Vertex> parent(n + 1, 0);
  std::vector<Vertex> endpoints;
  endpoints.reserve(2 * (n - 1));
  parent[2] = 1;
  endpoints.push_back(2);
  endpoints.push_back(1);
  for (std::uint64_t i = 3; i <= n; ++i) {
    const Vertex target = endpoints[rng.below(endpoints.size())];
    parent[i] = target;
    endpoints.push_back(static_cast<Vertex>(i));
    endpoints.push_back(target);
  }
  return GrowthTree(std::move(parent));
}

/// Attachment with weight degree^alpha. alpha = 0 shares the uniform sampler
/// (same stream, same tree); other values go through a Fenwick index that is
/// updated exactly for the two endpoints of each new edge.
inline GrowthTree sample_alpha_attachment(std::uint64_t n, double alpha, RngStream& rng) {
  detail::check_size(n);
  if (!std::isfinite(alpha)) throw Error(ErrorKind::BadArgument, "alpha must be finite");
  if (alpha == 0.0) return sample_uniform_attachment(n, rng);

  std::vector<Vertex> parent(n + 1, 0);
  std::vector<Vertex> degree(n + 1, 0);
  detail::WeightIndex weights(n);
  parent[2] = 1;
  degree[1] = degree[2] = 1;
  weights.set(1, 1.0);
  weights.set(2, 1.0);
  for (std::uint64_t i = 3; i <= n; ++i) {
    const double target = rng.uniform() * weights.total();
    const auto j = static_cast<Vertex>(weights.find(target, i - 1));
    parent[i] = j;
    ++degree[j];
    const double w = std::pow(static_cast<double>(degree[j]), alpha);
    if (!std::isfinite(w)) {
      throw Error(ErrorKind::BadArgument, "attachment weight degree^alpha overflows a double");
    }
    weights.set(j, w);
    degree[i] = 1;
    weights.set(i, 1.0);
  }
  return GrowthTree(std::move(parent));
}

inline GrowthTree sample_tree(const ModelSpec& model, std::uint64_t n, RngStream& rng) {
  switch (model.kind) {
    case ModelKind::UniformAttachment: return sample_uniform_attachment(n, rng);
    case ModelKind::PreferentialAttachment: return sample_preferential_attachment(n, rng);
    case ModelKind::AlphaAttachment: return sample_alpha_attachment(n, model.alpha, rng);
  }
  throw Error(ErrorKind::UnsupportedModel, "unknown model kind");
}

}  // namespace rootfinder
