#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rootfinder/rootfinder.hpp"

namespace rootfinder::testing {

inline ShapeTree path(Vertex n) {
  std::vector<Edge> e;
  for (Vertex i = 1; i < n; ++i) e.push_back({i, i + 1});
  return build_shape(e);
}

inline ShapeTree star(Vertex n, Vertex center = 1) {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= n; ++i) {
    if (i != center) e.push_back({center, i});
  }
  return build_shape(e);
}

/// Root 1 with a leaf child 2 and a two-vertex chain 3-4.
inline ShapeTree mixed4() { return build_shape({{1, 2}, {1, 3}, {3, 4}}); }

/// Random labeled tree: a uniform recursive tree under a uniform relabeling.
inline ShapeTree random_tree(Vertex n, RngStream& rng) {
  return forget_labels(sample_uniform_attachment(n, rng), rng).shape;
}

/// Preferential-attachment shape, for more skewed degree profiles.
inline ShapeTree random_pa_tree(Vertex n, RngStream& rng) {
  return forget_labels(sample_preferential_attachment(n, rng), rng).shape;
}

/// Upper alpha-quantile of chi-square(df) by the Wilson-Hilferty approximation.
inline double chi_square_critical(double df, double z_alpha) {
  const double a = 2.0 / (9.0 * df);
  const double c = 1.0 - a + z_alpha * std::sqrt(a);
  return df * c * c * c;
}

inline double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return stat;
}

/// |observed - p| within 3 binomial standard deviations.
inline bool within_3_sigma(double observed_rate, double p, std::uint64_t trials) {
  return std::abs(observed_rate - p) <= 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

}  // namespace rootfinder::testing
