#pragma once

// Self-check suites behind `rootfinder verify`: each returns one report line
// per check so callers decide how to print and how to exit.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rootfinder/estimators.hpp"
#include "rootfinder/oracle.hpp"

namespace rootfinder::verify {

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline bool all_passed(const std::vector<CheckLine>& lines) {
  for (const auto& l : lines) {
    if (!l.passed) return false;
  }
  return !lines.empty();
}

inline std::string format(const CheckLine& line) {
  return line.name + ": " + (line.passed ? "PASS" : "FAIL") + (line.detail.empty() ? "" : "  (" + line.detail + ")");
}

/// Sum of closed-form counts over rooted shapes = (n-1)!, and every class
/// count equals its census from full enumeration.
inline std::vector<CheckLine> counting(std::uint32_t n_max = 7) {
  using namespace oracle;
  if (n_max < 2 || n_max > 9) throw Error(ErrorKind::BadArgument, "counting: --n-max must be in [2, 9]");
  std::vector<CheckLine> out;
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    const auto census = census_recursive(n);
    ExactCount total = 0;
    bool classes_match = true;
    const auto shapes = enumerate_rooted_shapes(n);
    for (const auto& code : shapes) {
      const ExactCount c = embedding_count(shape_from_code(code), 1);
      total += c;
      const auto it = census.find(code);
      classes_match = classes_match && it != census.end() && it->second == c;
    }
    std::ostringstream d;
    d << "n=" << n << ", classes=" << shapes.size() << ", sum=" << total;
    out.push_back({"(n−1)! check", total == factorial(n - 1), d.str()});
    out.push_back({"per-class census check", classes_match, "n=" + std::to_string(n)});
  }
  return out;
}

/// Plane-oriented analogue: sum = (2n-3)!!.
inline std::vector<CheckLine> plane_counting(std::uint32_t n_max = 6) {
  using namespace oracle;
  if (n_max < 2 || n_max > 8) throw Error(ErrorKind::BadArgument, "plane-counting: --n-max must be in [2, 8]");
  std::vector<CheckLine> out;
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    const auto census = census_plane(n);
    ExactCount total = 0;
    bool classes_match = true;
    for (const auto& code : enumerate_rooted_shapes(n)) {
      const ExactCount c = embedding_count_plane(shape_from_code(code), 1);
      total += c;
      const auto it = census.find(code);
      classes_match = classes_match && it != census.end() && it->second == c;
    }
    std::ostringstream d;
    d << "n=" << n << ", sum=" << total;
    out.push_back({"(2n−3)!! check", total == double_factorial_odd(n - 1), d.str()});
    out.push_back({"per-class plane census check", classes_match, "n=" + std::to_string(n)});
  }
  return out;
}

/// Worst |floating posterior - exact posterior| over u, and whether the
/// argmax sets agree.
struct PosteriorComparison {
  double max_error = 0.0;
  bool argmax_agrees = true;
};

inline PosteriorComparison compare_posterior(const ShapeTree& shape, const ModelSpec& model) {
  const auto approx = root_posterior(shape, model);
  const auto exact = oracle::exact_posterior(shape, model);
  PosteriorComparison out;
  oracle::ExactRational best = 0;
  for (Vertex u = 1; u <= shape.size(); ++u) best = std::max(best, exact[u]);
  double approx_best = 0.0;
  for (Vertex u = 1; u <= shape.size(); ++u) approx_best = std::max(approx_best, approx[u]);
  for (Vertex u = 1; u <= shape.size(); ++u) {
    out.max_error = std::max(out.max_error, std::abs(approx[u] - static_cast<double>(exact[u])));
    const bool exact_top = exact[u] == best;
    const bool approx_top = scores_tied(approx[u], approx_best);
    out.argmax_agrees = out.argmax_agrees && exact_top == approx_top;
  }
  return out;
}

/// Over every tree shape on n vertices: formula posterior = enumerated
/// posterior exactly, and the log-domain posterior within 1e-10.
inline std::vector<CheckLine> posterior(std::uint32_t n_max = 8) {
  using namespace oracle;
  if (n_max < 2 || n_max > 8) throw Error(ErrorKind::BadArgument, "posterior: --n-max must be in [2, 8]");
  std::vector<CheckLine> out;
  for (const ModelSpec& model : {ModelSpec::uniform(), ModelSpec::preferential()}) {
    const std::uint32_t top = model.is_uniform() ? n_max : std::min<std::uint32_t>(n_max, 7);
    for (std::uint32_t n = 2; n <= top; ++n) {
      const RootedCensus census = model.is_uniform() ? census_recursive(n) : census_plane(n);
      bool exact_match = true;
      PosteriorComparison worst;
      for (const auto& code : enumerate_rooted_shapes(n)) {
        const ShapeTree shape = shape_from_code(code);
        exact_match = exact_match && exact_posterior(shape, model) == exact_posterior_enumerated(shape, census);
        const auto cmp = compare_posterior(shape, model);
        worst.max_error = std::max(worst.max_error, cmp.max_error);
        worst.argmax_agrees = worst.argmax_agrees && cmp.argmax_agrees;
      }
      std::ostringstream d;
      d << model.name() << ", n=" << n << ", max error=" << worst.max_error;
      out.push_back({"formula vs enumeration", exact_match, model.name() + ", n=" + std::to_string(n)});
      out.push_back({"log-domain posterior", worst.max_error <= 1e-10 && worst.argmax_agrees, d.str()});
    }
  }
  return out;
}

/// p(s) <= exp(pi sqrt(2s/3)) for s = 1..s_max.
inline std::vector<CheckLine> partitions(std::uint32_t s_max = 500) {
  if (s_max < 1) throw Error(ErrorKind::BadArgument, "partitions: --n-max must be positive");
  std::uint32_t failures = 0;
  double worst_ratio = -1e300;
  for (std::uint32_t s = 1; s <= s_max; ++s) {
    const double log_p = std::log(static_cast<double>(oracle::partition_count(s)));
    const double gap = log_p - oracle::log_partition_bound(s);
    worst_ratio = std::max(worst_ratio, gap);
    failures += gap > 0.0 ? 1 : 0;
  }
  std::ostringstream d;
  d << "s<=" << s_max << ", max log(p/bound)=" << worst_ratio;
  return {{"Hardy-Ramanujan bound", failures == 0, d.str()}};
}

struct GammaPoint {
  oracle::PartitionVector parts;
  double t = 0.0;
};

/// Grid points where the Gamma tail bound is below 1.
inline std::vector<GammaPoint> default_gamma_grid() {
  return {
      {{{25}}, 5.0},          {{{2, 3}}, 1.0},   {{{10}}, 1.0},       {{{0, 5}}, 2.0},       {{{1, 1, 1}}, 1.0},
      {{{50}}, 10.0},         {{{4, 0, 2}}, 3.0}, {{{0, 0, 0, 5}}, 4.0}, {{{3, 2, 1, 1}}, 2.0}, {{{100}}, 30.0},
  };
}

inline std::string describe(const oracle::TailCheck& c) {
  std::ostringstream d;
  d << "empirical=" << c.empirical << ", bound=" << c.bound << ", 3sigma=" << 3.0 * c.sigma;
  return d.str();
}

inline std::vector<CheckLine> gamma(std::uint64_t seed, std::uint64_t trials = 100000) {
  std::vector<CheckLine> out;
  std::uint64_t stream = 0;
  for (const auto& point : default_gamma_grid()) {
    RngStream rng(seed, stream++);
    const auto check = oracle::gamma_tail_check(point.parts, point.t, trials, rng);
    std::ostringstream name;
    name << "gamma tail j=(";
    for (std::size_t k = 0; k < point.parts.j.size(); ++k) name << (k ? "," : "") << point.parts.j[k];
    name << ") t=" << point.t;
    out.push_back({name.str(), check.passed(), describe(check)});
  }
  return out;
}

inline std::vector<CheckLine> product_tail(std::uint64_t seed, std::uint64_t trials = 100000) {
  std::vector<CheckLine> out;
  std::uint64_t stream = 0;
  for (double t : {1e-2, 1e-4, 1e-6, 1e-8}) {
    RngStream rng(seed, stream++);
    const auto check = oracle::product_tail_check(t, trials, rng);
    std::ostringstream name;
    name << "product tail t=" << t;
    out.push_back({name.str(), check.passed(), describe(check)});
  }
  return out;
}

inline const std::vector<std::string_view>& suite_names() {
  static const std::vector<std::string_view> names{"counting", "plane-counting", "posterior",
                                                   "partitions", "gamma", "product-tail"};
  return names;
}

/// Runs a suite by name; n_max = 0 selects the suite default.
inline std::vector<CheckLine> run_suite(std::string_view suite, std::uint32_t n_max, std::uint64_t seed) {
  if (suite == "counting") return counting(n_max ? n_max : 7);
  if (suite == "plane-counting") return plane_counting(n_max ? n_max : 6);
  if (suite == "posterior") return posterior(n_max ? n_max : 8);
  if (suite == "partitions") return partitions(n_max ? n_max : 500);
  if (suite == "gamma") return gamma(seed);
  if (suite == "product-tail") return product_tail(seed);
  throw Error(ErrorKind::BadArgument, "unknown suite '" + std::string(suite) + "'");
}

}  // namespace rootfinder::verify
