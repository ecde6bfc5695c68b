#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rootfinder/error.hpp"
#include "rootfinder/estimators.hpp"
#include "rootfinder/generators.hpp"
#include "rootfinder/rng.hpp"
#include "rootfinder/tree.hpp"

namespace rootfinder {

/// Exact-likelihood estimators cost O(n^2); cells above this size need
/// ExperimentConfig::allow_large_exact.
inline constexpr std::uint32_t kExactEstimatorDefaultCap = 2000;

struct ExperimentConfig {
  ModelSpec model = ModelSpec::uniform();
  Estimator estimator = Estimator::Psi;
  std::uint32_t n = 2;
  std::size_t k = 1;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  bool allow_large_exact = false;
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
  if (trials == 0) return {};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * nt)) / (1 + z2 / nt);
  const double half = z * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt)) / (1 + z2 / nt);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct ExperimentResult {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  WilsonInterval ci95;
  double seconds = 0.0;
  std::vector<std::uint8_t> outcomes;  // per trial, in trial order

  double half_width() const { return (ci95.hi - ci95.lo) / 2.0; }
};

/// Runs `trial(i)` for i in [0, trials) on `jobs` threads. Outcomes land in
/// trial order, so the result does not depend on the thread count.
inline ExperimentResult run_bernoulli(std::uint64_t trials, unsigned jobs,
                                      const std::function<bool(std::uint64_t)>& trial) {
  if (trials < 1) throw Error(ErrorKind::BadArgument, "trials must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  out.trials = trials;
  out.outcomes.assign(trials, 0);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::min<std::uint64_t>(trials, 1024))));
  if (jobs == 1) {
    for (std::uint64_t i = 0; i < trials; ++i) out.outcomes[i] = trial(i) ? 1 : 0;
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::uint64_t i = w; i < trials; i += jobs) out.outcomes[i] = trial(i) ? 1 : 0;
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  for (auto o : out.outcomes) out.successes += o;
  out.rate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.ci95 = wilson_interval(out.successes, trials);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline void validate(const ExperimentConfig& config) {
  if (config.trials < 1) throw Error(ErrorKind::BadArgument, "trials must be at least 1");
  if (config.k < 1) throw Error(ErrorKind::BadArgument, "K must be at least 1");
  if (config.n < 2) throw Error(ErrorKind::BadSize, "n must be at least 2");
  const bool exact = config.estimator == Estimator::Zeta || config.estimator == Estimator::Xi;
  if (exact && config.n > kExactEstimatorDefaultCap && !config.allow_large_exact) {
    throw Error(ErrorKind::TooLarge, "zeta/xi cells are capped at n = " + std::to_string(kExactEstimatorDefaultCap));
  }
}

/// One trial: grow a tree on stream (seed, trial), hide its labels with the
/// same stream, and test whether the first vertex lands in the K-set.
inline bool run_single_trial(const ExperimentConfig& config, std::uint64_t trial) {
  RngStream rng(config.seed, trial);
  const GrowthTree tree = sample_tree(config.model, config.n, rng);
  const ObservedTree observed = forget_labels(tree, rng);
  const ScoreVector scores = compute_scores(observed.shape, config.estimator);
  return select_smallest(observed.shape, scores, config.k, TieOrder::MembershipOnly).contains(observed.true_root);
}

inline ExperimentResult run_trials(const ExperimentConfig& config, unsigned jobs = 1) {
  validate(config);
  return run_bernoulli(config.trials, jobs, [&](std::uint64_t i) { return run_single_trial(config, i); });
}

/// Frequency of the event "vertex 1 is a leaf" in sampled growth trees.
inline ExperimentResult root_leaf_frequency(const ModelSpec& model, std::uint32_t n, std::uint64_t trials,
                                            std::uint64_t seed, unsigned jobs = 1) {
  if (n < 3) throw Error(ErrorKind::BadSize, "root_leaf_frequency needs n >= 3");
  return run_bernoulli(trials, jobs, [&](std::uint64_t i) {
    RngStream rng(seed, i);
    const GrowthTree tree = sample_tree(model, n, rng);
    for (Vertex v = 2; v <= n; ++v) {
      if (tree.parent(v) == 1 && v != 2) return false;
    }
    return true;
  });
}

struct SweepRow {
  ExperimentConfig config;
  ExperimentResult result;
};

inline std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& grid, unsigned jobs = 1) {
  if (grid.empty()) throw Error(ErrorKind::BadArgument, "empty sweep grid");
  for (const auto& c : grid) validate(c);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& c : grid) rows.push_back({c, run_trials(c, jobs)});
  return rows;
}

// ---------------------------------------------------------------------------
// CSV and grid files

inline const char* kResultCsvHeader = "model,estimator,n,k,trials,successes,rate,lo95,hi95,seconds";

inline std::string model_label(const ModelSpec& m) {
  if (m.kind != ModelKind::AlphaAttachment) return m.name();
  std::ostringstream out;
  out << "alpha=" << m.alpha;
  return out.str();
}

inline void write_result_row(std::ostream& out, const ExperimentConfig& c, const ExperimentResult& r) {
  std::ostringstream line;
  line << model_label(c.model) << ',' << to_string(c.estimator) << ',' << c.n << ',' << c.k << ',' << r.trials << ','
       << r.successes << ',' << std::fixed << std::setprecision(6) << r.rate << ',' << r.ci95.lo << ',' << r.ci95.hi
       << ',' << std::setprecision(3) << r.seconds;
  out << line.str() << '\n';
}

/// Plain-text sweep grid: one "key=value[,value...]" per line, '#' comments.
/// Keys: model, alpha, estimator, n, k, trials, seed, allow_large_exact.
/// List-valued keys expand to the Cartesian product, in the order
/// model x alpha x estimator x n x k.
inline std::vector<ExperimentConfig> parse_sweep_grid(std::istream& in) {
  std::map<std::string, std::vector<std::string>> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    static const std::vector<std::string> known{"model", "alpha", "estimator", "n", "k", "trials", "seed", "allow_large_exact"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    std::vector<std::string> list;
    std::stringstream items(line.substr(eq + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty value");
      list.push_back(item);
    }
    if (list.empty()) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": missing value");
    values[key] = std::move(list);
  }
  for (const char* required : {"model", "estimator", "n", "k", "trials"}) {
    if (!values.count(required)) throw Error(ErrorKind::Parse, std::string("sweep grid is missing '") + required + "'");
  }
  auto number = [](const std::string& s, const char* key) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw Error(ErrorKind::Parse, std::string("bad integer for '") + key + "': " + s);
    return v;
  };
  auto single = [&](const char* key) -> const std::string* {
    const auto it = values.find(key);
    if (it == values.end()) return nullptr;
    if (it->second.size() != 1) throw Error(ErrorKind::Parse, std::string("'") + key + "' takes a single value");
    return &it->second.front();
  };
  const auto trials = number(*single("trials"), "trials");
  const auto* seed_text = single("seed");
  const std::uint64_t seed = seed_text ? number(*seed_text, "seed") : 0;
  const auto* large = single("allow_large_exact");
  const bool allow_large = large && (*large == "1" || *large == "true");
  std::vector<double> alphas{0.0};
  if (values.count("alpha")) {
    alphas.clear();
    for (const auto& a : values["alpha"]) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(a, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != a.size()) throw Error(ErrorKind::Parse, "bad alpha: " + a);
      alphas.push_back(v);
    }
  }

  std::vector<ExperimentConfig> grid;
  for (const auto& model : values["model"]) {
    const std::vector<double> model_alphas = model == "alpha" ? alphas : std::vector<double>{0.0};
    for (double alpha : model_alphas) {
      for (const auto& est : values["estimator"]) {
        for (const auto& n : values["n"]) {
          for (const auto& k : values["k"]) {
            ExperimentConfig c;
            c.model = parse_model(model, alpha);
            c.estimator = parse_estimator(est);
            c.n = static_cast<std::uint32_t>(number(n, "n"));
            c.k = number(k, "k");
            c.trials = trials;
            c.seed = seed;
            c.allow_large_exact = allow_large;
            grid.push_back(c);
          }
        }
      }
    }
  }
  return grid;
}

}  // namespace rootfinder
