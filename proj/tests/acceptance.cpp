// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rootfinder/rootfinder.hpp"

using namespace rootfinder;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = seconds <= limit_seconds;
  const bool ok = o.passed && in_time;
  failures += ok ? 0 : 1;
  std::ostringstream line;
  line << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << " | " << o.detail << " | "
       << std::fixed << std::setprecision(1) << seconds << " s (limit " << limit_seconds << " s)"
       << (in_time ? "" : " OVER TIME LIMIT");
  std::cout << line.str() << std::endl;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentConfig cell(ModelSpec model, Estimator e, std::uint32_t n, std::size_t k, std::uint64_t trials,
                      std::uint64_t seed) {
  ExperimentConfig c;
  c.model = model;
  c.estimator = e;
  c.n = n;
  c.k = k;
  c.trials = trials;
  c.seed = seed;
  return c;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << x;
  return out.str();
}

/// log phi(u) from scratch: BFS from u, subtree sizes by reverse order.
double phi_from_scratch(const ShapeTree& t, Vertex u) {
  const Vertex n = t.size();
  std::vector<Vertex> parent(n + 1, 0), order{u}, size(n + 1, 1);
  parent[u] = u;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Vertex w : t.neighbors(order[i])) {
      if (w != parent[order[i]]) {
        parent[w] = order[i];
        order.push_back(w);
      }
    }
  }
  double total = 0.0;
  for (std::size_t i = order.size(); i-- > 1;) {
    size[parent[order[i]]] += size[order[i]];
    total += std::log(static_cast<double>(size[order[i]]));
  }
  return total;
}

struct Captured {
  int exit_code = -1;
  std::string out;
};

Captured run_cli(const std::string& args, const std::string& env = "") {
  const std::string command = env + (env.empty() ? "" : " ") + "'" + ROOTFINDER_CLI_PATH + "' " + args + " 2>/dev/null";
  Captured c;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return c;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) c.out.append(buf.data(), got);
  const int status = pclose(pipe);
  c.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

/// Drops the trailing wall-clock column of result CSV rows.
std::string mask_seconds(const std::string& text) {
  static const std::regex seconds(",[0-9]+\\.[0-9]+\n");
  return std::regex_replace(text, seconds, ",*\n");
}

}  // namespace

int main() {
  std::cout << "rootfinder acceptance run, " << jobs() << " worker thread(s)" << std::endl;

  criterion(1, "recursive-tree counts over rooted shapes sum to (n-1)!, n = 2..7", 10, [] {
    bool sums = true, classes = true;
    std::ostringstream d;
    for (std::uint32_t n = 2; n <= 7; ++n) {
      const auto census = oracle::census_recursive(n);
      oracle::ExactCount total = 0;
      for (const auto& code : oracle::enumerate_rooted_shapes(n)) {
        const auto c = oracle::embedding_count(oracle::shape_from_code(code), 1);
        total += c;
        const auto it = census.find(code);
        classes = classes && it != census.end() && it->second == c;
      }
      sums = sums && total == oracle::factorial(n - 1);
      d << (n > 2 ? " " : "") << total;
    }
    return Outcome{sums && classes, "sums " + d.str() + (classes ? ", every class matches enumeration" : ", class mismatch")};
  });

  criterion(2, "plane-oriented counts sum to (2n-3)!!, n = 2..6", 30, [] {
    bool sums = true, classes = true;
    std::ostringstream d;
    for (std::uint32_t n = 2; n <= 6; ++n) {
      const auto census = oracle::census_plane(n);
      oracle::ExactCount total = 0;
      for (const auto& code : oracle::enumerate_rooted_shapes(n)) {
        const auto c = oracle::embedding_count_plane(oracle::shape_from_code(code), 1);
        total += c;
        const auto it = census.find(code);
        classes = classes && it != census.end() && it->second == c;
      }
      sums = sums && total == oracle::double_factorial_odd(n - 1);
      d << (n > 2 ? " " : "") << total;
    }
    return Outcome{sums && classes, "sums " + d.str() + (classes ? ", every class matches enumeration" : ", class mismatch")};
  });

  criterion(3, "log-domain posterior = exact posterior on 200 UA(8) + 200 PA(7) shapes", 60, [] {
    double worst = 0.0;
    int argmax_mismatch = 0;
    for (const auto& [model, n] : {std::pair{ModelSpec::uniform(), 8u}, std::pair{ModelSpec::preferential(), 7u}}) {
      for (std::uint64_t i = 0; i < 200; ++i) {
        RngStream rng(303, i + (model.is_uniform() ? 0 : 1000));
        const ShapeTree shape = forget_labels(sample_tree(model, n, rng), rng).shape;
        const auto cmp = verify::compare_posterior(shape, model);
        worst = std::max(worst, cmp.max_error);
        argmax_mismatch += cmp.argmax_agrees ? 0 : 1;
      }
    }
    std::ostringstream d;
    d << "max |error| = " << worst << ", argmax mismatches = " << argmax_mismatch;
    return Outcome{worst <= 1e-10 && argmax_mismatch == 0, d.str()};
  });

  criterion(4, "UA, psi, K = 58, n = 10^4, 2000 trials: rate >= 0.5556 - half-width; n = 10^3 within 0.05", 300, [] {
    const auto big = run_trials(cell(ModelSpec::uniform(), Estimator::Psi, 10000, 58, 2000, 404), jobs());
    const auto small = run_trials(cell(ModelSpec::uniform(), Estimator::Psi, 1000, 58, 2000, 404), jobs());
    const double target = 1.0 - 4.0 * 0.1 / 0.9;
    const bool ok = big.rate >= target - big.half_width() && std::abs(big.rate - small.rate) < 0.05;
    return Outcome{ok, "rate(10^4) = " + fmt(big.rate) + " (target " + fmt(target) + " - " + fmt(big.half_width()) +
                           "), rate(10^3) = " + fmt(small.rate)};
  });

  criterion(5, "PA, psi, K = 200: n = 10^3 vs 10^4 differ by < 0.05, rate >= 0.8 (1000 paired trials)", 300, [] {
    const auto small = run_trials(cell(ModelSpec::preferential(), Estimator::Psi, 1000, 200, 1000, 505), jobs());
    const auto big = run_trials(cell(ModelSpec::preferential(), Estimator::Psi, 10000, 200, 1000, 505), jobs());
    const bool ok = std::abs(small.rate - big.rate) < 0.05 && small.rate >= 0.8 && big.rate >= 0.8;
    return Outcome{ok, "rate(10^3) = " + fmt(small.rate) + ", rate(10^4) = " + fmt(big.rate)};
  });

  criterion(6, "UA, n = 10^4, K = 10, 2000 paired trials: success(phi) >= success(psi) - 0.02", 300, [] {
    const auto psi = run_trials(cell(ModelSpec::uniform(), Estimator::Psi, 10000, 10, 2000, 606), jobs());
    const auto phi = run_trials(cell(ModelSpec::uniform(), Estimator::Phi, 10000, 10, 2000, 606), jobs());
    return Outcome{phi.rate >= psi.rate - 0.02, "phi = " + fmt(phi.rate) + ", psi = " + fmt(psi.rate)};
  });

  criterion(7, "root is a leaf: UA n = 50 within 3 sigma of 1/49; PA freq(100)/freq(400) in [1.6, 2.4]", 120, [] {
    const std::uint64_t trials = 100000;
    const auto ua = root_leaf_frequency(ModelSpec::uniform(), 50, trials, 707, jobs());
    const double p = 1.0 / 49.0;
    const double sigma = std::sqrt(p * (1 - p) / trials);
    const auto pa100 = root_leaf_frequency(ModelSpec::preferential(), 100, trials, 708, jobs());
    const auto pa400 = root_leaf_frequency(ModelSpec::preferential(), 400, trials, 709, jobs());
    const double ratio = pa100.rate / pa400.rate;
    const bool ok = std::abs(ua.rate - p) <= 3 * sigma && ratio >= 1.6 && ratio <= 2.4;
    return Outcome{ok, "UA freq = " + fmt(ua.rate, 5) + " vs " + fmt(p, 5) + " +- " + fmt(3 * sigma, 5) +
                           ", PA ratio = " + fmt(pa100.rate, 5) + "/" + fmt(pa400.rate, 5) + " = " + fmt(ratio, 3)};
  });

  criterion(8, "Gamma tail <= bound + 3 sigma on 10 grid points with bound < 1, 10^5 trials each", 60, [] {
    const auto lines = verify::gamma(808, 100000);
    bool ok = lines.size() == 10 && verify::all_passed(lines);
    for (const auto& point : verify::default_gamma_grid()) {
      const double s = static_cast<double>(point.parts.weight());
      ok = ok && std::exp(-std::sqrt(s / 2.0) * std::log(s / (std::numbers::e * point.t))) < 1.0;
    }
    std::size_t passed = 0;
    for (const auto& l : lines) passed += l.passed ? 1 : 0;
    return Outcome{ok, std::to_string(passed) + "/" + std::to_string(lines.size()) + " points within margin"};
  });

  criterion(9, "P(X <= t) <= 6 t^(1/4) + 3 sigma for t = 1e-2, 1e-4, 1e-6, 1e-8", 60, [] {
    const auto lines = verify::product_tail(909, 100000);
    std::ostringstream d;
    for (const auto& l : lines) d << (l.passed ? "" : "FAILED ") << l.name << " [" << l.detail << "]; ";
    return Outcome{lines.size() == 4 && verify::all_passed(lines), d.str()};
  });

  criterion(10, "p(s) <= exp(pi sqrt(2s/3)) for s <= 500", 1, [] {
    const auto lines = verify::partitions(500);
    return Outcome{verify::all_passed(lines), lines.front().detail};
  });

  criterion(11, "phi rerooting vs recomputation, label invariance, CLI reproducibility", 300, [] {
    // (a) 100 random trees, n <= 500.
    double worst = 0.0;
    RngStream rng(1111);
    for (int i = 0; i < 100; ++i) {
      const auto n = static_cast<Vertex>(2 + rng.below(499));
      const ShapeTree t = forget_labels(sample_tree(i % 2 ? ModelSpec::uniform() : ModelSpec::preferential(), n, rng), rng).shape;
      const auto phi = phi_scores(t);
      for (Vertex u = 1; u <= n; ++u) {
        const double exact = phi_from_scratch(t, u);
        worst = std::max(worst, std::abs(phi[u] - exact) / std::max(1.0, std::abs(exact)));
      }
    }
    const bool rerooting_ok = worst <= 1e-9;

    // (b) score multisets under 50 relabelings.
    bool invariant = true;
    RngStream pick(1112);
    const ShapeTree base = forget_labels(sample_preferential_attachment(300, pick), pick).shape;
    std::vector<std::vector<double>> reference;
    const std::array estimators{Estimator::Psi, Estimator::Phi, Estimator::Zeta, Estimator::Xi};
    for (Estimator e : estimators) {
      auto s = compute_scores(base, e).score;
      std::sort(s.begin() + 1, s.end());
      reference.push_back(s);
    }
    for (int r = 0; r < 50; ++r) {
      const auto perm = random_permutation(base.size(), pick);
      const ShapeTree moved = relabel(base, perm);
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        auto s = compute_scores(moved, estimators[e]).score;
        std::sort(s.begin() + 1, s.end());
        for (std::size_t i = 1; i < s.size(); ++i) invariant = invariant && scores_tied(s[i], reference[e][i]);
      }
    }

    // (c) every subcommand, twice, and with different --jobs values.
    const std::string data = ROOTFINDER_TEST_DATA;
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"generate --model pa --n 500 --seed 5", "generate --model pa --n 500 --seed 5"},
        {"generate --model alpha --alpha 1.5 --n 500 --seed 5", "generate --model alpha --alpha 1.5 --n 500 --seed 5"},
        {"score --estimator xi --k 4 --in '" + data + "/path5.txt'", "score --estimator xi --k 4 --in '" + data + "/path5.txt'"},
        {"experiment --model ua --estimator phi --n 300 --k 4 --trials 200 --seed 9 --jobs 1",
         "experiment --model ua --estimator phi --n 300 --k 4 --trials 200 --seed 9 --jobs 4"},
        {"experiment --model pa --estimator zeta --n 100 --k 2 --trials 60 --seed 9 --jobs 1",
         "experiment --model pa --estimator zeta --n 100 --k 2 --trials 60 --seed 9 --jobs 3"},
        {"sweep --config '" + data + "/grid_small.txt' --jobs 1", "sweep --config '" + data + "/grid_small.txt' --jobs 5"},
        {"verify --suite gamma --seed 4", "verify --suite gamma --seed 4"},
        {"enumerate --kind plane --n 5", "enumerate --kind plane --n 5"},
    };
    int reproducible = 0;
    for (const auto& [a, b] : pairs) {
      const auto x = run_cli(a), y = run_cli(b);
      if (x.exit_code == 0 && y.exit_code == 0 && !x.out.empty() && mask_seconds(x.out) == mask_seconds(y.out)) {
        ++reproducible;
      }
    }
    const auto env_jobs = run_cli("experiment --model ua --estimator psi --n 300 --k 4 --trials 200 --seed 9",
                                  "ROOTFINDER_JOBS=4");
    const auto serial = run_cli("experiment --model ua --estimator psi --n 300 --k 4 --trials 200 --seed 9 --jobs 1");
    const bool env_ok = env_jobs.exit_code == 0 && mask_seconds(env_jobs.out) == mask_seconds(serial.out);
    const bool cli_ok = reproducible == static_cast<int>(pairs.size()) && env_ok;

    std::ostringstream d;
    d << "phi max rel error = " << worst << ", relabel invariance " << (invariant ? "holds" : "BROKEN")
      << ", CLI reproducible " << reproducible << "/" << pairs.size() << (env_ok ? " + env jobs" : " env jobs MISMATCH");
    return Outcome{rerooting_ok && invariant && cli_ok, d.str()};
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
