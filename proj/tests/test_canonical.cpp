#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "test_support.hpp"

using namespace rootfinder;
using rootfinder::testing::mixed4;
using rootfinder::testing::path;
using rootfinder::testing::random_pa_tree;
using rootfinder::testing::random_tree;
using rootfinder::testing::star;

namespace {

/// Every labeled tree on n vertices, decoded from all Pruefer sequences.
std::vector<ShapeTree> all_labeled_trees(Vertex n) {
  std::vector<ShapeTree> out;
  if (n == 2) {
    out.push_back(build_shape({{1, 2}}));
    return out;
  }
  std::vector<Vertex> seq(n - 2, 1);
  while (true) {
    std::vector<Vertex> degree(n + 1, 1);
    for (Vertex x : seq) ++degree[x];
    std::vector<Edge> edges;
    for (Vertex x : seq) {
      for (Vertex leaf = 1; leaf <= n; ++leaf) {
        if (degree[leaf] == 1) {
          edges.push_back({leaf, x});
          --degree[leaf];
          --degree[x];
          break;
        }
      }
    }
    std::vector<Vertex> last;
    for (Vertex v = 1; v <= n; ++v) {
      if (degree[v] == 1) last.push_back(v);
    }
    edges.push_back({last[0], last[1]});
    out.push_back(build_shape(edges));
    std::size_t i = seq.size();
    while (i > 0 && seq[i - 1] == n) seq[--i] = 1;
    if (i == 0) break;
    ++seq[i - 1];
  }
  return out;
}

/// Brute force: some permutation maps (a, ra) onto (b, rb) edge for edge.
bool rooted_isomorphic_brute(const ShapeTree& a, Vertex ra, const ShapeTree& b, Vertex rb) {
  const Vertex n = a.size();
  if (b.size() != n) return false;
  std::vector<Vertex> perm(n + 1);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  do {
    if (perm[ra] != rb) continue;
    bool ok = true;
    for (const auto& e : a.edges()) {
      if (b.neighbor_index(perm[e.u], perm[e.v]) == b.degree(perm[e.u])) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return false;
}

/// Size of the automorphism group of (T, root) by enumeration.
std::uint64_t rooted_automorphisms_brute(const ShapeTree& t, Vertex root) {
  const Vertex n = t.size();
  std::vector<Vertex> perm(n + 1);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::uint64_t count = 0;
  const auto edges = t.edges();
  do {
    if (perm[root] != root) continue;
    bool ok = true;
    for (const auto& e : edges) {
      if (t.neighbor_index(perm[e.u], perm[e.v]) == t.degree(perm[e.u])) {
        ok = false;
        break;
      }
    }
    count += ok ? 1 : 0;
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return count;
}

std::vector<Vertex> path_between(const ShapeTree& t, Vertex from, Vertex to) {
  const auto view = subtree_sizes(t, to);
  std::vector<Vertex> out{from};
  while (out.back() != to) out.push_back(view.parent[out.back()]);
  return out;
}

}  // namespace

TEST_CASE("canonical_code examples", "[isomorphism]") {
  const ShapeTree p3 = path(3);
  CHECK(canonical_code(p3, 1) == canonical_code(p3, 3));
  CHECK(canonical_code(p3, 1) != canonical_code(p3, 2));
  CHECK(canonical_code(p3, 1).bytes == "((()))");
  CHECK(canonical_code(p3, 2).bytes == "(()())");
  CHECK(canonical_code(star(5), 1).vertex_count() == 5);
}

TEST_CASE("canonical codes agree with brute-force rooted isomorphism", "[isomorphism][oracle]") {
  for (Vertex n : {2u, 3u, 4u, 5u}) {
    const auto trees = all_labeled_trees(n);
    CHECK(trees.size() == static_cast<std::size_t>(std::pow(n, n - 2)));
    std::vector<std::pair<const ShapeTree*, Vertex>> rooted;
    for (const auto& t : trees) {
      for (Vertex r = 1; r <= n; ++r) rooted.emplace_back(&t, r);
    }
    // Compare a stride of pairs at n = 5 to keep the permutation search small.
    const std::size_t stride = n == 5 ? 7 : 1;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < rooted.size(); i += stride) {
      for (std::size_t j = i; j < rooted.size(); j += stride) {
        const auto& [a, ra] = rooted[i];
        const auto& [b, rb] = rooted[j];
        const bool codes_equal = canonical_code(*a, ra) == canonical_code(*b, rb);
        REQUIRE(codes_equal == rooted_isomorphic_brute(*a, ra, *b, rb));
        ++checked;
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("canonical codes are invariant under relabeling", "[isomorphism][property]") {
  RngStream rng(12);
  for (int round = 0; round < 100; ++round) {
    const auto n = static_cast<Vertex>(2 + rng.below(60));
    const ShapeTree t = random_tree(n, rng);
    const auto perm = random_permutation(n, rng);
    const ShapeTree moved = relabel(t, perm);
    const Vertex r = static_cast<Vertex>(1 + rng.below(n));
    CHECK(canonical_code(t, r) == canonical_code(moved, perm[r]));
  }
}

TEST_CASE("aut_log examples", "[isomorphism]") {
  const auto s = aut_log(star(6), 1);
  CHECK(s[1] == Catch::Approx(std::lgamma(6.0)).epsilon(1e-14));
  for (Vertex v = 2; v <= 6; ++v) CHECK(s[v] == 0.0);

  const auto p = aut_log(path(7), 1);
  for (Vertex v = 1; v <= 7; ++v) CHECK(p[v] == 0.0);

  CHECK(aut_log(mixed4(), 1)[1] == 0.0);
  CHECK(aut_log(mixed4(), 4)[1] == 0.0);
  // Two leaf children and one non-leaf child: only the leaves swap.
  const ShapeTree broom = build_shape({{1, 2}, {1, 3}, {1, 4}, {4, 5}});
  CHECK(aut_log(broom, 1)[1] == Catch::Approx(std::log(2.0)));
}

TEST_CASE("product of Aut factors is the rooted automorphism group order", "[isomorphism][oracle]") {
  for (Vertex n : {3u, 4u, 5u, 6u}) {
    for (const auto& t : all_labeled_trees(n)) {
      for (Vertex r = 1; r <= n; r += 2) {
        const auto logs = aut_log(t, r);
        const double total = std::accumulate(logs.begin() + 1, logs.end(), 0.0);
        REQUIRE(std::llround(std::exp(total)) == static_cast<long long>(rooted_automorphisms_brute(t, r)));
      }
    }
  }
}

TEST_CASE("orbit_count examples", "[isomorphism]") {
  const ShapeTree p3 = path(3);
  CHECK(orbit_count(p3, 1) == 2);
  CHECK(orbit_count(p3, 2) == 1);
  CHECK(orbit_count(star(9), 4) == 8);
  CHECK(orbit_count(star(9), 1) == 1);
  CHECK_THROWS_AS(orbit_count(p3, 4), Error);
}

TEST_CASE("Aut and orbit invariants", "[isomorphism][property]") {
  RngStream rng(21);
  for (int round = 0; round < 60; ++round) {
    const auto n = static_cast<Vertex>(2 + rng.below(49));
    const ShapeTree t = round % 2 ? random_tree(n, rng) : random_pa_tree(n, rng);

    // Orbit counts over one representative per orbit sum to n.
    std::set<CanonicalCode> seen;
    Vertex total = 0;
    for (Vertex u = 1; u <= n; ++u) {
      if (seen.insert(canonical_code(t, u)).second) total += orbit_count(t, u);
    }
    CHECK(total == n);

    const auto u = static_cast<Vertex>(1 + rng.below(n));
    const auto v = static_cast<Vertex>(1 + rng.below(n));
    const auto at_u = aut_log(t, u);
    const auto at_v = aut_log(t, v);
    const auto view_u = subtree_sizes(t, u);
    const auto view_v = subtree_sizes(t, v);
    for (Vertex w = 1; w <= n; ++w) {
      const auto kids = view_u.children(t, w).size();
      CHECK(at_u[w] >= 0.0);
      CHECK(at_u[w] <= std::lgamma(static_cast<double>(kids) + 1.0) + 1e-9);
    }
    // Along the u..v path: Aut(x, (T,v)) <= |(T,v)_{x down}| * Aut(x, (T,u)).
    for (Vertex x : path_between(t, u, v)) {
      CHECK(at_v[x] <= std::log(static_cast<double>(view_v.down_size[x])) + at_u[x] + 1e-9);
    }
  }
}

TEST_CASE("rerooted all-roots analysis agrees with the naive one", "[isomorphism][property]") {
  RngStream rng(99);
  std::vector<ShapeTree> trees{path(2), path(9), path(10), star(12), mixed4()};
  for (int round = 0; round < 60; ++round) {
    const auto n = static_cast<Vertex>(2 + rng.below(300));
    trees.push_back(round % 2 ? random_tree(n, rng) : random_pa_tree(n, rng));
  }
  for (const auto& t : trees) {
    const RootAnalysis naive = analyze_roots_naive(t);
    const RootAnalysis fast = analyze_roots_rerooted(t);
    REQUIRE(naive.orbit == fast.orbit);
    for (Vertex u = 1; u <= t.size(); ++u) {
      for (Vertex w = u + 1; w <= t.size(); ++w) {
        REQUIRE((naive.root_class[u] == naive.root_class[w]) == (fast.root_class[u] == fast.root_class[w]));
      }
      REQUIRE(fast.log_aut_total[u] == Catch::Approx(naive.log_aut_total[u]).margin(1e-9).epsilon(1e-12));
    }
  }
}

TEST_CASE("orbit counts from the all-roots analysis match the code-based count", "[isomorphism]") {
  RngStream rng(5);
  for (int round = 0; round < 20; ++round) {
    const ShapeTree t = random_tree(static_cast<Vertex>(2 + rng.below(40)), rng);
    const auto roots = analyze_roots(t);
    for (Vertex u = 1; u <= t.size(); ++u) CHECK(roots.orbit[u] == orbit_count(t, u));
  }
}

TEST_CASE("large trees take the rerooted path", "[isomorphism]") {
  const ShapeTree p = path(kNaiveRootAnalysisLimit + 1);  // odd length: one center
  const auto roots = analyze_roots(p);
  const Vertex center = (p.size() + 1) / 2;
  CHECK(roots.orbit[center] == 1);
  CHECK(roots.orbit[1] == 2);
  CHECK(roots.log_aut_total[center] == Catch::Approx(std::log(2.0)));
}
