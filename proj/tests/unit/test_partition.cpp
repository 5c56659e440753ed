#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "sdnpart/partition.hpp"
#include "util.hpp"

using namespace sdnpart;

namespace {

// Independent validity check for an assignment vector (0 = border, 1..K =
// interior of sub-domain k). Mirrors the rules, not the implementation.
bool ref_valid(const Topology& topo, const std::vector<int>& assign, int K, int max_borders) {
  int n = topo.node_count();
  int borders = 0;
  std::vector<std::vector<int>> groups(K);
  for (int v = 0; v < n; ++v) {
    if (assign[v] == 0)
      ++borders;
    else
      groups[assign[v] - 1].push_back(v);
  }
  if (borders > max_borders) return false;
  for (int k = 0; k < K; ++k)
    if (groups[k].empty()) return false;
  // no link may join two different sub-domains directly
  for (const auto& l : topo.links()) {
    int ka = assign[l.a], kb = assign[l.b];
    if (ka > 0 && kb > 0 && ka != kb) return false;
  }
  // every sub-domain stays connected through its own interior
  for (int k = 0; k < K; ++k) {
    std::vector<char> in(n, 0);
    for (int v : groups[k]) in[v] = 1;
    std::vector<int> stack = {groups[k][0]};
    std::vector<char> seen(n, 0);
    seen[groups[k][0]] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& [v, link] : topo.neighbors(u)) {
        if (!in[v] || seen[v]) continue;
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
    if (reached != static_cast<int>(groups[k].size())) return false;
  }
  return true;
}

// Best objective over every assignment, or -1 when none is valid.
long long brute_best(const Topology& topo, int K, int max_borders) {
  int n = topo.node_count();
  std::vector<int> assign(n, 0);
  long long best = -1;
  while (true) {
    if (ref_valid(topo, assign, K, max_borders)) {
      long long obj = 0;
      std::vector<int> size(K, 0);
      for (int v = 0; v < n; ++v)
        if (assign[v] > 0) ++size[assign[v] - 1];
      for (int k = 0; k < K; ++k) obj += static_cast<long long>(size[k]) * size[k];
      if (best < 0 || obj < best) best = obj;
    }
    int pos = n - 1;
    while (pos >= 0 && assign[pos] == K) assign[pos--] = 0;
    if (pos < 0) break;
    ++assign[pos];
  }
  return best;
}

long long objective_of(const Partitioning& part) {
  long long obj = 0;
  for (const auto& group : part.subdomains)
    obj += static_cast<long long>(group.size()) * group.size();
  return obj;
}

}  // namespace

// ====== secant pieces ======

TEST_CASE("secant pieces trace the squares at integers") {
  for (int max_size : {1, 3, 7, 12}) {
    auto pieces = quadratic_secant_pieces(max_size);
    REQUIRE(pieces.size() == static_cast<size_t>(max_size));
    for (int x = 0; x <= max_size; ++x) {
      long long env = 0;
      for (const auto& p : pieces) env = std::max(env, p.slope * x + p.intercept);
      CHECK(env == static_cast<long long>(x) * x);
    }
  }
}

// ====== demo instance ======

TEST_CASE("demo ring splits at the chord endpoints") {
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  Partitioning part = partition(t, 2, 2);
  REQUIRE(part.all_borders.size() == 2);
  std::set<std::string> border_ids;
  for (int b : part.all_borders) border_ids.insert(t.node(b).id);
  CHECK(border_ids == std::set<std::string>{"a", "e"});
  CHECK(part.subdomains[0].size() == 3);
  CHECK(part.subdomains[1].size() == 3);
  CHECK(objective_of(part) == brute_best(t, 2, 2));
  CHECK(validate_partitioning(t, part));
  // round trip through json
  Partitioning again = Partitioning::from_json(t, part.to_json(t));
  CHECK(again.assignment == part.assignment);
  CHECK(again.all_borders == part.all_borders);
}

TEST_CASE("derived fields are consistent with the assignment") {
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  Partitioning part = partition(t, 2, 2);
  for (int k = 0; k < part.K; ++k) {
    for (int v : part.subdomains[k]) CHECK(part.assignment[v] == k + 1);
    CHECK(std::is_sorted(part.subdomains[k].begin(), part.subdomains[k].end(),
                         [&](int a, int b) { return t.node(a).id < t.node(b).id; }));
    for (int b : part.borders[k]) {
      CHECK(part.assignment[b] == 0);
      bool adjacent = false;
      for (const auto& [v, link] : t.neighbors(b))
        if (part.assignment[v] == k + 1) adjacent = true;
      CHECK(adjacent);
    }
    NodeMask m = part.subdomain_mask(t, k);
    int inside = 0;
    for (char c : m) inside += c;
    CHECK(inside == static_cast<int>(part.subdomains[k].size() + part.borders[k].size()));
  }
}

TEST_CASE("path graph splits at its middle node") {
  Topology t;
  for (const char* id : {"a", "b", "c"}) t.add_node(id);
  t.add_link("a", "b");
  t.add_link("b", "c");
  Partitioning part = partition(t, 2, 1);
  CHECK(part.all_borders == std::vector<int>{t.index_of("b")});
  CHECK(part.subdomains[0].size() == 1);
  CHECK(part.subdomains[1].size() == 1);
}

TEST_CASE("six cycle splits antipodally") {
  Topology t;
  for (int i = 0; i < 6; ++i) t.add_node(testutil::node_name(i));
  for (int i = 0; i < 6; ++i) t.add_link(testutil::node_name(i), testutil::node_name((i + 1) % 6));
  Partitioning part = partition(t, 2, 2);
  CHECK(objective_of(part) == 8);
  REQUIRE(part.all_borders.size() == 2);
  // the two borders sit three hops apart on the ring
  int d = std::abs(part.all_borders[0] - part.all_borders[1]);
  CHECK(std::min(d, 6 - d) == 3);
}

// ====== optimality on small graphs ======

TEST_CASE("ilp matches exhaustive search on small graphs") {
  std::mt19937_64 rng(700);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    int n = 4 + static_cast<int>(rng() % 4);  // 4..7 nodes
    Topology t = testutil::random_connected(rng, n, 0.35, 10, 30);
    int K = 2 + static_cast<int>(rng() % 2);
    int max_borders = 1 + static_cast<int>(rng() % 3);
    long long want = brute_best(t, K, max_borders);
    if (want < 0) {
      CHECK_THROWS_AS(partition(t, K, max_borders), InfeasiblePartitionError);
      ++infeasible;
      continue;
    }
    Partitioning part = partition(t, K, max_borders);
    CHECK(validate_partitioning(t, part));
    CHECK(ref_valid(t, part.assignment, K, max_borders));
    CHECK(objective_of(part) == want);
    ++solved;
  }
  CHECK(solved > 15);
  CHECK(infeasible > 5);
}

TEST_CASE("size bounds remove the unbalanced optima") {
  // path of 6 interiors around one cut vertex: without bounds the best split
  // is whatever balances sizes, with tight bounds some splits vanish
  Topology t;
  for (const char* id : {"a", "b", "c", "m", "x", "y", "z"}) t.add_node(id);
  t.add_link("a", "b");
  t.add_link("b", "c");
  t.add_link("c", "m");
  t.add_link("m", "x");
  t.add_link("x", "y");
  t.add_link("y", "z");
  Partitioning part = partition(t, 2, 1);
  CHECK(objective_of(part) == 9 + 9);
  PartitionOptions opts;
  opts.size_bounds = {{1, 2}};
  CHECK_THROWS_AS(partition(t, 2, 1, opts), InfeasiblePartitionError);
  opts.size_bounds = {{2, 4}};
  Partitioning bounded = partition(t, 2, 1, opts);
  for (const auto& group : bounded.subdomains) {
    CHECK(group.size() >= 2);
    CHECK(group.size() <= 4);
  }
}

TEST_CASE("dense graphs with no separator are infeasible") {
  Topology t;
  for (const char* id : {"a", "b", "c", "d"}) t.add_node(id);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) t.add_link(t.node(i).id, t.node(j).id);
  CHECK_THROWS_AS(partition(t, 2, 1), InfeasiblePartitionError);
  CHECK_THROWS_AS(partition(t, 2, 2), InfeasiblePartitionError);
}

// ====== limit handling ======

TEST_CASE("node limit surfaces the best incumbent") {
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/janos-us-ca.txt");
  PartitionOptions opts;
  opts.limits = milp::Limits{1, 0};
  // the greedy fallback seeds the search, so even one node yields an incumbent
  try {
    Partitioning part = partition(t, 3, 8, opts);
    CHECK(validate_partitioning(t, part));  // solved at the root, fine
  } catch (const PartitionLimitError& e) {
    CHECK(e.gap >= 0);
    CHECK(validate_partitioning(t, e.best));
    CHECK(e.best.K == 3);
  }
}

// ====== validation and the greedy yardstick ======

TEST_CASE("validate_partitioning spots broken inputs") {
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  Partitioning part = partition(t, 2, 2);
  std::vector<std::string> why;

  Partitioning cross = part;
  // move one interior node into the other sub-domain, creating a direct link
  cross.assignment[part.subdomains[0][0]] = 2;
  cross.finalize(t);
  CHECK_FALSE(validate_partitioning(t, cross, &why));
  CHECK(!why.empty());

  Partitioning empty_side = part;
  for (int v : part.subdomains[1]) empty_side.assignment[v] = 0;
  empty_side.finalize(t);
  CHECK_FALSE(validate_partitioning(t, empty_side));
}

TEST_CASE("greedy baseline produces valid partitionings when it answers") {
  std::mt19937_64 rng(701);
  int produced = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Topology t = testutil::random_connected(rng, 6 + static_cast<int>(rng() % 6), 0.25, 10, 30);
    auto part = greedy_partition(t, 2, t.node_count());
    if (!part) continue;
    ++produced;
    CHECK(validate_partitioning(t, *part));
    CHECK(ref_valid(t, part->assignment, 2, t.node_count()));
  }
  CHECK(produced > 10);
}
