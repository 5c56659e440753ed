#pragma once

// Shared helpers for the unit tests. Everything here is written from first
// principles so the tests never lean on the code under test for expected
// values.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sdnpart/topology.hpp"

namespace testutil {

inline std::string node_name(int i) {
  std::string s;
  s.push_back(static_cast<char>('a' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

// Random connected graph: a random spanning tree plus extra edges.
inline sdnpart::Topology random_connected(std::mt19937_64& rng, int n, double extra_prob,
                                          long long metric_lo, long long metric_hi) {
  sdnpart::Topology topo;
  for (int i = 0; i < n; ++i) topo.add_node(node_name(i));
  std::uniform_int_distribution<long long> metric(metric_lo, metric_hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    int parent = order[pick(rng)];
    topo.add_link(topo.node(order[i]).id, topo.node(parent).id, metric(rng));
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (topo.link_between(u, v) >= 0) continue;
      if (coin(rng) < extra_prob) topo.add_link(topo.node(u).id, topo.node(v).id, metric(rng));
    }
  return topo;
}

// Bellman-Ford distances, the slow way.
inline std::vector<long long> bf_distances(const sdnpart::Topology& topo,
                                           const sdnpart::NodeMask& within, int src) {
  std::vector<long long> dist(topo.node_count(), sdnpart::kUnreachable);
  dist[src] = 0;
  for (int round = 0; round < topo.node_count(); ++round) {
    bool changed = false;
    for (const auto& l : topo.links()) {
      if (!within[l.a] || !within[l.b]) continue;
      if (dist[l.a] < sdnpart::kUnreachable && dist[l.a] + l.metric < dist[l.b]) {
        dist[l.b] = dist[l.a] + l.metric;
        changed = true;
      }
      if (dist[l.b] < sdnpart::kUnreachable && dist[l.b] + l.metric < dist[l.a]) {
        dist[l.a] = dist[l.b] + l.metric;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

// Exhaustive simple-path scan for tiny graphs: minimum cost and how many
// distinct paths achieve it.
inline void scan_paths(const sdnpart::Topology& topo, const sdnpart::NodeMask& within, int u,
                       int dst, long long cost, std::vector<char>& used, long long& best,
                       int& count) {
  if (u == dst) {
    if (cost < best) {
      best = cost;
      count = 1;
    } else if (cost == best) {
      ++count;
    }
    return;
  }
  for (const auto& [v, link] : topo.neighbors(u)) {
    if (!within[v] || used[v]) continue;
    used[v] = 1;
    scan_paths(topo, within, v, dst, cost + topo.link(link).metric, used, best, count);
    used[v] = 0;
  }
}

struct PathScan {
  long long best = sdnpart::kUnreachable;
  int count = 0;
};

inline PathScan brute_paths(const sdnpart::Topology& topo, const sdnpart::NodeMask& within,
                            int src, int dst) {
  PathScan out;
  std::vector<char> used(topo.node_count(), 0);
  used[src] = 1;
  scan_paths(topo, within, src, dst, 0, used, out.best, out.count);
  return out;
}

}  // namespace testutil
