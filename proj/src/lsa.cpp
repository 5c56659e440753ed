#include "sdnpart/lsa.hpp"

#include <algorithm>
#include <cassert>

#include "json.hpp"
#include "sdnpart/partition.hpp"

namespace sdnpart {

long long delta_max(const DeltaMatrix& delta) {
  long long lo = kUnreachable, hi = -kUnreachable;
  for (const auto& row : delta)
    for (long long v : row) {
      if (v >= kUnreachable) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi < lo) return 0;
  return hi - lo;
}

std::optional<ExitVector> exit_vector(const DeltaMatrix& delta, const MetricVector& m,
                                      TieInfo* tie) {
  ExitVector out(delta.size(), -1);
  for (int r = 0; r < static_cast<int>(delta.size()); ++r) {
    const auto& row = delta[r];
    if (row.size() != m.size()) throw TopologyError("metric vector length mismatch");
    long long best = kUnreachable;
    int arg = -1;
    bool tied = false;
    for (int b = 0; b < static_cast<int>(row.size()); ++b) {
      if (row[b] >= kUnreachable) continue;
      long long total = row[b] + m[b];
      if (total < best) {
        best = total;
        arg = b;
        tied = false;
      } else if (total == best) {
        tied = true;
      }
    }
    if (arg < 0) throw TopologyError("node row " + std::to_string(r) + " reaches no border");
    if (tied) {
      if (tie) {
        tie->node = r;
        tie->borders.clear();
        for (int b = 0; b < static_cast<int>(row.size()); ++b)
          if (row[b] < kUnreachable && row[b] + m[b] == best) tie->borders.push_back(b);
      }
      return std::nullopt;
    }
    out[r] = arg;
  }
  return out;
}

QuantityVector quantity_vector(const ExitVector& exits, int beta) {
  QuantityVector q(beta, 0);
  for (int e : exits) {
    if (e < 0 || e >= beta) throw TopologyError("exit position out of range");
    ++q[e];
  }
  return q;
}

unsigned long long count_bound(int alpha, int beta) {
  if (alpha < 0 || beta < 0) throw OverflowError("count_bound arguments must be nonnegative");
  if (beta == 0) return alpha == 0 ? 1 : 0;
  // binomial(beta + alpha - 1, alpha)
  unsigned long long n = static_cast<unsigned long long>(beta) + alpha - 1;
  unsigned long long k = alpha;
  if (k > n - k) k = n - k;
  unsigned __int128 res = 1;
  for (unsigned long long i = 1; i <= k; ++i) {
    res = res * (n - k + i) / i;
    if (res > std::numeric_limits<unsigned long long>::max())
      throw OverflowError("count_bound overflows 64 bits");
  }
  return static_cast<unsigned long long>(res);
}

// ====== difference constraint systems ======

namespace {

struct DiffEdge {
  int from = -1;  // metric index, or ground node beta
  int to = -1;
  long long weight = 0;
};

// Edges encoding "exiting through e beats every other border at row r":
// m[e] - m[b] <= delta[r][b] - delta[r][e] - 1.
void row_edges(const DeltaMatrix& delta, int r, int exit, std::vector<DiffEdge>& edges,
               bool* impossible) {
  const auto& row = delta[r];
  if (row[exit] >= kUnreachable) {
    *impossible = true;
    return;
  }
  for (int b = 0; b < static_cast<int>(row.size()); ++b) {
    if (b == exit || row[b] >= kUnreachable) continue;
    edges.push_back({b, exit, row[b] - row[exit] - 1});
  }
}

// Bellman-Ford potentials from a zero super source. Returns false on a
// negative cycle, otherwise fills pot (size = node_count).
bool potentials(int node_count, const std::vector<DiffEdge>& edges,
                std::vector<long long>* pot) {
  std::vector<long long> d(node_count, 0);
  for (int round = 0; round < node_count; ++round) {
    bool changed = false;
    for (const auto& e : edges) {
      if (d[e.from] + e.weight < d[e.to]) {
        d[e.to] = d[e.from] + e.weight;
        changed = true;
      }
    }
    if (!changed) break;
    if (round == node_count - 1) return false;
  }
  if (pot) *pot = std::move(d);
  return true;
}

MetricVector witness_from(const std::vector<long long>& pot, int beta) {
  long long lo = 0;
  for (int b = 0; b < beta; ++b) lo = std::min(lo, pot[b]);
  MetricVector m(beta);
  for (int b = 0; b < beta; ++b) m[b] = pot[b] - lo;
  return m;
}

}  // namespace

bool exit_vector_feasible(const DeltaMatrix& delta, const ExitVector& exits,
                          MetricVector* witness) {
  int beta = delta.empty() ? 0 : static_cast<int>(delta[0].size());
  std::vector<DiffEdge> edges;
  bool impossible = false;
  for (int r = 0; r < static_cast<int>(delta.size()); ++r) {
    row_edges(delta, r, exits.at(r), edges, &impossible);
    if (impossible) return false;
  }
  std::vector<long long> pot;
  if (!potentials(beta, edges, witness ? &pot : nullptr)) return false;
  if (witness) *witness = witness_from(pot, beta);
  return true;
}

bool exit_vector_feasible_fixed(const DeltaMatrix& delta, const ExitVector& exits,
                                const std::vector<long long>& fixed, MetricVector* witness) {
  int beta = delta.empty() ? static_cast<int>(fixed.size()) : static_cast<int>(delta[0].size());
  int ground = beta;
  std::vector<DiffEdge> edges;
  bool impossible = false;
  for (int r = 0; r < static_cast<int>(delta.size()); ++r) {
    row_edges(delta, r, exits.at(r), edges, &impossible);
    if (impossible) return false;
  }
  for (int b = 0; b < beta; ++b) {
    edges.push_back({b, ground, 0});  // m[b] >= 0
    if (b < static_cast<int>(fixed.size()) && fixed[b] >= 0) {
      edges.push_back({ground, b, fixed[b]});
      edges.push_back({b, ground, -fixed[b]});
    }
  }
  std::vector<long long> pot;
  if (!potentials(beta + 1, edges, &pot)) return false;
  if (witness) {
    witness->assign(beta, 0);
    for (int b = 0; b < beta; ++b) (*witness)[b] = pot[b] - pot[ground];
  }
  return true;
}

// ====== advertisement space enumeration ======

SubdomainAdvertisementSpace enumerate_metric_vectors(const DeltaMatrix& delta) {
  SubdomainAdvertisementSpace space;
  space.distances = delta;
  space.delta_max = delta_max(delta);
  int alpha = static_cast<int>(delta.size());
  int beta = alpha == 0 ? 0 : static_cast<int>(delta[0].size());
  for (const auto& row : delta)
    if (static_cast<int>(row.size()) != beta) throw TopologyError("ragged delta matrix");
  if (alpha == 0) {
    space.vectors.push_back({MetricVector(beta, 0), {}, QuantityVector(beta, 0)});
    return space;
  }
  if (beta == 0) return space;

  ExitVector exits(alpha, -1);
  std::vector<DiffEdge> edges;
  std::vector<std::size_t> edge_mark;

  auto dfs = [&](auto&& self, int r) -> void {
    if (r == alpha) {
      std::vector<long long> pot;
      bool ok = potentials(beta, edges, &pot);
      assert(ok);
      (void)ok;
      AdvEntry entry;
      entry.metrics = witness_from(pot, beta);
      entry.exits = exits;
      entry.counts = quantity_vector(exits, beta);
      space.vectors.push_back(std::move(entry));
      return;
    }
    for (int b = 0; b < beta; ++b) {
      if (delta[r][b] >= kUnreachable) continue;
      edge_mark.push_back(edges.size());
      bool impossible = false;
      row_edges(delta, r, b, edges, &impossible);
      if (!impossible && potentials(beta, edges, nullptr)) {
        exits[r] = b;
        self(self, r + 1);
        exits[r] = -1;
      }
      edges.resize(edge_mark.back());
      edge_mark.pop_back();
    }
  };
  dfs(dfs, 0);
  return space;
}

// ====== sub-domain matrices ======

DeltaMatrix subdomain_distances(const Topology& topo, const Partitioning& part, int k) {
  const auto& interior = part.subdomains.at(k);
  const auto& borders = part.borders.at(k);
  NodeMask mask = part.subdomain_mask(topo, k);
  DeltaMatrix delta(interior.size(), std::vector<long long>(borders.size(), kUnreachable));
  for (int bi = 0; bi < static_cast<int>(borders.size()); ++bi) {
    auto dist = least_cost_distances(topo, mask, borders[bi]);
    for (int ri = 0; ri < static_cast<int>(interior.size()); ++ri)
      delta[ri][bi] = dist[interior[ri]];
  }
  return delta;
}

std::vector<SubdomainAdvertisementSpace> enumerate_all_subdomains(const Topology& topo,
                                                                  const Partitioning& part) {
  std::vector<SubdomainAdvertisementSpace> out;
  for (int k = 0; k < part.K; ++k) {
    SubdomainAdvertisementSpace space = enumerate_metric_vectors(subdomain_distances(topo, part, k));
    space.subdomain = k;
    for (int n : part.subdomains[k]) space.node_ids.push_back(topo.node(n).id);
    for (int b : part.borders[k]) space.border_ids.push_back(topo.node(b).id);
    out.push_back(std::move(space));
  }
  return out;
}

// ====== serialization ======

namespace {

nlohmann::json space_to_json_obj(const SubdomainAdvertisementSpace& s) {
  nlohmann::json j;
  j["subdomain"] = s.subdomain + 1;
  j["nodes"] = s.node_ids;
  j["borders"] = s.border_ids;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : s.distances) {
    nlohmann::json r = nlohmann::json::array();
    for (long long v : row) {
      if (v >= kUnreachable)
        r.push_back(nullptr);
      else
        r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  j["delta"] = std::move(rows);
  j["delta_max"] = s.delta_max;
  nlohmann::json vecs = nlohmann::json::array();
  for (const auto& v : s.vectors) {
    nlohmann::json e;
    e["metrics"] = v.metrics;
    e["exits"] = v.exits;
    e["counts"] = v.counts;
    vecs.push_back(std::move(e));
  }
  j["vectors"] = std::move(vecs);
  return j;
}

}  // namespace

std::string SubdomainAdvertisementSpace::to_json() const {
  return space_to_json_obj(*this).dump(2);
}

std::string advertisement_spaces_json(const std::vector<SubdomainAdvertisementSpace>& spaces) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : spaces) arr.push_back(space_to_json_obj(s));
  return arr.dump(2);
}

}  // namespace sdnpart
