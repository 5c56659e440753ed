#include "sdnpart/partition.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "json.hpp"

namespace sdnpart {

std::vector<SecantPiece> quadratic_secant_pieces(int max_size) {
  std::vector<SecantPiece> out;
  for (long long s = 0; s < max_size; ++s) out.push_back({2 * s + 1, -s * (s + 1)});
  return out;
}

// ====== partitioning container ======

void Partitioning::finalize(const Topology& topo) {
  subdomains.assign(K, {});
  borders.assign(K, {});
  all_borders.clear();
  for (int n = 0; n < topo.node_count(); ++n) {
    int a = assignment.at(n);
    if (a == 0)
      all_borders.push_back(n);
    else
      subdomains.at(a - 1).push_back(n);
  }
  auto by_id = [&](int x, int y) { return topo.node(x).id < topo.node(y).id; };
  std::sort(all_borders.begin(), all_borders.end(), by_id);
  for (auto& list : subdomains) std::sort(list.begin(), list.end(), by_id);
  for (int k = 0; k < K; ++k) {
    std::set<int> adj;
    for (int n : subdomains[k])
      for (const auto& [v, link] : topo.neighbors(n))
        if (assignment[v] == 0) adj.insert(v);
    borders[k].assign(adj.begin(), adj.end());
    std::sort(borders[k].begin(), borders[k].end(), by_id);
  }
}

NodeMask Partitioning::subdomain_mask(const Topology& topo, int k) const {
  NodeMask mask(topo.node_count(), 0);
  for (int n : subdomains.at(k)) mask[n] = 1;
  for (int n : borders.at(k)) mask[n] = 1;
  return mask;
}

std::string Partitioning::to_json(const Topology& topo) const {
  nlohmann::json j;
  j["K"] = K;
  std::vector<std::string> border_ids;
  for (int n : all_borders) border_ids.push_back(topo.node(n).id);
  j["borders"] = border_ids;
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& list : subdomains) {
    std::vector<std::string> ids;
    for (int n : list) ids.push_back(topo.node(n).id);
    subs.push_back(ids);
  }
  j["subdomains"] = subs;
  return j.dump(2);
}

Partitioning Partitioning::from_json(const Topology& topo, const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Partitioning part;
  part.K = j.at("K").get<int>();
  part.assignment.assign(topo.node_count(), -1);
  for (const auto& id : j.at("borders")) part.assignment.at(topo.index_of(id)) = 0;
  const auto& subs = j.at("subdomains");
  if (static_cast<int>(subs.size()) != part.K)
    throw TopologyError("subdomain list does not match K");
  for (int k = 0; k < part.K; ++k)
    for (const auto& id : subs[k]) part.assignment.at(topo.index_of(id)) = k + 1;
  for (int n = 0; n < topo.node_count(); ++n)
    if (part.assignment[n] < 0)
      throw TopologyError("node " + topo.node(n).id + " missing from partitioning");
  part.finalize(topo);
  return part;
}

// ====== validation ======

namespace {

bool component_connected(const Topology& topo, const std::vector<int>& members) {
  if (members.empty()) return false;
  std::set<int> in(members.begin(), members.end());
  std::queue<int> q;
  std::set<int> seen;
  q.push(members[0]);
  seen.insert(members[0]);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& [v, link] : topo.neighbors(u))
      if (in.count(v) && !seen.count(v)) {
        seen.insert(v);
        q.push(v);
      }
  }
  return seen.size() == in.size();
}

}  // namespace

bool validate_partitioning(const Topology& topo, const Partitioning& part,
                           std::vector<std::string>* violations) {
  std::vector<std::string> out;
  if (static_cast<int>(part.assignment.size()) != topo.node_count()) {
    out.push_back("assignment size does not match the node count");
  } else {
    for (int n = 0; n < topo.node_count(); ++n)
      if (part.assignment[n] < 0 || part.assignment[n] > part.K)
        out.push_back("node " + topo.node(n).id + " carries an invalid label");
    for (int k = 0; k < part.K; ++k) {
      std::vector<int> members;
      for (int n = 0; n < topo.node_count(); ++n)
        if (part.assignment[n] == k + 1) members.push_back(n);
      if (members.empty())
        out.push_back("sub-domain " + std::to_string(k + 1) + " is empty");
      else if (!component_connected(topo, members))
        out.push_back("sub-domain " + std::to_string(k + 1) + " is not connected");
    }
    for (const auto& link : topo.links()) {
      int la = part.assignment[link.a], lb = part.assignment[link.b];
      if (la > 0 && lb > 0 && la != lb)
        out.push_back("link " + topo.node(link.a).id + " " + topo.node(link.b).id +
                      " joins two sub-domains directly");
    }
  }
  if (violations) *violations = out;
  return out.empty();
}

// ====== greedy baseline ======

std::optional<Partitioning> greedy_partition(const Topology& topo, int K, int max_borders) {
  int n = topo.node_count();
  if (K < 1 || K > n) return std::nullopt;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return topo.node(a).id < topo.node(b).id; });

  auto hop_dist = [&](int src) {
    std::vector<int> d(n, -1);
    std::queue<int> q;
    q.push(src);
    d[src] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const auto& [v, link] : topo.neighbors(u))
        if (d[v] < 0) {
          d[v] = d[u] + 1;
          q.push(v);
        }
    }
    return d;
  };

  std::vector<int> seeds{order[0]};
  std::vector<std::vector<int>> seed_dist{hop_dist(order[0])};
  while (static_cast<int>(seeds.size()) < K) {
    int best = -1, best_d = -1;
    for (int cand : order) {
      if (std::find(seeds.begin(), seeds.end(), cand) != seeds.end()) continue;
      int dmin = 1 << 30;
      for (const auto& d : seed_dist) dmin = std::min(dmin, d[cand]);
      if (dmin > best_d) {
        best_d = dmin;
        best = cand;
      }
    }
    if (best < 0) return std::nullopt;
    seeds.push_back(best);
    seed_dist.push_back(hop_dist(best));
  }

  std::vector<int> region(n, -1);
  std::vector<int> size(K, 0);
  for (int k = 0; k < K; ++k) {
    region[seeds[k]] = k;
    size[k] = 1;
  }
  while (true) {
    int pick_k = -1, pick_node = -1;
    for (int k = 0; k < K; ++k) {
      if (pick_k >= 0 && std::make_pair(size[k], k) >= std::make_pair(size[pick_k], pick_k))
        continue;
      int cand = -1;
      for (int u : order) {
        if (region[u] != k) continue;
        for (const auto& [v, link] : topo.neighbors(u))
          if (region[v] < 0 && (cand < 0 || topo.node(v).id < topo.node(cand).id)) cand = v;
      }
      if (cand >= 0) {
        pick_k = k;
        pick_node = cand;
      }
    }
    if (pick_k < 0) break;
    region[pick_node] = pick_k;
    ++size[pick_k];
  }
  for (int u = 0; u < n; ++u)
    if (region[u] < 0) return std::nullopt;

  std::vector<char> border(n, 0);
  auto cross_count = [&](int u) {
    if (border[u]) return -1;
    int c = 0;
    for (const auto& [v, link] : topo.neighbors(u))
      if (!border[v] && region[v] != region[u]) ++c;
    return c;
  };
  for (int guard = 0; guard < n; ++guard) {
    int best = -1, best_c = 0;
    for (int u : order) {
      int c = cross_count(u);
      if (c > best_c) {
        best_c = c;
        best = u;
      }
    }
    if (best < 0) break;
    border[best] = 1;
  }

  Partitioning part;
  part.K = K;
  part.assignment.assign(n, 0);
  std::vector<int> rank(K, -1);
  int next = 0;
  for (int u = 0; u < n; ++u)
    if (!border[u] && rank[region[u]] < 0) rank[region[u]] = next++;
  for (int k = 0; k < K; ++k)
    if (rank[k] < 0) return std::nullopt;
  for (int u = 0; u < n; ++u) part.assignment[u] = border[u] ? 0 : rank[region[u]] + 1;
  part.finalize(topo);
  if (static_cast<int>(part.all_borders.size()) > max_borders) return std::nullopt;
  if (!validate_partitioning(topo, part)) return std::nullopt;
  return part;
}

// ====== exhaustive separator scan ======

namespace {

// Labels components of the graph minus the chosen set; returns the count.
int components_without(const Topology& topo, const std::vector<char>& removed,
                       std::vector<int>* comp) {
  int n = topo.node_count();
  comp->assign(n, -1);
  int c = 0;
  for (int s = 0; s < n; ++s) {
    if (removed[s] || (*comp)[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    (*comp)[s] = c;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const auto& [v, link] : topo.neighbors(u))
        if (!removed[v] && (*comp)[v] < 0) {
          (*comp)[v] = c;
          q.push(v);
        }
    }
    ++c;
  }
  return c;
}

struct ScanResult {
  bool attempted = false;
  bool found = false;
  long long objective = 0;
  std::vector<int> assignment;
};

ScanResult separator_scan(const Topology& topo, int K, int max_borders,
                          const PartitionOptions& opts) {
  int n = topo.node_count();
  ScanResult result;
  double work = 0;
  for (int m = 0; m <= max_borders; ++m) {
    double c = 1;
    for (int i = 0; i < m; ++i) c = c * (n - i) / (i + 1);
    work += c;
  }
  if (work > 2e6) return result;
  result.attempted = true;

  std::vector<int> comp(n);
  std::vector<char> removed(n, 0);
  std::vector<int> chosen;

  auto consider = [&]() {
    int c = components_without(topo, removed, &comp);
    if (c != K) return;
    std::vector<long long> sizes(K, 0);
    for (int u = 0; u < n; ++u)
      if (!removed[u]) ++sizes[comp[u]];
    long long obj = 0;
    for (long long s : sizes) {
      if (s < 1) return;
      if (opts.size_bounds) {
        if (s < opts.size_bounds->first || s > opts.size_bounds->second) return;
      }
      obj += s * s;
    }
    if (!result.found || obj < result.objective) {
      result.found = true;
      result.objective = obj;
      // components renumbered by smallest node index for a stable labeling
      std::vector<int> rank(K, -1);
      int next = 0;
      for (int u = 0; u < n; ++u)
        if (!removed[u] && rank[comp[u]] < 0) rank[comp[u]] = next++;
      result.assignment.assign(n, 0);
      for (int u = 0; u < n; ++u) result.assignment[u] = removed[u] ? 0 : rank[comp[u]] + 1;
    }
  };

  auto rec = [&](auto&& self, int start, int left) -> void {
    consider();
    if (left == 0) return;
    for (int u = start; u < n; ++u) {
      removed[u] = 1;
      self(self, u + 1, left - 1);
      removed[u] = 0;
    }
  };
  rec(rec, 0, max_borders);
  return result;
}

long long balanced_floor(long long total, int K) {
  if (total < 0) return 0;
  long long q = total / K, r = total % K;
  return (K - r) * q * q + r * (q + 1) * (q + 1);
}

}  // namespace

// ====== optimal partitioning ======

Partitioning partition(const Topology& topo, int K, int max_borders,
                       const PartitionOptions& opts) {
  int n = topo.node_count();
  if (K < 1) throw InfeasiblePartitionError("K must be at least 1");
  if (max_borders < 0) throw InfeasiblePartitionError("negative border budget");
  if (n < K) throw InfeasiblePartitionError("fewer nodes than sub-domains");

  ScanResult scan = separator_scan(topo, K, max_borders, opts);
  if (scan.attempted && !scan.found)
    throw InfeasiblePartitionError("no labeling with " + std::to_string(K) +
                                   " connected sub-domains within the border budget");

  long long size_lo = 1, size_hi = n;
  if (opts.size_bounds) {
    size_lo = std::max<long long>(size_lo, opts.size_bounds->first);
    size_hi = std::min<long long>(size_hi, opts.size_bounds->second);
  }

  milp::Model model;
  std::vector<std::vector<int>> gamma(n, std::vector<int>(K));
  std::vector<int> mu(n);
  for (int u = 0; u < n; ++u)
    for (int k = 0; k < K; ++k)
      gamma[u][k] = model.add_bool("g_" + topo.node(u).id + "_" + std::to_string(k));
  for (int u = 0; u < n; ++u) mu[u] = model.add_bool("mu_" + topo.node(u).id);
  std::vector<int> eps(K);
  for (int k = 0; k < K; ++k)
    eps[k] = model.add_int("eps_" + std::to_string(k), size_lo, size_hi);
  int mu_total = model.add_int("mu_total", 0, max_borders);
  std::vector<int> kappa(K);
  for (int k = 0; k < K; ++k)
    kappa[k] = model.add_continuous("kappa_" + std::to_string(k), 1.0);

  // each node is a border or interior to exactly one sub-domain
  for (int u = 0; u < n; ++u) {
    std::vector<milp::Term> terms;
    for (int k = 0; k < K; ++k) terms.push_back({gamma[u][k], 1});
    terms.push_back({mu[u], 1});
    model.add_constraint(std::move(terms), milp::Sense::EQ, 1, "role_" + topo.node(u).id);
  }
  {
    std::vector<milp::Term> terms;
    for (int u = 0; u < n; ++u) terms.push_back({mu[u], 1});
    terms.push_back({mu_total, -1});
    model.add_constraint(std::move(terms), milp::Sense::EQ, 0, "mu_total");
  }
  // interior sizes
  for (int k = 0; k < K; ++k) {
    std::vector<milp::Term> terms;
    for (int u = 0; u < n; ++u) terms.push_back({gamma[u][k], 1});
    terms.push_back({eps[k], -1});
    model.add_constraint(std::move(terms), milp::Sense::EQ, 0, "size_" + std::to_string(k));
  }
  // an interior node's neighbors stay in the same sub-domain unless they are borders
  for (const auto& link : topo.links()) {
    for (int k = 0; k < K; ++k) {
      model.add_constraint({{gamma[link.b][k], 1}, {gamma[link.a][k], -1}, {mu[link.a], -1}},
                           milp::Sense::LE, 0);
      model.add_constraint({{gamma[link.a][k], 1}, {gamma[link.b][k], -1}, {mu[link.b], -1}},
                           milp::Sense::LE, 0);
    }
  }
  // squared size epigraph
  for (int k = 0; k < K; ++k)
    for (const auto& piece : quadratic_secant_pieces(static_cast<int>(size_hi)))
      model.add_constraint(
          {{kappa[k], 1}, {eps[k], -static_cast<double>(piece.slope)}}, milp::Sense::GE,
          static_cast<double>(piece.intercept));
  // the smallest node id of sub-domain k grows with k
  for (int k = 1; k < K; ++k)
    for (int u = 0; u < n; ++u) {
      std::vector<milp::Term> terms{{gamma[u][k], 1}};
      for (int v = 0; v < u; ++v) terms.push_back({gamma[v][k - 1], -1});
      model.add_constraint(std::move(terms), milp::Sense::LE, 0);
    }
  // balanced growth: sum of squared sizes against the border budget
  for (int m0 = 0; m0 < max_borders; ++m0) {
    long long h0 = balanced_floor(n - m0, K);
    long long h1 = balanced_floor(n - m0 - 1, K);
    long long g = h1 - h0;
    std::vector<milp::Term> terms;
    for (int k = 0; k < K; ++k) terms.push_back({kappa[k], 1});
    terms.push_back({mu_total, -static_cast<double>(g)});
    model.add_constraint(std::move(terms), milp::Sense::GE, static_cast<double>(h0 - g * m0));
  }

  std::vector<double> warm;
  auto warm_from_assignment = [&](const std::vector<int>& assign) {
    std::vector<double> values(model.variables().size(), 0);
    std::vector<long long> sizes(K, 0);
    long long borders_used = 0;
    for (int u = 0; u < n; ++u) {
      if (assign[u] == 0) {
        values[mu[u]] = 1;
        ++borders_used;
      } else {
        values[gamma[u][assign[u] - 1]] = 1;
        ++sizes[assign[u] - 1];
      }
    }
    for (int k = 0; k < K; ++k) values[eps[k]] = static_cast<double>(sizes[k]);
    values[mu_total] = static_cast<double>(borders_used);
    return values;
  };
  if (scan.found) {
    warm = warm_from_assignment(scan.assignment);
  } else if (auto greedy = greedy_partition(topo, K, max_borders)) {
    warm = warm_from_assignment(greedy->assignment);
  }

  milp::Solution last;
  for (int round = 0; round < 256; ++round) {
    last = milp::solve(model, opts.limits, warm.empty() ? nullptr : &warm);
    if (last.status == milp::Status::Infeasible)
      throw InfeasiblePartitionError("no labeling with " + std::to_string(K) +
                                     " connected sub-domains within the border budget");
    Partitioning part;
    part.K = K;
    part.assignment.assign(n, 0);
    for (int u = 0; u < n; ++u)
      for (int k = 0; k < K; ++k)
        if (last.values[gamma[u][k]] > 0.5) part.assignment[u] = k + 1;
    part.finalize(topo);

    bool connected = true;
    for (int k = 0; k < K && connected; ++k) {
      std::vector<int> members = part.subdomains[k];
      if (members.empty()) {
        connected = false;
        break;
      }
      if (component_connected(topo, members)) continue;
      connected = false;
      // ring cuts for every fragment of the broken sub-domain
      std::vector<char> removed(n, 1);
      for (int u : members) removed[u] = 0;
      std::vector<int> comp;
      int c = components_without(topo, removed, &comp);
      for (int frag = 0; frag < c; ++frag) {
        std::vector<int> inside, ring;
        for (int u : members)
          if (comp[u] == frag) inside.push_back(u);
        if (inside.empty()) continue;
        std::set<int> ring_set;
        for (int u : inside)
          for (const auto& [v, link] : topo.neighbors(u))
            if (comp[v] != frag || removed[v]) ring_set.insert(v);
        int u_rep = *std::min_element(inside.begin(), inside.end());
        int v_rep = -1;
        for (int u : members)
          if (comp[u] != frag) {
            v_rep = u;
            break;
          }
        if (v_rep < 0) continue;
        for (int kk = 0; kk < K; ++kk) {
          std::vector<milp::Term> terms{{gamma[u_rep][kk], 1}, {gamma[v_rep][kk], 1}};
          for (int s : ring_set) terms.push_back({gamma[s][kk], -1});
          model.add_constraint(std::move(terms), milp::Sense::LE, 1);
        }
      }
    }
    if (!connected) continue;

    if (last.status == milp::Status::FeasibleWithGap)
      throw PartitionLimitError("solver limit reached with an open gap", part, last.gap());
    return part;
  }
  throw InfeasiblePartitionError("connectivity refinement did not converge");
}

}  // namespace sdnpart
