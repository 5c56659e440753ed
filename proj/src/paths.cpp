#include "sdnpart/paths.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <tuple>
#include <utility>

namespace sdnpart {

namespace {

// ====== shared helpers ======

std::vector<std::pair<int, int>> traversals_of(const Topology& topo,
                                               const std::vector<int>& nodes) {
  std::vector<std::pair<int, int>> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    int u = nodes[i];
    int v = nodes[i + 1];
    int li = topo.link_between(u, v);
    if (li < 0) {
      throw PathEnumerationError("path hops between non-adjacent nodes " + topo.node(u).id +
                                 " and " + topo.node(v).id);
    }
    out.emplace_back(li, topo.link(li).a == u ? 0 : 1);
  }
  return out;
}

void register_path(PathTables& tables, const Topology& topo, RoutePath path,
                   std::vector<std::vector<char>> cons, std::size_t max_paths) {
  if (tables.paths.size() >= max_paths) {
    throw PathEnumerationError("candidate path budget exceeded");
  }
  int idx = static_cast<int>(tables.paths.size());
  tables.flow_paths.at(path.flow).push_back(idx);
  tables.traversals.push_back(traversals_of(topo, path.nodes));
  tables.cons.push_back(std::move(cons));
  tables.paths.push_back(std::move(path));
}

// ====== partitioned enumeration ======

struct SubdomainInfo {
  NodeMask mask;
  std::vector<int> row_of;       // node index -> row in R_k, -1 elsewhere
  std::vector<int> border_col;   // node index -> column in B_k, -1 elsewhere
  std::vector<int> border_node;  // column -> node index
  const SubdomainAdvertisementSpace* space = nullptr;
  // row -> columns some advertisement vector exits through, ascending.
  std::vector<std::vector<int>> achievable;
  // row x column -> canonical segment node sequence, empty when unusable.
  std::vector<std::vector<std::vector<int>>> exit_segment;
};

class Enumerator {
 public:
  Enumerator(const Topology& topo, const Partitioning& part,
             const std::vector<SubdomainAdvertisementSpace>& spaces,
             const std::vector<Flow>& flows, int max_sdn_chain, std::size_t max_paths)
      : topo_(topo),
        part_(part),
        flows_(flows),
        max_sdn_chain_(max_sdn_chain),
        max_paths_(max_paths) {
    build_info(spaces);
    tables_.flow_paths.resize(flows.size());
    on_path_.assign(topo.node_count(), 0);
    used_.assign(part.K, 0);
  }

  PathTables run() {
    for (std::size_t f = 0; f < flows_.size(); ++f) {
      flow_index_ = static_cast<int>(f);
      const Flow& flow = flows_[f];
      if (flow.src == flow.dst) {
        throw PathEnumerationError("flow with identical endpoints at node " +
                                   topo_.node(flow.src).id);
      }
      dst_ = flow.dst;
      nodes_.assign(1, flow.src);
      on_path_[flow.src] = 1;
      if (part_.is_border(flow.src)) {
        sdn_walk(flow.src, 0);
      } else {
        ospf_enter(flow.src);
      }
      on_path_[flow.src] = 0;
      if (tables_.flow_paths[f].empty()) {
        throw PathEnumerationError("no admissible path from " + topo_.node(flow.src).id +
                                   " to " + topo_.node(flow.dst).id);
      }
    }
    return std::move(tables_);
  }

 private:
  void build_info(const std::vector<SubdomainAdvertisementSpace>& spaces) {
    int n = topo_.node_count();
    info_.resize(part_.K);
    for (int k = 0; k < part_.K; ++k) {
      SubdomainInfo& I = info_[k];
      I.mask = part_.subdomain_mask(topo_, k);
      I.row_of.assign(n, -1);
      I.border_col.assign(n, -1);
      I.border_node = part_.borders[k];
      for (std::size_t r = 0; r < part_.subdomains[k].size(); ++r) {
        I.row_of[part_.subdomains[k][r]] = static_cast<int>(r);
      }
      for (std::size_t c = 0; c < I.border_node.size(); ++c) {
        I.border_col[I.border_node[c]] = static_cast<int>(c);
      }
      for (const auto& sp : spaces) {
        if (sp.subdomain == k) I.space = &sp;
      }
      if (I.space == nullptr) {
        throw PathEnumerationError("no advertisement space for sub-domain " +
                                   std::to_string(k + 1));
      }
      check_space_alignment(k, I);

      std::size_t alpha = part_.subdomains[k].size();
      std::size_t beta = I.border_node.size();
      std::vector<std::vector<char>> seen(alpha, std::vector<char>(beta, 0));
      for (const AdvEntry& entry : I.space->vectors) {
        for (std::size_t r = 0; r < alpha; ++r) seen[r][entry.exits[r]] = 1;
      }
      I.achievable.assign(alpha, {});
      I.exit_segment.assign(alpha, std::vector<std::vector<int>>(beta));
      for (std::size_t r = 0; r < alpha; ++r) {
        for (std::size_t c = 0; c < beta; ++c) {
          if (!seen[r][c]) continue;
          PathResult pr =
              least_cost_path(topo_, I.mask, part_.subdomains[k][r], I.border_node[c]);
          I.exit_segment[r][c] = pr.nodes;
          I.achievable[r].push_back(static_cast<int>(c));
        }
      }
    }
  }

  void check_space_alignment(int k, const SubdomainInfo& I) const {
    const SubdomainAdvertisementSpace& sp = *I.space;
    bool ok = sp.node_ids.size() == part_.subdomains[k].size() &&
              sp.border_ids.size() == I.border_node.size();
    for (std::size_t r = 0; ok && r < sp.node_ids.size(); ++r) {
      ok = sp.node_ids[r] == topo_.node(part_.subdomains[k][r]).id;
    }
    for (std::size_t c = 0; ok && c < sp.border_ids.size(); ++c) {
      ok = sp.border_ids[c] == topo_.node(I.border_node[c]).id;
    }
    if (!ok) {
      throw PathEnumerationError("advertisement space does not match sub-domain " +
                                 std::to_string(k + 1));
    }
  }

  bool dst_in(int k) const {
    return part_.assignment[dst_] == k + 1 || info_[k].border_col[dst_] >= 0;
  }

  // Appends everything after the segment's first node; false on a collision
  // with the path so far.
  bool splice(const std::vector<int>& seg_nodes) {
    for (std::size_t i = 1; i < seg_nodes.size(); ++i) {
      if (on_path_[seg_nodes[i]]) return false;
    }
    for (std::size_t i = 1; i < seg_nodes.size(); ++i) {
      on_path_[seg_nodes[i]] = 1;
      nodes_.push_back(seg_nodes[i]);
    }
    return true;
  }

  void unsplice(std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      on_path_[nodes_.back()] = 0;
      nodes_.pop_back();
    }
  }

  void emit() {
    RoutePath p;
    p.flow = flow_index_;
    p.nodes = nodes_;
    p.segments = segs_;
    p.exit_choices = choices_;
    std::vector<std::vector<char>> cons;
    cons.reserve(choices_.size());
    for (const auto& choice : choices_) {
      const auto& vectors = info_[choice.subdomain].space->vectors;
      std::vector<char> mask(vectors.size(), 0);
      for (std::size_t vi = 0; vi < vectors.size(); ++vi) {
        mask[vi] = vectors[vi].exits[choice.entry_row] == choice.border_pos ? 1 : 0;
      }
      cons.push_back(std::move(mask));
    }
    register_path(tables_, topo_, std::move(p), std::move(cons), max_paths_);
  }

  // Path ends at interior node r whose sub-domain has not been entered yet.
  void ospf_enter(int r) {
    int k = part_.subdomain_of(r);
    const SubdomainInfo& I = info_[k];
    used_[k] = 1;
    if (dst_in(k)) {
      const std::vector<int>* seg = final_segment(k, r);
      if (seg != nullptr) {
        if (splice(*seg)) {
          segs_.push_back(PathSegment{false, k, *seg, -1});
          emit();
          segs_.pop_back();
          unsplice(seg->size() - 1);
        }
        used_[k] = 0;
        return;
      }
      if (I.border_col[dst_] < 0) {
        used_[k] = 0;
        return;
      }
      // A border destination the mask can no longer reach: leave through the
      // advertised exits and approach it from the far side.
    }
    int row = I.row_of[r];
    for (int col : I.achievable[row]) {
      const std::vector<int>& seg = I.exit_segment[row][col];
      if (!splice(seg)) continue;
      segs_.push_back(PathSegment{false, k, seg, I.border_node[col]});
      choices_.push_back(RoutePath::ExitChoice{k, row, col});
      sdn_walk(I.border_node[col], 0);
      choices_.pop_back();
      segs_.pop_back();
      unsplice(seg.size() - 1);
    }
    used_[k] = 0;
  }

  // Path ends at border node u after `chain` consecutive SDN links.
  void sdn_walk(int u, int chain) {
    if (chain >= max_sdn_chain_) return;
    for (const auto& [v, li] : topo_.neighbors(u)) {
      (void)li;
      if (on_path_[v]) continue;
      if (v == dst_) {
        nodes_.push_back(v);
        on_path_[v] = 1;
        segs_.push_back(PathSegment{true, -1, {u, v}, -1});
        emit();
        segs_.pop_back();
        on_path_[v] = 0;
        nodes_.pop_back();
      } else if (part_.is_border(v)) {
        nodes_.push_back(v);
        on_path_[v] = 1;
        segs_.push_back(PathSegment{true, -1, {u, v}, -1});
        sdn_walk(v, chain + 1);
        segs_.pop_back();
        on_path_[v] = 0;
        nodes_.pop_back();
      } else if (!used_[part_.subdomain_of(v)]) {
        nodes_.push_back(v);
        on_path_[v] = 1;
        segs_.push_back(PathSegment{true, -1, {u, v}, -1});
        ospf_enter(v);
        segs_.pop_back();
        on_path_[v] = 0;
        nodes_.pop_back();
      }
    }
  }

  // Least-cost route to the destination inside sub-domain k, nullptr when the
  // destination cannot be reached there.
  const std::vector<int>* final_segment(int k, int entry) {
    auto key = std::make_tuple(k, entry, dst_);
    auto it = final_cache_.find(key);
    if (it == final_cache_.end()) {
      std::vector<int> seg;
      try {
        seg = least_cost_path(topo_, info_[k].mask, entry, dst_).nodes;
      } catch (const UnreachableError&) {
        seg.clear();
      }
      it = final_cache_.emplace(key, std::move(seg)).first;
    }
    return it->second.empty() ? nullptr : &it->second;
  }

  const Topology& topo_;
  const Partitioning& part_;
  const std::vector<Flow>& flows_;
  int max_sdn_chain_;
  std::size_t max_paths_;

  std::vector<SubdomainInfo> info_;
  PathTables tables_;
  std::map<std::tuple<int, int, int>, std::vector<int>> final_cache_;

  int flow_index_ = -1;
  int dst_ = -1;
  std::vector<char> on_path_;
  std::vector<char> used_;
  std::vector<int> nodes_;
  std::vector<PathSegment> segs_;
  std::vector<RoutePath::ExitChoice> choices_;
};

}  // namespace

PathTables enumerate_paths(const Topology& topo, const Partitioning& part,
                           const std::vector<SubdomainAdvertisementSpace>& spaces,
                           const std::vector<Flow>& flows, int max_sdn_chain,
                           std::size_t max_paths) {
  if (max_sdn_chain < 1) {
    throw PathEnumerationError("max_sdn_chain must be at least 1");
  }
  Enumerator e(topo, part, spaces, flows, max_sdn_chain, max_paths);
  return e.run();
}

// ====== fully centralized enumeration ======

namespace {

std::vector<int> hop_distances(const Topology& topo, int from) {
  std::vector<int> dist(topo.node_count(), -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& [v, li] : topo.neighbors(u)) {
      (void)li;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

void full_dfs(const Topology& topo, const std::vector<int>& to_dst, int dst, int bound,
              std::vector<int>& nodes, std::vector<char>& on_path, PathTables& tables,
              int flow_index, std::size_t max_paths) {
  int u = nodes.back();
  if (u == dst) {
    RoutePath p;
    p.flow = flow_index;
    p.nodes = nodes;
    register_path(tables, topo, std::move(p), {}, max_paths);
    return;
  }
  int depth = static_cast<int>(nodes.size()) - 1;
  for (const auto& [v, li] : topo.neighbors(u)) {
    (void)li;
    if (on_path[v]) continue;
    if (to_dst[v] < 0 || depth + 1 + to_dst[v] > bound) continue;
    nodes.push_back(v);
    on_path[v] = 1;
    full_dfs(topo, to_dst, dst, bound, nodes, on_path, tables, flow_index, max_paths);
    on_path[v] = 0;
    nodes.pop_back();
  }
}

}  // namespace

PathTables full_sdn_paths(const Topology& topo, const std::vector<Flow>& flows,
                          int extra_hops, std::size_t max_paths) {
  PathTables tables;
  tables.flow_paths.resize(flows.size());
  std::map<int, std::vector<int>> bfs_cache;
  std::vector<char> on_path(topo.node_count(), 0);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const Flow& flow = flows[f];
    if (flow.src == flow.dst) {
      throw PathEnumerationError("flow with identical endpoints at node " +
                                 topo.node(flow.src).id);
    }
    auto it = bfs_cache.find(flow.dst);
    if (it == bfs_cache.end()) {
      it = bfs_cache.emplace(flow.dst, hop_distances(topo, flow.dst)).first;
    }
    const std::vector<int>& to_dst = it->second;
    if (to_dst[flow.src] < 0) {
      throw PathEnumerationError("no path from " + topo.node(flow.src).id + " to " +
                                 topo.node(flow.dst).id);
    }
    int bound = to_dst[flow.src] + extra_hops;
    std::vector<int> nodes{flow.src};
    on_path[flow.src] = 1;
    full_dfs(topo, to_dst, flow.dst, bound, nodes, on_path, tables,
             static_cast<int>(f), max_paths);
    on_path[flow.src] = 0;
  }
  return tables;
}

// ====== extra candidates and consistency checks ======

int add_candidate_path(PathTables& tables, const Topology& topo, int flow_index,
                       const std::vector<int>& nodes) {
  if (nodes.size() < 2) {
    throw PathEnumerationError("candidate path needs at least two nodes");
  }
  for (int idx : tables.flow_paths.at(flow_index)) {
    if (tables.paths[idx].nodes == nodes) return idx;
  }
  RoutePath p;
  p.flow = flow_index;
  p.nodes = nodes;
  int idx = static_cast<int>(tables.paths.size());
  register_path(tables, topo, std::move(p), {},
                std::numeric_limits<std::size_t>::max());
  return idx;
}

bool consistency(const RoutePath& p, int k, int d,
                 const SubdomainAdvertisementSpace& space, const MetricVector& m) {
  if (p.nodes.empty() || p.nodes.back() != d) {
    throw PathEnumerationError("consistency queried with a foreign destination");
  }
  for (const auto& choice : p.exit_choices) {
    if (choice.subdomain != k) continue;
    std::optional<ExitVector> exits = exit_vector(space.distances, m);
    if (!exits) return false;
    return exits->at(choice.entry_row) == choice.border_pos;
  }
  return true;
}

}  // namespace sdnpart
