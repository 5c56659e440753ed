#include "sdnpart/topology.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace sdnpart {

// ====== graph container ======

int Topology::add_node(const std::string& id) {
  if (id.empty()) throw TopologyError("empty node id");
  if (by_id_.count(id)) throw TopologyError("duplicate node id " + id);
  int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{id});
  by_id_[id] = idx;
  adj_.emplace_back();
  return idx;
}

int Topology::add_link(const std::string& a, const std::string& b, long long metric,
                       std::optional<double> capacity_gbps) {
  if (a == b) throw TopologyError("self loop at node " + a);
  if (metric < 1) throw TopologyError("link metric must be positive: " + a + " " + b);
  int ia = index_of(a);
  int ib = index_of(b);
  if (node(ia).id > node(ib).id) std::swap(ia, ib);
  if (link_between(ia, ib) >= 0) throw TopologyError("duplicate link " + a + " " + b);
  int idx = static_cast<int>(links_.size());
  links_.push_back(Link{ia, ib, metric, capacity_gbps});
  auto insert_sorted = [&](int u, int v) {
    auto& lst = adj_[u];
    auto pos = std::lower_bound(lst.begin(), lst.end(), v, [&](const auto& p, int node_idx) {
      return nodes_[p.first].id < nodes_[node_idx].id;
    });
    lst.insert(pos, {v, idx});
  };
  insert_sorted(ia, ib);
  insert_sorted(ib, ia);
  return idx;
}

int Topology::find_node(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? -1 : it->second;
}

int Topology::index_of(const std::string& id) const {
  int idx = find_node(id);
  if (idx < 0) throw TopologyError("unknown node id " + id);
  return idx;
}

int Topology::link_between(int u, int v) const {
  for (const auto& [nbr, link] : adj_.at(u))
    if (nbr == v) return link;
  return -1;
}

const std::vector<std::pair<int, int>>& Topology::neighbors(int u) const { return adj_.at(u); }

bool Topology::connected() const {
  if (nodes_.empty()) return true;
  std::vector<char> seen(nodes_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const auto& [v, link] : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == static_cast<int>(nodes_.size());
}

Topology Topology::without_link(int link_index) const {
  Topology out;
  for (const auto& n : nodes_) out.add_node(n.id);
  for (int i = 0; i < static_cast<int>(links_.size()); ++i) {
    if (i == link_index) continue;
    const Link& l = links_[i];
    out.add_link(nodes_[l.a].id, nodes_[l.b].id, l.metric, l.capacity_gbps);
  }
  return out;
}

NodeMask full_mask(const Topology& topo) { return NodeMask(topo.node_count(), 1); }

NodeMask mask_of(const Topology& topo, const std::vector<int>& nodes) {
  NodeMask m(topo.node_count(), 0);
  for (int n : nodes) m.at(n) = 1;
  return m;
}

// ====== shortest paths ======

std::vector<long long> least_cost_distances(const Topology& topo, const NodeMask& within,
                                            int src) {
  if (src < 0 || src >= topo.node_count()) throw TopologyError("node index out of range");
  if (!within.at(src)) throw TopologyError("source node outside the mask");
  std::vector<long long> dist(topo.node_count(), kUnreachable);
  using Item = std::pair<long long, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[src] = 0;
  heap.push({0, src});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, link] : topo.neighbors(u)) {
      if (!within[v]) continue;
      long long nd = d + topo.link(link).metric;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.push({nd, v});
      }
    }
  }
  return dist;
}

PathResult least_cost_path(const Topology& topo, const NodeMask& within, int src, int dst) {
  if (dst < 0 || dst >= topo.node_count()) throw TopologyError("node index out of range");
  if (!within.at(dst)) throw TopologyError("destination node outside the mask");
  std::vector<long long> dist = least_cost_distances(topo, within, dst);
  if (dist.at(src) >= kUnreachable)
    throw UnreachableError("no path from " + topo.node(src).id + " to " + topo.node(dst).id);
  PathResult out;
  out.distance = dist[src];
  int u = src;
  out.nodes.push_back(u);
  while (u != dst) {
    int next = -1;
    for (const auto& [v, link] : topo.neighbors(u)) {
      if (!within[v] || dist[v] >= kUnreachable) continue;
      if (topo.link(link).metric + dist[v] == dist[u]) {
        next = v;  // neighbors are id sorted, first hit is the smallest
        break;
      }
    }
    if (next < 0) throw TopologyError("shortest path walk failed");
    out.nodes.push_back(next);
    u = next;
  }
  return out;
}

bool has_unique_paths(const Topology& topo, const NodeMask& within,
                      std::vector<std::pair<int, int>>* tied) {
  bool unique = true;
  int n = topo.node_count();
  for (int s = 0; s < n; ++s) {
    if (!within[s]) continue;
    std::vector<long long> dist = least_cost_distances(topo, within, s);
    std::vector<int> order;
    for (int v = 0; v < n; ++v)
      if (within[v] && dist[v] < kUnreachable) order.push_back(v);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::make_pair(dist[a], a) < std::make_pair(dist[b], b); });
    std::vector<int> count(n, 0);
    count[s] = 1;
    for (int u : order) {
      if (count[u] == 0) continue;
      for (const auto& [v, link] : topo.neighbors(u)) {
        if (!within[v]) continue;
        if (dist[u] + topo.link(link).metric == dist[v])
          count[v] = std::min(2, count[v] + count[u]);
      }
    }
    for (int t = 0; t < n; ++t) {
      if (t == s || count[t] < 2) continue;
      unique = false;
      if (!tied) return false;
      if (topo.node(s).id < topo.node(t).id) tied->push_back({s, t});
    }
  }
  if (tied) std::sort(tied->begin(), tied->end(), [&](const auto& x, const auto& y) {
    return std::make_pair(topo.node(x.first).id, topo.node(x.second).id) <
           std::make_pair(topo.node(y.first).id, topo.node(y.second).id);
  });
  return unique;
}

// ====== parsing ======

namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

long long parse_metric(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad metric '" + tok + "'");
  }
}

double parse_capacity(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad capacity '" + tok + "'");
  }
}

Topology parse_plain(const std::string& text) {
  Topology topo;
  enum class Section { None, Nodes, Links } section = Section::None;
  std::istringstream ss(text);
  std::string raw;
  int line_no = 0;
  bool saw_nodes = false;
  while (std::getline(ss, raw)) {
    ++line_no;
    auto tokens = tokenize(strip_comment(raw));
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && tokens[0] == "NODES") {
      section = Section::Nodes;
      saw_nodes = true;
      continue;
    }
    if (tokens.size() == 1 && tokens[0] == "LINKS") {
      if (!saw_nodes)
        throw ParseError("line " + std::to_string(line_no) + ": LINKS before NODES");
      section = Section::Links;
      continue;
    }
    switch (section) {
      case Section::None:
        throw ParseError("line " + std::to_string(line_no) + ": content outside a section");
      case Section::Nodes: {
        if (tokens.size() != 1)
          throw ParseError("line " + std::to_string(line_no) + ": expected a single node id");
        try {
          topo.add_node(tokens[0]);
        } catch (const TopologyError& e) {
          throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        break;
      }
      case Section::Links: {
        if (tokens.size() < 2 || tokens.size() > 4)
          throw ParseError("line " + std::to_string(line_no) +
                           ": expected 'id1 id2 [metric] [capacity]'");
        long long metric = 10;
        std::optional<double> cap;
        if (tokens.size() >= 3) metric = parse_metric(tokens[2], line_no);
        if (tokens.size() == 4) cap = parse_capacity(tokens[3], line_no);
        try {
          topo.add_link(tokens[0], tokens[1], metric, cap);
        } catch (const TopologyError& e) {
          throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        break;
      }
    }
  }
  if (!saw_nodes) throw ParseError("line 1: missing NODES section");
  return topo;
}

Topology parse_sndlib(const std::string& text) {
  Topology topo;
  enum class Section { None, Nodes, Links, Other } section = Section::None;
  int depth = 0;
  std::istringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    if (line.find('?') != std::string::npos && line.find("SNDlib") != std::string::npos)
      continue;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    int opens = static_cast<int>(std::count(line.begin(), line.end(), '('));
    int closes = static_cast<int>(std::count(line.begin(), line.end(), ')'));
    if (section == Section::None) {
      if (opens > closes) {
        depth = opens - closes;
        if (tokens[0] == "NODES")
          section = Section::Nodes;
        else if (tokens[0] == "LINKS")
          section = Section::Links;
        else
          section = Section::Other;
      }
      continue;
    }
    depth += opens - closes;
    if (depth <= 0) {
      section = Section::None;
      depth = 0;
      continue;
    }
    if (section == Section::Nodes) {
      try {
        topo.add_node(tokens[0]);
      } catch (const TopologyError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    } else if (section == Section::Links) {
      if (tokens.size() < 5 || tokens[1] != "(" || tokens[4] != ")")
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected '<id> ( <src> <dst> ) ...'");
      try {
        topo.add_link(tokens[2], tokens[3]);
      } catch (const TopologyError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return topo;
}

bool looks_like_sndlib(const std::string& text) {
  if (text.find("?SNDlib") != std::string::npos) return true;
  std::istringstream ss(text);
  std::string raw;
  while (std::getline(ss, raw)) {
    auto tokens = tokenize(strip_comment(raw));
    if (tokens.empty()) continue;
    if (tokens[0] == "NODES" || tokens[0] == "LINKS" || tokens[0] == "META")
      return tokens.size() >= 2 && tokens[1] == "(";
    return false;
  }
  return false;
}

}  // namespace

Topology parse_topology(const std::string& text) {
  Topology topo = looks_like_sndlib(text) ? parse_sndlib(text) : parse_plain(text);
  if (topo.node_count() == 0) throw ParseError("line 1: no nodes defined");
  if (!topo.connected()) throw TopologyError("topology is not connected");
  return topo;
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

}  // namespace sdnpart
