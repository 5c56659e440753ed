#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdnpart {

// Distance value used for unreachable node pairs. Large enough to survive a
// few additions without overflowing long long.
constexpr long long kUnreachable = std::numeric_limits<long long>::max() / 8;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnreachableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string id;
};

struct Link {
  int a = -1;  // endpoint node indices, ordered so that id(a) < id(b)
  int b = -1;
  long long metric = 10;
  std::optional<double> capacity_gbps;
};

struct CapacityType {
  double rate_gbps = 0;
  double cost = 0;
};

struct Flow {
  int src = -1;
  int dst = -1;
  double demand = 0;
};

class Topology {
 public:
  int add_node(const std::string& id);
  int add_link(const std::string& a, const std::string& b, long long metric = 10,
               std::optional<double> capacity_gbps = std::nullopt);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(int i) const { return nodes_.at(i); }
  const Link& link(int i) const { return links_.at(i); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }

  // Index of a node id, -1 when absent.
  int find_node(const std::string& id) const;
  // Index of a node id, throws TopologyError when absent.
  int index_of(const std::string& id) const;
  // Link index joining u and v, -1 when the nodes are not adjacent.
  int link_between(int u, int v) const;
  // (neighbor index, link index) pairs sorted by neighbor id.
  const std::vector<std::pair<int, int>>& neighbors(int u) const;

  bool connected() const;

  // Copy with one link removed. Node set is unchanged.
  Topology without_link(int link_index) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<std::string, int> by_id_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

// Per-node inclusion mask; restricting searches to an induced subgraph.
using NodeMask = std::vector<char>;

NodeMask full_mask(const Topology& topo);
NodeMask mask_of(const Topology& topo, const std::vector<int>& nodes);

struct PathResult {
  std::vector<int> nodes;  // src first, dst last
  long long distance = 0;
};

// Least-cost path inside the masked subgraph. Ties between equal-cost paths
// are broken toward the lexicographically smallest node id sequence. Throws
// UnreachableError when dst cannot be reached.
PathResult least_cost_path(const Topology& topo, const NodeMask& within, int src, int dst);

// Distance from src to every node inside the masked subgraph; kUnreachable
// marks nodes outside the mask or cut off from src.
std::vector<long long> least_cost_distances(const Topology& topo, const NodeMask& within,
                                            int src);

// True when every reachable node pair inside the mask has a unique least-cost
// path. Tied pairs (u < v) are appended to *tied when provided.
bool has_unique_paths(const Topology& topo, const NodeMask& within,
                      std::vector<std::pair<int, int>>* tied = nullptr);

// Parses the plain text format (NODES / LINKS sections) or, when the text
// carries SNDlib native markers, that format instead.
Topology parse_topology(const std::string& text);
Topology load_topology(const std::string& path);

}  // namespace sdnpart
