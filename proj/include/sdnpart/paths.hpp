#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sdnpart/lsa.hpp"
#include "sdnpart/partition.hpp"
#include "sdnpart/topology.hpp"

namespace sdnpart {

struct PathSegment {
  bool sdn_link = false;   // single hop leaving an SDN node
  int subdomain = -1;      // sub-domain of an OSPF segment, -1 for SDN links
  std::vector<int> nodes;  // at least two nodes, consecutive in the path
  int exit_border = -1;    // node index of the exit border, -1 for final segments
};

struct RoutePath {
  int flow = -1;
  std::vector<int> nodes;
  std::vector<PathSegment> segments;

  // One entry per OSPF segment that exits a sub-domain toward a border.
  struct ExitChoice {
    int subdomain = -1;
    int entry_row = -1;   // row of the entry node inside R_k
    int border_pos = -1;  // column inside B_k
  };
  std::vector<ExitChoice> exit_choices;
};

struct PathEnumerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PathTables {
  std::vector<RoutePath> paths;
  // cr: path indices per flow.
  std::vector<std::vector<int>> flow_paths;
  // tr: (link index, direction) per path; direction 0 travels a->b.
  std::vector<std::vector<std::pair<int, int>>> traversals;
  // cons: per path, per exit choice, which advertisement vectors of that
  // sub-domain route the path's entry node to the path's exit border.
  // Aligned with RoutePath::exit_choices; mask over spaces[k].vectors.
  std::vector<std::vector<std::vector<char>>> cons;
};

// Complete candidate path set under the routing rules of the partitioned
// domain: alternating OSPF segments and SDN links, one OSPF segment per
// sub-domain, at most max_sdn_chain consecutive SDN links, simple node
// sequences, only exit borders some advertisement vector can realize.
PathTables enumerate_paths(const Topology& topo, const Partitioning& part,
                           const std::vector<SubdomainAdvertisementSpace>& spaces,
                           const std::vector<Flow>& flows, int max_sdn_chain = 2,
                           std::size_t max_paths = 2'000'000);

// All simple paths within hop bound shortest_hops + extra_hops, for the
// fully centralized scheme. No consistency structure.
PathTables full_sdn_paths(const Topology& topo, const std::vector<Flow>& flows,
                          int extra_hops = 3, std::size_t max_paths = 2'000'000);

// Inserts the node sequence as an extra candidate for the flow unless already
// present. Returns the path index.
int add_candidate_path(PathTables& tables, const Topology& topo, int flow_index,
                       const std::vector<int>& nodes);

// 1 when advertising m for destination d in sub-domain k keeps p usable, also
// vacuously 1 when p has no exit from k. d must be the path's destination.
bool consistency(const RoutePath& p, int k, int d,
                 const SubdomainAdvertisementSpace& space, const MetricVector& m);

}  // namespace sdnpart
