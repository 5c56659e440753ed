#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdnpart/milp.hpp"
#include "sdnpart/topology.hpp"

namespace sdnpart {

struct Partitioning {
  int K = 0;
  // assignment[n]: 1..K for interior nodes of sub-domain k, 0 for border nodes.
  std::vector<int> assignment;
  // Derived, sorted by node id inside each list.
  std::vector<std::vector<int>> subdomains;   // R_k, k = 0..K-1
  std::vector<std::vector<int>> borders;      // B_k: borders adjacent to R_k
  std::vector<int> all_borders;

  void finalize(const Topology& topo);
  // R_k union B_k as a mask.
  NodeMask subdomain_mask(const Topology& topo, int k) const;
  int subdomain_of(int node) const { return assignment.at(node) - 1; }
  bool is_border(int node) const { return assignment.at(node) == 0; }

  std::string to_json(const Topology& topo) const;
  static Partitioning from_json(const Topology& topo, const std::string& text);
};

// Convex piecewise linear lower envelope of x^2 at integer points:
// pieces y >= (2s+1) x - s(s+1) for s = 0..max_size-1.
struct SecantPiece {
  long long slope = 0;
  long long intercept = 0;
};
std::vector<SecantPiece> quadratic_secant_pieces(int max_size);

struct PartitionOptions {
  std::optional<std::pair<int, int>> size_bounds;  // min/max interior size per sub-domain
  milp::Limits limits;
};

struct InfeasiblePartitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PartitionLimitError : std::runtime_error {
  PartitionLimitError(const std::string& what, Partitioning best, double gap)
      : std::runtime_error(what), best(std::move(best)), gap(gap) {}
  Partitioning best;
  double gap = 0;
};

// Optimal partitioning into K connected sub-domains with at most max_borders
// border nodes, minimizing the sum of squared interior sizes.
Partitioning partition(const Topology& topo, int K, int max_borders,
                       const PartitionOptions& opts = {});

bool validate_partitioning(const Topology& topo, const Partitioning& part,
                           std::vector<std::string>* violations = nullptr);

// Greedy baseline used as a quality yardstick: grows K regions breadth-first
// from spread seeds and labels the leftover boundary as borders.
std::optional<Partitioning> greedy_partition(const Topology& topo, int K, int max_borders);

}  // namespace sdnpart
