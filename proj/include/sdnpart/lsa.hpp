#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdnpart/topology.hpp"

namespace sdnpart {

// delta[r][b]: least-cost distance from interior node r to border b measured
// inside one sub-domain. kUnreachable entries are allowed.
using DeltaMatrix = std::vector<std::vector<long long>>;
// One advertised metric per border, in border order.
using MetricVector = std::vector<long long>;
// exit[r]: border position (0..beta-1) that interior node r leaves through.
using ExitVector = std::vector<int>;
// count[b]: number of interior nodes exiting through border position b.
using QuantityVector = std::vector<int>;

struct OverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest finite entry minus smallest finite entry.
long long delta_max(const DeltaMatrix& delta);

struct TieInfo {
  int node = -1;              // interior row with the tie
  std::vector<int> borders;   // border positions sharing the minimum
};

// Exit border per interior node under advertised metrics m, or nullopt when
// some node sees two borders at equal total cost (details in *tie).
std::optional<ExitVector> exit_vector(const DeltaMatrix& delta, const MetricVector& m,
                                      TieInfo* tie = nullptr);

QuantityVector quantity_vector(const ExitVector& exits, int beta);

// binomial(beta + alpha - 1, alpha); throws OverflowError when the value does
// not fit in unsigned long long.
unsigned long long count_bound(int alpha, int beta);

struct AdvEntry {
  MetricVector metrics;   // canonical tie-free witness, smallest component is 0
  ExitVector exits;
  QuantityVector counts;
};

struct SubdomainAdvertisementSpace {
  int subdomain = -1;                    // 0-based sub-domain index, -1 for ad hoc matrices
  std::vector<std::string> node_ids;     // interior node ids, row order of distances
  std::vector<std::string> border_ids;   // border ids, column order of distances
  DeltaMatrix distances;
  long long delta_max = 0;
  std::vector<AdvEntry> vectors;         // lexicographic by exit vector

  std::string to_json() const;
};

// Complete advertisement space of one delta matrix: every exit vector that
// some nonnegative integer metric vector realizes without ties, each with a
// canonical witness.
SubdomainAdvertisementSpace enumerate_metric_vectors(const DeltaMatrix& delta);

// True when the difference system of the given exit assignment is satisfiable;
// fills *witness with a tie-free nonnegative metric vector when so.
bool exit_vector_feasible(const DeltaMatrix& delta, const ExitVector& exits,
                          MetricVector* witness = nullptr);

// Feasibility of an exit class with some metric components pinned to fixed
// values (fixed[b] >= 0 pins border b, -1 leaves it free).
bool exit_vector_feasible_fixed(const DeltaMatrix& delta, const ExitVector& exits,
                                const std::vector<long long>& fixed,
                                MetricVector* witness = nullptr);

struct Partitioning;  // partition.hpp

// Distances from every interior node of sub-domain k (row order R_k) to each
// border of k, measured in the subgraph induced by R_k union B_k.
DeltaMatrix subdomain_distances(const Topology& topo, const Partitioning& part, int k);

std::vector<SubdomainAdvertisementSpace> enumerate_all_subdomains(const Topology& topo,
                                                                  const Partitioning& part);

std::string advertisement_spaces_json(const std::vector<SubdomainAdvertisementSpace>& spaces);

}  // namespace sdnpart
