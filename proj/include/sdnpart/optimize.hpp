#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sdnpart/lsa.hpp"
#include "sdnpart/milp.hpp"
#include "sdnpart/partition.hpp"
#include "sdnpart/paths.hpp"
#include "sdnpart/topology.hpp"

namespace sdnpart {

enum class Mode { Ospf, SdnPartitioning, FullSdn };

std::string mode_name(Mode mode);

// Convex piecewise linear link cost over utilization u = load / capacity.
struct CostFunction {
  struct Piece {
    double slope = 0;
    double intercept = 0;
  };
  std::vector<Piece> pieces;

  double eval(double u) const;
};

// Slopes 0/3/10/70 with knees at 0.5, 0.8 and 1.0 utilization.
CostFunction default_te_cost();
// Same slopes with every knee moved up by shift (default 0.3), the tolerant
// variant used after a failure.
CostFunction shifted_te_cost(double shift = 0.3);

// 10 / 40 / 100 Gbit/s at cost 1 / 3 / 6.
std::vector<CapacityType> default_catalog();

struct CapacityPlan {
  std::vector<int> type_of_link;        // index into the catalog
  std::vector<double> capacity_per_link;
  double total_cost = 0;

  std::string to_json(const Topology& topo, const std::vector<CapacityType>& catalog) const;
};

struct AdvertisementPlan {
  struct Choice {
    int vector_index = -1;   // class index into spaces[k].vectors
    MetricVector metrics;    // advertised values, a member of that class
  };
  // chosen[k]: destination node index -> choice. Covers every destination
  // outside sub-domain k.
  std::vector<std::map<int, Choice>> chosen;

  std::string to_json(const Topology& topo,
                      const std::vector<SubdomainAdvertisementSpace>& spaces) const;
};

struct RoutingSolution {
  Mode mode = Mode::Ospf;
  std::vector<int> chosen_path;                 // per flow, index into the path tables, -1 without tables
  std::vector<std::vector<int>> flow_routes;    // per flow, routed node sequence
  AdvertisementPlan plan;                       // partitioned mode only
  std::vector<std::array<double, 2>> link_load;
  double objective = 0;
  milp::Status status = milp::Status::Optimal;
};

struct DisconnectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs for the partitioned mode; full SDN and OSPF need none of them.
struct OptimizeContext {
  const Partitioning* partitioning = nullptr;
  const std::vector<SubdomainAdvertisementSpace>* spaces = nullptr;
  const PathTables* tables = nullptr;
};

// Single least-cost path per flow and the resulting directional link loads.
RoutingSolution ospf_baseline(const Topology& topo, const std::vector<Flow>& flows);

// Cheapest capacity assignment such that every directional load stays within
// u_max of the installed rate, with routing chosen per mode.
std::pair<CapacityPlan, RoutingSolution> dimension_capacity(
    const Topology& topo, Mode mode, const OptimizeContext& ctx,
    const std::vector<Flow>& flows, const std::vector<CapacityType>& catalog,
    double u_max, const milp::Limits& limits = {}, const RoutingSolution* warm = nullptr);

// Minimizes the summed piecewise linear congestion cost over directional
// utilizations. Loads above capacity are allowed and priced.
RoutingSolution balance_load(const Topology& topo, Mode mode, const OptimizeContext& ctx,
                             const std::vector<Flow>& flows,
                             const std::vector<double>& capacity_per_link,
                             const CostFunction& cost, const milp::Limits& limits = {},
                             const RoutingSolution* warm = nullptr);

struct RecoverResult {
  RoutingSolution routing;
  long long metric_changes = 0;                       // changed advertised components
  Topology residual;                                  // topology minus the failed link
  std::vector<SubdomainAdvertisementSpace> spaces;    // refreshed for affected sub-domains
  PathTables tables;                                  // refreshed candidate paths
};

// Re-optimizes after a single link failure, trading congestion cost against
// punishment per changed advertised metric component.
RecoverResult recover(const Topology& topo, const Partitioning& part,
                      const std::vector<SubdomainAdvertisementSpace>& spaces,
                      const std::vector<Flow>& flows,
                      const std::vector<double>& capacity_per_link, int failed_link,
                      const RoutingSolution& previous, double punishment,
                      const CostFunction& cost, const milp::Limits& limits = {},
                      int max_sdn_chain = 2);

// Number of nodes that receive updated routing state after the failure:
// flooding reach for OSPF, interior re-advertisements for the partitioned
// scheme, zero for full SDN.
long long reconfiguration_events(Mode mode, const Topology& topo, const Partitioning* part,
                                 int failed_link, const AdvertisementPlan* old_plan,
                                 const AdvertisementPlan* new_plan);

struct LossStats {
  double loss_ratio = 0;          // dropped fraction of total demand
  double congested_fraction = 0;  // fraction of directional links above capacity
};

LossStats loss_and_congestion(const Topology& topo, const RoutingSolution& sol,
                              const std::vector<double>& capacity_per_link,
                              const std::vector<Flow>& flows);

std::string routing_solution_json(const Topology& topo, const RoutingSolution& sol);

}  // namespace sdnpart
