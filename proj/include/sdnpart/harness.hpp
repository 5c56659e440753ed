#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdnpart/milp.hpp"
#include "sdnpart/optimize.hpp"
#include "sdnpart/topology.hpp"

namespace sdnpart {

struct ExperimentConfig {
  std::string topology_path;
  std::vector<int> k_values{2};
  int max_borders = 2;
  std::uint64_t seed = 1;
  double u_max = 0.8;
  double target_max_load = 80.0;           // Gbit/s on the busiest directional link
  std::vector<CapacityType> catalog = default_catalog();
  double knee_shift = 0.3;                 // recovery cost knee offset
  double histogram_bucket = 0.05;
  double punishment = 1.0;
  int max_sdn_chain = 2;
  int full_sdn_extra_hops = 3;
  bool parallel = false;
  std::string out_dir;                     // empty skips file output
  milp::Limits limits{200'000, 0};         // node budget keeps runs reproducible
};

struct SchemeReport {
  std::string scheme;
  double capacity_cost = 0;
  double capacity_ratio = 1.0;             // against the OSPF row
  std::vector<double> histogram;           // utilization frequency per bucket
  double avg_loss_permille = 0;
  double avg_congested_pct = 0;
  double avg_reconfigurations = 0;
};

struct Report {
  std::vector<SchemeReport> schemes;
  int failures_evaluated = 0;
  std::vector<int> skipped_failures;       // link indices whose loss disconnects the graph
  std::vector<int> split_subdomain_failures;  // skipped for the partitioned scheme only
  double histogram_bucket = 0.05;
};

struct ExperimentError : std::runtime_error {
  ExperimentError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage(stage) {}
  std::string stage;
};

// Uniform demand per ordered node pair, rescaled so the busiest directional
// link under OSPF least-cost routing carries exactly target_max_load.
std::vector<Flow> generate_demands(const Topology& topo, std::uint64_t seed,
                                   double target_max_load = 80.0);

// Smallest catalog type per link covering the OSPF load at utilization u_max.
CapacityPlan assign_ospf_capacities(const Topology& topo, const std::vector<Flow>& flows,
                                    double u_max, const std::vector<CapacityType>& catalog);

Report run_experiment(const ExperimentConfig& config);

void write_report_csv(const Report& report, const std::string& out_dir);

}  // namespace sdnpart
