#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdnpart/harness.hpp"
#include "sdnpart/lsa.hpp"
#include "sdnpart/optimize.hpp"
#include "sdnpart/partition.hpp"
#include "sdnpart/paths.hpp"
#include "sdnpart/topology.hpp"

namespace {

using namespace sdnpart;

void save(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  out << text;
}

Mode parse_mode(const std::string& name) {
  if (name == "ospf") return Mode::Ospf;
  if (name == "sdnpart") return Mode::SdnPartitioning;
  if (name == "full-sdn") return Mode::FullSdn;
  throw std::invalid_argument("unknown mode " + name + " (ospf, sdnpart, full-sdn)");
}

struct Workspace {
  Topology topo;
  std::vector<Flow> flows;
  Partitioning part;
  std::vector<SubdomainAdvertisementSpace> spaces;
  PathTables tables;
  int chain = 2;
};

Partitioning run_partition(const Topology& topo, int k, int max_borders,
                           const milp::Limits& limits) {
  PartitionOptions opts;
  opts.limits = limits;
  try {
    return partition(topo, k, max_borders, opts);
  } catch (const PartitionLimitError& e) {
    std::cerr << "note: search limit reached, best partitioning has gap " << e.gap
              << "\n";
    return e.best;
  }
}

Workspace make_workspace(const std::string& topology, int k, int max_borders,
                         std::uint64_t seed, Mode mode, const milp::Limits& limits) {
  Workspace ws;
  ws.topo = load_topology(topology);
  ws.flows = generate_demands(ws.topo, seed);
  if (mode == Mode::SdnPartitioning) {
    ws.part = run_partition(ws.topo, k, max_borders, limits);
    ws.spaces = enumerate_all_subdomains(ws.topo, ws.part);
    RoutingSolution base = ospf_baseline(ws.topo, ws.flows);
    for (const auto& route : base.flow_routes) {
      int run = 0;
      for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        run = ws.part.is_border(route[i]) ? run + 1 : 0;
        ws.chain = std::max(ws.chain, run);
      }
    }
    ws.tables = enumerate_paths(ws.topo, ws.part, ws.spaces, ws.flows, ws.chain);
  } else if (mode == Mode::FullSdn) {
    ws.tables = full_sdn_paths(ws.topo, ws.flows);
    RoutingSolution base = ospf_baseline(ws.topo, ws.flows);
    for (std::size_t f = 0; f < ws.flows.size(); ++f) {
      add_candidate_path(ws.tables, ws.topo, static_cast<int>(f), base.flow_routes[f]);
    }
  }
  return ws;
}

void print_partition(const Topology& topo, const Partitioning& part) {
  std::cout << "sub-domains: " << part.K << "\n";
  for (int k = 0; k < part.K; ++k) {
    std::cout << "  R" << k + 1 << " (" << part.subdomains[k].size() << "):";
    for (int n : part.subdomains[k]) std::cout << " " << topo.node(n).id;
    std::cout << "\n";
  }
  std::cout << "borders (" << part.all_borders.size() << "):";
  for (int b : part.all_borders) std::cout << " " << topo.node(b).id;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDN partitioning toolkit"};
  app.require_subcommand(1);

  std::string topology;
  std::vector<int> k_list{2};
  int max_borders = 2;
  std::uint64_t seed = 1;
  double umax = 0.8;
  std::string out;
  bool parallel = false;
  std::string mode_name_arg = "sdnpart";
  int failed_link = 0;
  double punishment = 1.0;
  milp::Limits limits{200'000, 0};

  auto add_common = [&](CLI::App* sub, bool with_mode) {
    sub->add_option("--topology", topology, "topology file")->required();
    sub->add_option("--k", k_list, "number of sub-domains");
    sub->add_option("--max", max_borders, "border budget");
    sub->add_option("--seed", seed, "demand RNG seed");
    sub->add_option("--umax", umax, "utilization bound");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--max-nodes", limits.max_nodes, "search node budget");
    if (with_mode) sub->add_option("--mode", mode_name_arg, "ospf, sdnpart or full-sdn");
  };

  CLI::App* cmd_partition = app.add_subcommand("partition", "solve the partitioning ILP");
  add_common(cmd_partition, false);

  CLI::App* cmd_lsa =
      app.add_subcommand("enumerate-lsa", "enumerate advertisable metric vectors");
  add_common(cmd_lsa, false);

  CLI::App* cmd_dimension =
      app.add_subcommand("dimension", "minimum cost capacity assignment");
  add_common(cmd_dimension, true);

  CLI::App* cmd_balance = app.add_subcommand("balance", "traffic engineering run");
  add_common(cmd_balance, true);

  CLI::App* cmd_recover = app.add_subcommand("recover", "single link failure recovery");
  add_common(cmd_recover, false);
  cmd_recover->add_option("--link", failed_link, "failed link index");
  cmd_recover->add_option("--punishment", punishment, "metric change penalty");

  CLI::App* cmd_experiment = app.add_subcommand("experiment", "full protocol run");
  add_common(cmd_experiment, false);
  cmd_experiment->add_option("--parallel", parallel, "evaluate failures in parallel");

  CLI11_PARSE(app, argc, argv);

  std::cout << std::fixed << std::setprecision(6);
  try {
    int k = k_list.empty() ? 2 : k_list.front();

    if (*cmd_partition) {
      Topology topo = load_topology(topology);
      Partitioning part = run_partition(topo, k, max_borders, limits);
      print_partition(topo, part);
      save(out, "partition_k" + std::to_string(k) + ".json", part.to_json(topo));
    }

    if (*cmd_lsa) {
      Topology topo = load_topology(topology);
      Partitioning part = run_partition(topo, k, max_borders, limits);
      auto spaces = enumerate_all_subdomains(topo, part);
      for (const auto& space : spaces) {
        std::size_t alpha = space.node_ids.size();
        std::size_t beta = space.border_ids.size();
        std::cout << "sub-domain " << space.subdomain + 1 << ": " << alpha
                  << " interior, " << beta << " borders, " << space.vectors.size()
                  << " classes (bound " << count_bound(alpha, beta) << ")\n";
      }
      save(out, "partition_k" + std::to_string(k) + ".json", part.to_json(topo));
      save(out, "spaces_k" + std::to_string(k) + ".json",
           advertisement_spaces_json(spaces));
    }

    if (*cmd_dimension) {
      Mode mode = parse_mode(mode_name_arg);
      Workspace ws = make_workspace(topology, k, max_borders, seed, mode, limits);
      OptimizeContext ctx{&ws.part, &ws.spaces, &ws.tables};
      if (mode != Mode::SdnPartitioning) ctx.partitioning = nullptr;
      if (mode != Mode::SdnPartitioning) ctx.spaces = nullptr;
      if (mode == Mode::Ospf) ctx.tables = nullptr;
      auto [plan, routing] = dimension_capacity(ws.topo, mode, ctx, ws.flows,
                                                default_catalog(), umax, limits);
      std::cout << mode_name(mode) << " capacity cost " << plan.total_cost << "\n";
      save(out, "capacity_" + mode_name(mode) + ".json",
           plan.to_json(ws.topo, default_catalog()));
      save(out, "routing_" + mode_name(mode) + ".json",
           routing_solution_json(ws.topo, routing));
    }

    if (*cmd_balance) {
      Mode mode = parse_mode(mode_name_arg);
      Workspace ws = make_workspace(topology, k, max_borders, seed, mode, limits);
      OptimizeContext ctx{&ws.part, &ws.spaces, &ws.tables};
      if (mode != Mode::SdnPartitioning) ctx.partitioning = nullptr;
      if (mode != Mode::SdnPartitioning) ctx.spaces = nullptr;
      if (mode == Mode::Ospf) ctx.tables = nullptr;
      CapacityPlan caps = assign_ospf_capacities(ws.topo, ws.flows, umax,
                                                 default_catalog());
      RoutingSolution sol = balance_load(ws.topo, mode, ctx, ws.flows,
                                         caps.capacity_per_link, default_te_cost(),
                                         limits);
      std::cout << mode_name(mode) << " balancing objective " << sol.objective << "\n";
      save(out, "routing_" + mode_name(mode) + ".json",
           routing_solution_json(ws.topo, sol));
      if (mode == Mode::SdnPartitioning) {
        save(out, "advertisements_k" + std::to_string(k) + ".json",
             sol.plan.to_json(ws.topo, ws.spaces));
      }
    }

    if (*cmd_recover) {
      Workspace ws = make_workspace(topology, k, max_borders, seed,
                                    Mode::SdnPartitioning, limits);
      OptimizeContext ctx{&ws.part, &ws.spaces, &ws.tables};
      CapacityPlan caps = assign_ospf_capacities(ws.topo, ws.flows, umax,
                                                 default_catalog());
      RoutingSolution before = balance_load(ws.topo, Mode::SdnPartitioning, ctx,
                                            ws.flows, caps.capacity_per_link,
                                            default_te_cost(), limits);
      RecoverResult rec = recover(ws.topo, ws.part, ws.spaces, ws.flows,
                                  caps.capacity_per_link, failed_link, before,
                                  punishment, shifted_te_cost(0.3), limits, ws.chain);
      std::vector<double> rcaps = caps.capacity_per_link;
      rcaps.erase(rcaps.begin() + failed_link);
      LossStats stats = loss_and_congestion(rec.residual, rec.routing, rcaps, ws.flows);
      long long events =
          reconfiguration_events(Mode::SdnPartitioning, ws.topo, &ws.part, failed_link,
                                 &before.plan, &rec.routing.plan);
      std::cout << "failed link " << failed_link << ": " << rec.metric_changes
                << " metric changes, " << events << " reconfiguration events, loss "
                << stats.loss_ratio * 1000.0 << " permille\n";
      save(out, "recovered_routing.json",
           routing_solution_json(rec.residual, rec.routing));
      save(out, "recovered_advertisements.json",
           rec.routing.plan.to_json(rec.residual, rec.spaces));
    }

    if (*cmd_experiment) {
      ExperimentConfig config;
      config.topology_path = topology;
      config.k_values = k_list;
      config.max_borders = max_borders;
      config.seed = seed;
      config.u_max = umax;
      config.parallel = parallel;
      config.out_dir = out;
      config.limits = limits;
      Report report = run_experiment(config);
      std::cout << "scheme            cost     ratio    loss(permille) congested(%) "
                   "reconfigs\n";
      for (const SchemeReport& row : report.schemes) {
        std::cout << std::left << std::setw(16) << row.scheme << std::right << " "
                  << std::setw(8) << row.capacity_cost << " " << std::setw(8)
                  << row.capacity_ratio << " " << std::setw(14)
                  << row.avg_loss_permille << " " << std::setw(12)
                  << row.avg_congested_pct << " " << std::setw(9)
                  << row.avg_reconfigurations << "\n";
      }
      std::cout << report.failures_evaluated << " failures evaluated, "
                << report.skipped_failures.size() << " disconnecting skipped, "
                << report.split_subdomain_failures.size() << " split sub-domains\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
