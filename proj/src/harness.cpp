#include "sdnpart/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "sdnpart/lsa.hpp"
#include "sdnpart/partition.hpp"
#include "sdnpart/paths.hpp"

namespace sdnpart {

// ====== demand generation and reference capacities ======

std::vector<Flow> generate_demands(const Topology& topo, std::uint64_t seed,
                                   double target_max_load) {
  std::vector<Flow> flows;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < topo.node_count(); ++s) {
    for (int d = 0; d < topo.node_count(); ++d) {
      if (s == d) continue;
      double u = ((rng() >> 11) + 1) * (1.0 / 9007199254740992.0);
      flows.push_back({s, d, u});
    }
  }
  if (flows.empty()) return flows;
  RoutingSolution base = ospf_baseline(topo, flows);
  double peak = 0;
  for (const auto& load : base.link_load) peak = std::max({peak, load[0], load[1]});
  if (peak > 0) {
    double scale = target_max_load / peak;
    for (Flow& f : flows) f.demand *= scale;
  }
  return flows;
}

CapacityPlan assign_ospf_capacities(const Topology& topo, const std::vector<Flow>& flows,
                                    double u_max,
                                    const std::vector<CapacityType>& catalog) {
  return dimension_capacity(topo, Mode::Ospf, {}, flows, catalog, u_max).first;
}

// ====== experiment pipeline ======

namespace {

struct FailCase {
  double loss_permille = 0;
  double congested_pct = 0;
  long long reconfigs = 0;
  bool split = false;
};

std::vector<double> make_histogram(const std::vector<std::array<double, 2>>& loads,
                                   const std::vector<double>& caps, double bucket) {
  std::size_t floor_buckets = static_cast<std::size_t>(std::ceil(1.0 / bucket - 1e-9));
  std::vector<double> hist(floor_buckets, 0.0);
  for (std::size_t li = 0; li < loads.size(); ++li) {
    for (int dir = 0; dir < 2; ++dir) {
      double u = loads[li][dir] / caps[li];
      auto idx = static_cast<std::size_t>(std::floor(u / bucket + 1e-12));
      if (idx >= hist.size()) hist.resize(idx + 1, 0.0);
      hist[idx] += 1.0;
    }
  }
  double total = 2.0 * loads.size();
  if (total > 0) {
    for (double& h : hist) h /= total;
  }
  return hist;
}

std::vector<double> drop_link(const std::vector<double>& caps, int li) {
  std::vector<double> out = caps;
  out.erase(out.begin() + li);
  return out;
}

// Longest run of consecutive hops leaving a border node over the least-cost
// routes; the candidate set must allow at least that many chained SDN links
// before the regular routing becomes expressible.
int needed_sdn_chain(const Partitioning& part, const RoutingSolution& base) {
  int needed = 0;
  for (const auto& route : base.flow_routes) {
    int run = 0;
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      run = part.is_border(route[i]) ? run + 1 : 0;
      needed = std::max(needed, run);
    }
  }
  return needed;
}

void inject_baseline(PathTables& tables, const Topology& topo,
                     const std::vector<Flow>& flows, const RoutingSolution& base) {
  for (std::size_t f = 0; f < flows.size(); ++f) {
    add_candidate_path(tables, topo, static_cast<int>(f), base.flow_routes[f]);
  }
}

template <typename Fn>
std::vector<FailCase> sweep(const std::vector<int>& candidates, bool parallel, Fn&& eval) {
  std::vector<FailCase> cases(candidates.size());
  if (parallel) {
    std::vector<std::future<FailCase>> futs;
    futs.reserve(candidates.size());
    for (int li : candidates) {
      futs.push_back(std::async(std::launch::async, [&eval, li] { return eval(li); }));
    }
    for (std::size_t i = 0; i < futs.size(); ++i) cases[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < candidates.size(); ++i) cases[i] = eval(candidates[i]);
  }
  return cases;
}

void fold_sweep(SchemeReport& row, const std::vector<int>& candidates,
                const std::vector<FailCase>& cases, std::vector<int>* split_out) {
  double loss = 0, cong = 0, reconf = 0;
  int counted = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (cases[i].split) {
      if (split_out != nullptr) split_out->push_back(candidates[i]);
      continue;
    }
    loss += cases[i].loss_permille;
    cong += cases[i].congested_pct;
    reconf += static_cast<double>(cases[i].reconfigs);
    ++counted;
  }
  if (counted > 0) {
    row.avg_loss_permille = loss / counted;
    row.avg_congested_pct = cong / counted;
    row.avg_reconfigurations = reconf / counted;
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExperimentError("report", "cannot write " + path);
  out << text;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

Report run_experiment(const ExperimentConfig& config) {
  Report report;
  report.histogram_bucket = config.histogram_bucket;

  Topology topo;
  try {
    topo = load_topology(config.topology_path);
  } catch (const std::exception& e) {
    throw ExperimentError("load", e.what());
  }

  std::vector<Flow> flows;
  CapacityPlan ospf_plan;
  RoutingSolution ospf_route;
  try {
    flows = generate_demands(topo, config.seed, config.target_max_load);
    ospf_plan = assign_ospf_capacities(topo, flows, config.u_max, config.catalog);
    ospf_route = ospf_baseline(topo, flows);
    CostFunction te_cost = default_te_cost();
    for (int li = 0; li < topo.link_count(); ++li) {
      for (int dir = 0; dir < 2; ++dir) {
        ospf_route.objective += te_cost.eval(ospf_route.link_load[li][dir] /
                                             ospf_plan.capacity_per_link[li]);
      }
    }
  } catch (const std::exception& e) {
    throw ExperimentError("demands", e.what());
  }
  const std::vector<double>& caps = ospf_plan.capacity_per_link;

  std::vector<int> candidates;
  NodeMask all = full_mask(topo);
  for (int li = 0; li < topo.link_count(); ++li) {
    Topology residual = topo.without_link(li);
    std::vector<long long> dist = least_cost_distances(residual, all, 0);
    bool connected = true;
    for (int n = 0; n < residual.node_count() && connected; ++n) {
      connected = dist[n] < kUnreachable;
    }
    if (connected) {
      candidates.push_back(li);
    } else {
      report.skipped_failures.push_back(li);
    }
  }
  report.failures_evaluated = static_cast<int>(candidates.size());

  CostFunction shifted = shifted_te_cost(config.knee_shift);
  bool emit = !config.out_dir.empty();
  if (emit) std::filesystem::create_directories(config.out_dir);
  auto artifact = [&](const std::string& name, const std::string& text) {
    if (emit) write_text(config.out_dir + "/" + name, text);
  };

  // ospf scheme
  {
    SchemeReport row;
    row.scheme = "ospf";
    row.capacity_cost = ospf_plan.total_cost;
    row.capacity_ratio = 1.0;
    row.histogram = make_histogram(ospf_route.link_load, caps, config.histogram_bucket);
    try {
      auto cases = sweep(candidates, config.parallel, [&](int li) {
        FailCase fc;
        RoutingSolution after = ospf_baseline(topo.without_link(li), flows);
        LossStats stats = loss_and_congestion(topo.without_link(li), after,
                                              drop_link(caps, li), flows);
        fc.loss_permille = stats.loss_ratio * 1000.0;
        fc.congested_pct = stats.congested_fraction * 100.0;
        fc.reconfigs = reconfiguration_events(Mode::Ospf, topo, nullptr, li, nullptr,
                                              nullptr);
        return fc;
      });
      fold_sweep(row, candidates, cases, nullptr);
    } catch (const std::exception& e) {
      throw ExperimentError("sweep-ospf", e.what());
    }
    artifact("capacity_ospf.json", ospf_plan.to_json(topo, config.catalog));
    artifact("routing_ospf.json", routing_solution_json(topo, ospf_route));
    report.schemes.push_back(std::move(row));
  }

  // sdn partitioning schemes, one per K
  std::vector<std::pair<double, RoutingSolution>> dim_pool{{ospf_plan.total_cost,
                                                            ospf_route}};
  std::vector<std::pair<double, RoutingSolution>> te_pool{{ospf_route.objective,
                                                           ospf_route}};
  std::set<int> split_links;
  for (int K : config.k_values) {
    std::string scheme = "sdnpart-k" + std::to_string(K);
    Partitioning part;
    try {
      PartitionOptions popts;
      popts.limits = config.limits;
      part = partition(topo, K, config.max_borders, popts);
    } catch (const PartitionLimitError& e) {
      part = e.best;
    } catch (const std::exception& e) {
      throw ExperimentError("partition", e.what());
    }

    std::vector<SubdomainAdvertisementSpace> spaces;
    try {
      spaces = enumerate_all_subdomains(topo, part);
    } catch (const std::exception& e) {
      throw ExperimentError("enumerate-lsa", e.what());
    }

    int chain = std::max(config.max_sdn_chain, needed_sdn_chain(part, ospf_route));
    PathTables tables;
    try {
      tables = enumerate_paths(topo, part, spaces, flows, chain);
    } catch (const std::exception& e) {
      throw ExperimentError("paths", e.what());
    }
    OptimizeContext ctx{&part, &spaces, &tables};

    SchemeReport row;
    row.scheme = scheme;
    RoutingSolution te;
    try {
      auto [plan, routing] = dimension_capacity(topo, Mode::SdnPartitioning, ctx, flows,
                                                config.catalog, config.u_max,
                                                config.limits);
      row.capacity_cost = plan.total_cost;
      row.capacity_ratio =
          ospf_plan.total_cost > 0 ? plan.total_cost / ospf_plan.total_cost : 1.0;
      artifact("capacity_" + scheme + ".json", plan.to_json(topo, config.catalog));
      dim_pool.emplace_back(plan.total_cost, routing);
    } catch (const std::exception& e) {
      throw ExperimentError("dimension", e.what());
    }
    try {
      te = balance_load(topo, Mode::SdnPartitioning, ctx, flows, caps, default_te_cost(),
                        config.limits);
      row.histogram = make_histogram(te.link_load, caps, config.histogram_bucket);
      te_pool.emplace_back(te.objective, te);
    } catch (const std::exception& e) {
      throw ExperimentError("balance", e.what());
    }

    try {
      auto cases = sweep(candidates, config.parallel, [&](int li) {
        FailCase fc;
        try {
          RecoverResult rec =
              recover(topo, part, spaces, flows, caps, li, te, config.punishment,
                      shifted, config.limits, chain);
          LossStats stats = loss_and_congestion(rec.residual, rec.routing,
                                                drop_link(caps, li), flows);
          fc.loss_permille = stats.loss_ratio * 1000.0;
          fc.congested_pct = stats.congested_fraction * 100.0;
          fc.reconfigs = reconfiguration_events(Mode::SdnPartitioning, topo, &part, li,
                                                &te.plan, &rec.routing.plan);
        } catch (const DisconnectionError&) {
          fc.split = true;
        }
        return fc;
      });
      std::vector<int> split;
      fold_sweep(row, candidates, cases, &split);
      split_links.insert(split.begin(), split.end());
    } catch (const std::exception& e) {
      throw ExperimentError("recover", e.what());
    }

    artifact("partition_k" + std::to_string(K) + ".json", part.to_json(topo));
    artifact("spaces_k" + std::to_string(K) + ".json", advertisement_spaces_json(spaces));
    artifact("advertisements_" + scheme + ".json", te.plan.to_json(topo, spaces));
    artifact("routing_" + scheme + ".json", routing_solution_json(topo, te));
    report.schemes.push_back(std::move(row));
  }
  report.split_subdomain_failures.assign(split_links.begin(), split_links.end());

  // full sdn scheme
  {
    SchemeReport row;
    row.scheme = "full-sdn";
    PathTables tables;
    try {
      tables = full_sdn_paths(topo, flows, config.full_sdn_extra_hops);
      inject_baseline(tables, topo, flows, ospf_route);
      for (const auto& [obj, sol] : dim_pool) inject_baseline(tables, topo, flows, sol);
      for (const auto& [obj, sol] : te_pool) inject_baseline(tables, topo, flows, sol);
    } catch (const std::exception& e) {
      throw ExperimentError("paths", e.what());
    }
    auto best_of = [](const std::vector<std::pair<double, RoutingSolution>>& pool) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].first < pool[best].first) best = i;
      }
      return &pool[best].second;
    };
    OptimizeContext ctx{nullptr, nullptr, &tables};
    RoutingSolution te;
    try {
      auto [plan, routing] = dimension_capacity(topo, Mode::FullSdn, ctx, flows,
                                                config.catalog, config.u_max,
                                                config.limits, best_of(dim_pool));
      row.capacity_cost = plan.total_cost;
      row.capacity_ratio =
          ospf_plan.total_cost > 0 ? plan.total_cost / ospf_plan.total_cost : 1.0;
      artifact("capacity_full-sdn.json", plan.to_json(topo, config.catalog));
    } catch (const std::exception& e) {
      throw ExperimentError("dimension", e.what());
    }
    try {
      te = balance_load(topo, Mode::FullSdn, ctx, flows, caps, default_te_cost(),
                        config.limits, best_of(te_pool));
      row.histogram = make_histogram(te.link_load, caps, config.histogram_bucket);
    } catch (const std::exception& e) {
      throw ExperimentError("balance", e.what());
    }
    try {
      auto cases = sweep(candidates, config.parallel, [&](int li) {
        FailCase fc;
        Topology residual = topo.without_link(li);
        PathTables rtables = full_sdn_paths(residual, flows, config.full_sdn_extra_hops);
        RoutingSolution rbase = ospf_baseline(residual, flows);
        inject_baseline(rtables, residual, flows, rbase);
        OptimizeContext rctx{nullptr, nullptr, &rtables};
        RoutingSolution after =
            balance_load(residual, Mode::FullSdn, rctx, flows, drop_link(caps, li),
                         shifted, config.limits);
        LossStats stats =
            loss_and_congestion(residual, after, drop_link(caps, li), flows);
        fc.loss_permille = stats.loss_ratio * 1000.0;
        fc.congested_pct = stats.congested_fraction * 100.0;
        fc.reconfigs = 0;
        return fc;
      });
      fold_sweep(row, candidates, cases, nullptr);
    } catch (const std::exception& e) {
      throw ExperimentError("sweep-full-sdn", e.what());
    }
    artifact("routing_full-sdn.json", routing_solution_json(topo, te));
    report.schemes.push_back(std::move(row));
  }

  if (emit) write_report_csv(report, config.out_dir);
  return report;
}

// ====== CSV emission ======

void write_report_csv(const Report& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ostringstream cap;
  cap << "scheme,total_cost,ratio\n";
  for (const SchemeReport& row : report.schemes) {
    cap << row.scheme << "," << fmt(row.capacity_cost) << "," << fmt(row.capacity_ratio)
        << "\n";
  }
  write_text(out_dir + "/capacity.csv", cap.str());

  for (const SchemeReport& row : report.schemes) {
    std::ostringstream hist;
    hist << "bucket_low,frequency\n";
    for (std::size_t i = 0; i < row.histogram.size(); ++i) {
      hist << fmt(i * report.histogram_bucket) << "," << fmt(row.histogram[i]) << "\n";
    }
    write_text(out_dir + "/histogram_" + row.scheme + ".csv", hist.str());
  }

  std::ostringstream fail;
  fail << "scheme,loss_permille,congested_pct,reconfigs\n";
  for (const SchemeReport& row : report.schemes) {
    fail << row.scheme << "," << fmt(row.avg_loss_permille) << ","
         << fmt(row.avg_congested_pct) << "," << fmt(row.avg_reconfigurations) << "\n";
  }
  write_text(out_dir + "/failures.csv", fail.str());
}

}  // namespace sdnpart
