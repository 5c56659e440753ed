#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdnpart/harness.hpp"
#include "sdnpart/lsa.hpp"
#include "sdnpart/milp.hpp"
#include "sdnpart/optimize.hpp"
#include "sdnpart/partition.hpp"
#include "sdnpart/paths.hpp"
#include "sdnpart/topology.hpp"

namespace py = pybind11;
using namespace sdnpart;

namespace {

OptimizeContext make_context(const Partitioning* part,
                             const std::vector<SubdomainAdvertisementSpace>* spaces,
                             const PathTables* tables) {
  OptimizeContext ctx;
  ctx.partitioning = part;
  ctx.spaces = spaces;
  ctx.tables = tables;
  return ctx;
}

std::vector<int> mask_ints(const NodeMask& mask) {
  return std::vector<int>(mask.begin(), mask.end());
}

NodeMask ints_mask(const std::vector<int>& ints) {
  NodeMask mask(ints.size());
  for (std::size_t i = 0; i < ints.size(); ++i) mask[i] = ints[i] ? 1 : 0;
  return mask;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SDN partitioning toolkit";
  m.attr("__version__") = "0.1.0";

  // ====== errors ======

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<TopologyError>(m, "TopologyError");
  py::register_exception<UnreachableError>(m, "UnreachableError");
  py::register_exception<OverflowError>(m, "MetricOverflowError");
  py::register_exception<PathEnumerationError>(m, "PathEnumerationError");
  py::register_exception<InfeasiblePartitionError>(m, "InfeasiblePartitionError");
  py::register_exception<DisconnectionError>(m, "DisconnectionError");
  py::register_exception<milp::ModelError>(m, "ModelError");
  py::register_exception<ExperimentError>(m, "ExperimentError");
  static py::exception<PartitionLimitError> limit_error(m, "PartitionLimitError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PartitionLimitError& e) {
      PyErr_SetString(limit_error.ptr(), e.what());
    }
  });

  // ====== topology ======

  py::class_<Node>(m, "Node").def_readonly("id", &Node::id);

  py::class_<Link>(m, "Link")
      .def_readonly("a", &Link::a)
      .def_readonly("b", &Link::b)
      .def_readonly("metric", &Link::metric)
      .def_readonly("capacity_gbps", &Link::capacity_gbps);

  py::class_<CapacityType>(m, "CapacityType")
      .def(py::init<>())
      .def(py::init([](double rate, double cost) {
             return CapacityType{rate, cost};
           }),
           py::arg("rate_gbps"), py::arg("cost"))
      .def_readwrite("rate_gbps", &CapacityType::rate_gbps)
      .def_readwrite("cost", &CapacityType::cost);

  py::class_<Flow>(m, "Flow")
      .def(py::init<>())
      .def(py::init([](int src, int dst, double demand) {
             return Flow{src, dst, demand};
           }),
           py::arg("src"), py::arg("dst"), py::arg("demand"))
      .def_readwrite("src", &Flow::src)
      .def_readwrite("dst", &Flow::dst)
      .def_readwrite("demand", &Flow::demand);

  py::class_<PathResult>(m, "PathResult")
      .def_readonly("nodes", &PathResult::nodes)
      .def_readonly("distance", &PathResult::distance);

  py::class_<Topology>(m, "Topology")
      .def(py::init<>())
      .def("add_node", &Topology::add_node, py::arg("id"))
      .def("add_link", &Topology::add_link, py::arg("a"), py::arg("b"),
           py::arg("metric") = 10, py::arg("capacity_gbps") = std::nullopt)
      .def("node_count", &Topology::node_count)
      .def("link_count", &Topology::link_count)
      .def("node", &Topology::node, py::return_value_policy::copy)
      .def("link", &Topology::link, py::return_value_policy::copy)
      .def("nodes", &Topology::nodes, py::return_value_policy::copy)
      .def("links", &Topology::links, py::return_value_policy::copy)
      .def("find_node", &Topology::find_node)
      .def("index_of", &Topology::index_of)
      .def("link_between", &Topology::link_between)
      .def("neighbors", &Topology::neighbors, py::return_value_policy::copy)
      .def("connected", &Topology::connected)
      .def("without_link", &Topology::without_link);

  m.def("parse_topology", &parse_topology, py::arg("text"));
  m.def("load_topology", &load_topology, py::arg("path"));
  m.def("full_mask", [](const Topology& topo) { return mask_ints(full_mask(topo)); });
  m.def("mask_of", [](const Topology& topo, const std::vector<int>& nodes) {
    return mask_ints(mask_of(topo, nodes));
  });
  m.def(
      "least_cost_path",
      [](const Topology& topo, const std::vector<int>& within, int src, int dst) {
        return least_cost_path(topo, ints_mask(within), src, dst);
      },
      py::arg("topo"), py::arg("within"), py::arg("src"), py::arg("dst"));
  m.def(
      "least_cost_distances",
      [](const Topology& topo, const std::vector<int>& within, int src) {
        return least_cost_distances(topo, ints_mask(within), src);
      },
      py::arg("topo"), py::arg("within"), py::arg("src"));
  m.def(
      "has_unique_paths",
      [](const Topology& topo, const std::vector<int>& within) {
        std::vector<std::pair<int, int>> tied;
        bool ok = has_unique_paths(topo, ints_mask(within), &tied);
        return py::make_tuple(ok, tied);
      },
      py::arg("topo"), py::arg("within"));

  // ====== advertisement spaces ======

  py::class_<AdvEntry>(m, "AdvEntry")
      .def_readonly("metrics", &AdvEntry::metrics)
      .def_readonly("exits", &AdvEntry::exits)
      .def_readonly("counts", &AdvEntry::counts);

  py::class_<SubdomainAdvertisementSpace>(m, "SubdomainAdvertisementSpace")
      .def_readonly("subdomain", &SubdomainAdvertisementSpace::subdomain)
      .def_readonly("node_ids", &SubdomainAdvertisementSpace::node_ids)
      .def_readonly("border_ids", &SubdomainAdvertisementSpace::border_ids)
      .def_readonly("distances", &SubdomainAdvertisementSpace::distances)
      .def_readonly("delta_max", &SubdomainAdvertisementSpace::delta_max)
      .def_readonly("vectors", &SubdomainAdvertisementSpace::vectors)
      .def("to_json", &SubdomainAdvertisementSpace::to_json);

  m.def("delta_max", &delta_max);
  m.def(
      "exit_vector",
      [](const DeltaMatrix& delta, const MetricVector& mvec) -> py::object {
        auto e = exit_vector(delta, mvec);
        if (!e) return py::none();
        return py::cast(*e);
      },
      py::arg("delta"), py::arg("metrics"));
  m.def("quantity_vector", &quantity_vector, py::arg("exits"), py::arg("beta"));
  m.def("count_bound", &count_bound, py::arg("alpha"), py::arg("beta"));
  m.def("enumerate_metric_vectors", &enumerate_metric_vectors, py::arg("delta"));
  m.def(
      "exit_vector_feasible",
      [](const DeltaMatrix& delta, const ExitVector& exits) -> py::object {
        MetricVector witness;
        if (!exit_vector_feasible(delta, exits, &witness)) return py::none();
        return py::cast(witness);
      },
      py::arg("delta"), py::arg("exits"));
  m.def("subdomain_distances", &subdomain_distances, py::arg("topo"), py::arg("part"),
        py::arg("k"));
  m.def("enumerate_all_subdomains", &enumerate_all_subdomains, py::arg("topo"),
        py::arg("part"));
  m.def("advertisement_spaces_json", &advertisement_spaces_json);

  // ====== partitioning ======

  py::class_<milp::Limits>(m, "Limits")
      .def(py::init<>())
      .def(py::init([](long long max_nodes, double max_seconds) {
             return milp::Limits{max_nodes, max_seconds};
           }),
           py::arg("max_nodes"), py::arg("max_seconds") = 0.0)
      .def_readwrite("max_nodes", &milp::Limits::max_nodes)
      .def_readwrite("max_seconds", &milp::Limits::max_seconds);

  py::class_<Partitioning>(m, "Partitioning")
      .def(py::init<>())
      .def_readwrite("K", &Partitioning::K)
      .def_readwrite("assignment", &Partitioning::assignment)
      .def_readonly("subdomains", &Partitioning::subdomains)
      .def_readonly("borders", &Partitioning::borders)
      .def_readonly("all_borders", &Partitioning::all_borders)
      .def("finalize", &Partitioning::finalize)
      .def("subdomain_of", &Partitioning::subdomain_of)
      .def("is_border", &Partitioning::is_border)
      .def("to_json", &Partitioning::to_json)
      .def_static("from_json", &Partitioning::from_json);

  m.def(
      "partition",
      [](const Topology& topo, int K, int max_borders,
         std::optional<std::pair<int, int>> size_bounds, const milp::Limits& limits) {
        PartitionOptions opts;
        opts.size_bounds = size_bounds;
        opts.limits = limits;
        return partition(topo, K, max_borders, opts);
      },
      py::arg("topo"), py::arg("K"), py::arg("max_borders"),
      py::arg("size_bounds") = std::nullopt, py::arg("limits") = milp::Limits{});
  m.def("greedy_partition", &greedy_partition, py::arg("topo"), py::arg("K"),
        py::arg("max_borders"));
  m.def(
      "validate_partitioning",
      [](const Topology& topo, const Partitioning& part) {
        std::vector<std::string> violations;
        bool ok = validate_partitioning(topo, part, &violations);
        return py::make_tuple(ok, violations);
      },
      py::arg("topo"), py::arg("part"));

  // ====== candidate paths ======

  py::class_<PathSegment>(m, "PathSegment")
      .def_readonly("sdn_link", &PathSegment::sdn_link)
      .def_readonly("subdomain", &PathSegment::subdomain)
      .def_readonly("nodes", &PathSegment::nodes)
      .def_readonly("exit_border", &PathSegment::exit_border);

  py::class_<RoutePath::ExitChoice>(m, "ExitChoice")
      .def_readonly("subdomain", &RoutePath::ExitChoice::subdomain)
      .def_readonly("entry_row", &RoutePath::ExitChoice::entry_row)
      .def_readonly("border_pos", &RoutePath::ExitChoice::border_pos);

  py::class_<RoutePath>(m, "RoutePath")
      .def_readonly("flow", &RoutePath::flow)
      .def_readonly("nodes", &RoutePath::nodes)
      .def_readonly("segments", &RoutePath::segments)
      .def_readonly("exit_choices", &RoutePath::exit_choices);

  py::class_<PathTables>(m, "PathTables")
      .def_readonly("paths", &PathTables::paths)
      .def_readonly("flow_paths", &PathTables::flow_paths)
      .def_readonly("traversals", &PathTables::traversals);

  m.def("enumerate_paths", &enumerate_paths, py::arg("topo"), py::arg("part"),
        py::arg("spaces"), py::arg("flows"), py::arg("max_sdn_chain") = 2,
        py::arg("max_paths") = std::size_t{2'000'000});
  m.def("full_sdn_paths", &full_sdn_paths, py::arg("topo"), py::arg("flows"),
        py::arg("extra_hops") = 3, py::arg("max_paths") = std::size_t{2'000'000});
  m.def("add_candidate_path", &add_candidate_path, py::arg("tables"), py::arg("topo"),
        py::arg("flow_index"), py::arg("nodes"));
  m.def("consistency", &consistency, py::arg("path"), py::arg("k"), py::arg("d"),
        py::arg("space"), py::arg("metrics"));

  // ====== optimization ======

  py::enum_<Mode>(m, "Mode")
      .value("OSPF", Mode::Ospf)
      .value("SDN_PARTITIONING", Mode::SdnPartitioning)
      .value("FULL_SDN", Mode::FullSdn);

  py::enum_<milp::Status>(m, "Status")
      .value("OPTIMAL", milp::Status::Optimal)
      .value("FEASIBLE_WITH_GAP", milp::Status::FeasibleWithGap)
      .value("INFEASIBLE", milp::Status::Infeasible);

  m.def("mode_name", &mode_name);

  py::class_<CostFunction::Piece>(m, "CostPiece")
      .def_readwrite("slope", &CostFunction::Piece::slope)
      .def_readwrite("intercept", &CostFunction::Piece::intercept);

  py::class_<CostFunction>(m, "CostFunction")
      .def(py::init<>())
      .def_readwrite("pieces", &CostFunction::pieces)
      .def("eval", &CostFunction::eval, py::arg("u"));

  m.def("default_te_cost", &default_te_cost);
  m.def("shifted_te_cost", &shifted_te_cost, py::arg("shift") = 0.3);
  m.def("default_catalog", &default_catalog);

  py::class_<CapacityPlan>(m, "CapacityPlan")
      .def_readonly("type_of_link", &CapacityPlan::type_of_link)
      .def_readonly("capacity_per_link", &CapacityPlan::capacity_per_link)
      .def_readonly("total_cost", &CapacityPlan::total_cost)
      .def("to_json", &CapacityPlan::to_json, py::arg("topo"), py::arg("catalog"));

  py::class_<AdvertisementPlan::Choice>(m, "AdvertisementChoice")
      .def_readonly("vector_index", &AdvertisementPlan::Choice::vector_index)
      .def_readonly("metrics", &AdvertisementPlan::Choice::metrics);

  py::class_<AdvertisementPlan>(m, "AdvertisementPlan")
      .def(py::init<>())
      .def_readonly("chosen", &AdvertisementPlan::chosen)
      .def("to_json", &AdvertisementPlan::to_json, py::arg("topo"), py::arg("spaces"));

  py::class_<RoutingSolution>(m, "RoutingSolution")
      .def(py::init<>())
      .def_readonly("mode", &RoutingSolution::mode)
      .def_readonly("chosen_path", &RoutingSolution::chosen_path)
      .def_readonly("flow_routes", &RoutingSolution::flow_routes)
      .def_readonly("plan", &RoutingSolution::plan)
      .def_readonly("link_load", &RoutingSolution::link_load)
      .def_readonly("objective", &RoutingSolution::objective)
      .def_readonly("status", &RoutingSolution::status);

  py::class_<LossStats>(m, "LossStats")
      .def_readonly("loss_ratio", &LossStats::loss_ratio)
      .def_readonly("congested_fraction", &LossStats::congested_fraction);

  py::class_<RecoverResult>(m, "RecoverResult")
      .def_readonly("routing", &RecoverResult::routing)
      .def_readonly("metric_changes", &RecoverResult::metric_changes)
      .def_readonly("residual", &RecoverResult::residual)
      .def_readonly("spaces", &RecoverResult::spaces)
      .def_readonly("tables", &RecoverResult::tables);

  m.def("ospf_baseline", &ospf_baseline, py::arg("topo"), py::arg("flows"));
  m.def(
      "dimension_capacity",
      [](const Topology& topo, Mode mode, const std::vector<Flow>& flows,
         const std::vector<CapacityType>& catalog, double u_max,
         const Partitioning* part,
         const std::optional<std::vector<SubdomainAdvertisementSpace>>& spaces,
         const PathTables* tables, const milp::Limits& limits, const RoutingSolution* warm) {
        return dimension_capacity(topo, mode,
                                  make_context(part, spaces ? &*spaces : nullptr, tables),
                                  flows, catalog, u_max, limits, warm);
      },
      py::arg("topo"), py::arg("mode"), py::arg("flows"), py::arg("catalog"),
      py::arg("u_max"), py::arg("partitioning") = nullptr,
      py::arg("spaces") = std::nullopt, py::arg("tables") = nullptr,
      py::arg("limits") = milp::Limits{}, py::arg("warm") = nullptr);
  m.def(
      "balance_load",
      [](const Topology& topo, Mode mode, const std::vector<Flow>& flows,
         const std::vector<double>& capacity_per_link, const CostFunction& cost,
         const Partitioning* part,
         const std::optional<std::vector<SubdomainAdvertisementSpace>>& spaces,
         const PathTables* tables, const milp::Limits& limits, const RoutingSolution* warm) {
        return balance_load(topo, mode,
                            make_context(part, spaces ? &*spaces : nullptr, tables), flows,
                            capacity_per_link, cost, limits, warm);
      },
      py::arg("topo"), py::arg("mode"), py::arg("flows"), py::arg("capacity_per_link"),
      py::arg("cost"), py::arg("partitioning") = nullptr,
      py::arg("spaces") = std::nullopt, py::arg("tables") = nullptr,
      py::arg("limits") = milp::Limits{}, py::arg("warm") = nullptr);
  m.def("recover", &recover, py::arg("topo"), py::arg("part"), py::arg("spaces"),
        py::arg("flows"), py::arg("capacity_per_link"), py::arg("failed_link"),
        py::arg("previous"), py::arg("punishment"), py::arg("cost"),
        py::arg("limits") = milp::Limits{}, py::arg("max_sdn_chain") = 2);
  m.def("reconfiguration_events", &reconfiguration_events, py::arg("mode"),
        py::arg("topo"), py::arg("part") = nullptr, py::arg("failed_link") = 0,
        py::arg("old_plan") = nullptr, py::arg("new_plan") = nullptr);
  m.def("loss_and_congestion", &loss_and_congestion, py::arg("topo"), py::arg("solution"),
        py::arg("capacity_per_link"), py::arg("flows"));
  m.def("routing_solution_json", &routing_solution_json, py::arg("topo"),
        py::arg("solution"));

  // ====== experiment harness ======

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("topology_path", &ExperimentConfig::topology_path)
      .def_readwrite("k_values", &ExperimentConfig::k_values)
      .def_readwrite("max_borders", &ExperimentConfig::max_borders)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("u_max", &ExperimentConfig::u_max)
      .def_readwrite("target_max_load", &ExperimentConfig::target_max_load)
      .def_readwrite("catalog", &ExperimentConfig::catalog)
      .def_readwrite("knee_shift", &ExperimentConfig::knee_shift)
      .def_readwrite("histogram_bucket", &ExperimentConfig::histogram_bucket)
      .def_readwrite("punishment", &ExperimentConfig::punishment)
      .def_readwrite("max_sdn_chain", &ExperimentConfig::max_sdn_chain)
      .def_readwrite("full_sdn_extra_hops", &ExperimentConfig::full_sdn_extra_hops)
      .def_readwrite("parallel", &ExperimentConfig::parallel)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("limits", &ExperimentConfig::limits);

  py::class_<SchemeReport>(m, "SchemeReport")
      .def_readonly("scheme", &SchemeReport::scheme)
      .def_readonly("capacity_cost", &SchemeReport::capacity_cost)
      .def_readonly("capacity_ratio", &SchemeReport::capacity_ratio)
      .def_readonly("histogram", &SchemeReport::histogram)
      .def_readonly("avg_loss_permille", &SchemeReport::avg_loss_permille)
      .def_readonly("avg_congested_pct", &SchemeReport::avg_congested_pct)
      .def_readonly("avg_reconfigurations", &SchemeReport::avg_reconfigurations);

  py::class_<Report>(m, "Report")
      .def_readonly("schemes", &Report::schemes)
      .def_readonly("failures_evaluated", &Report::failures_evaluated)
      .def_readonly("skipped_failures", &Report::skipped_failures)
      .def_readonly("split_subdomain_failures", &Report::split_subdomain_failures)
      .def_readonly("histogram_bucket", &Report::histogram_bucket);

  m.def("generate_demands", &generate_demands, py::arg("topo"), py::arg("seed"),
        py::arg("target_max_load") = 80.0);
  m.def("assign_ospf_capacities", &assign_ospf_capacities, py::arg("topo"),
        py::arg("flows"), py::arg("u_max"), py::arg("catalog"));
  m.def("run_experiment", &run_experiment, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("write_report_csv", &write_report_csv, py::arg("report"), py::arg("out_dir"));
}
