#include "sdnpart/optimize.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "json.hpp"

namespace sdnpart {

// ====== modes, cost functions, catalog ======

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::Ospf:
      return "ospf";
    case Mode::SdnPartitioning:
      return "sdn-partitioning";
    case Mode::FullSdn:
      return "full-sdn";
  }
  return "unknown";
}

double CostFunction::eval(double u) const {
  double best = 0;
  for (const Piece& p : pieces) best = std::max(best, p.slope * u + p.intercept);
  return best;
}

CostFunction default_te_cost() {
  CostFunction c;
  c.pieces = {{0, 0}, {3, -1.5}, {10, -7.1}, {70, -67.1}};
  return c;
}

CostFunction shifted_te_cost(double shift) {
  CostFunction c = default_te_cost();
  for (auto& p : c.pieces) p.intercept -= p.slope * shift;
  return c;
}

std::vector<CapacityType> default_catalog() {
  return {{10, 1}, {40, 3}, {100, 6}};
}

namespace {

const char* status_name(milp::Status s) {
  switch (s) {
    case milp::Status::Optimal:
      return "optimal";
    case milp::Status::FeasibleWithGap:
      return "feasible-with-gap";
    case milp::Status::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

// ====== load bookkeeping ======

std::vector<std::array<double, 2>> loads_of(const Topology& topo,
                                            const std::vector<Flow>& flows,
                                            const std::vector<std::vector<int>>& routes) {
  std::vector<std::array<double, 2>> loads(topo.link_count(), {0.0, 0.0});
  for (std::size_t f = 0; f < routes.size(); ++f) {
    const std::vector<int>& nodes = routes[f];
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      int li = topo.link_between(nodes[i], nodes[i + 1]);
      if (li < 0) throw milp::ModelError("route uses non-adjacent nodes");
      int dir = topo.link(li).a == nodes[i] ? 0 : 1;
      loads[li][dir] += flows[f].demand;
    }
  }
  return loads;
}

double te_objective(const std::vector<std::array<double, 2>>& loads,
                    const std::vector<double>& caps, const CostFunction& cost) {
  double total = 0;
  for (std::size_t li = 0; li < loads.size(); ++li) {
    for (int dir = 0; dir < 2; ++dir) total += cost.eval(loads[li][dir] / caps[li]);
  }
  return total;
}

void check_capacities(const Topology& topo, const std::vector<double>& caps) {
  if (caps.size() != static_cast<std::size_t>(topo.link_count())) {
    throw std::invalid_argument("capacity vector does not match the link count");
  }
  for (double c : caps) {
    if (!(c > 0)) throw std::invalid_argument("every link needs a positive capacity");
  }
}

// Cheapest catalog entry whose rate carries the load within u_max, or -1.
int smallest_type(const std::vector<CapacityType>& catalog, double load, double u_max) {
  int best = -1;
  for (std::size_t t = 0; t < catalog.size(); ++t) {
    if (load > catalog[t].rate_gbps * u_max + 1e-9) continue;
    if (best < 0 || catalog[t].cost < catalog[best].cost - 1e-12 ||
        (std::fabs(catalog[t].cost - catalog[best].cost) <= 1e-12 &&
         catalog[t].rate_gbps < catalog[best].rate_gbps)) {
      best = static_cast<int>(t);
    }
  }
  return best;
}

}  // namespace

// ====== fixed-routing baselines ======

RoutingSolution ospf_baseline(const Topology& topo, const std::vector<Flow>& flows) {
  RoutingSolution sol;
  sol.mode = Mode::Ospf;
  sol.status = milp::Status::Optimal;
  sol.chosen_path.assign(flows.size(), -1);
  NodeMask all = full_mask(topo);
  sol.flow_routes.reserve(flows.size());
  for (const Flow& f : flows) {
    try {
      sol.flow_routes.push_back(least_cost_path(topo, all, f.src, f.dst).nodes);
    } catch (const UnreachableError&) {
      throw DisconnectionError("no route from " + topo.node(f.src).id + " to " +
                               topo.node(f.dst).id);
    }
  }
  sol.link_load = loads_of(topo, flows, sol.flow_routes);
  return sol;
}

// ====== advertisement blocks and model assembly ======

namespace {

struct BlockGroup {
  int var = -1;
  std::vector<int> members;  // full class indices, ascending
  std::vector<int> proj;     // exits on used rows
  int plan_member = -1;
  MetricVector plan_metrics;
  long long diff_count = 0;
};

struct AdvBlock {
  int k = -1;
  int d = -1;
  std::vector<int> used_rows;
  std::vector<int> row_slot;  // row -> index in used_rows, -1
  std::vector<BlockGroup> groups;
  std::map<std::vector<int>, int> group_of;
  std::map<std::pair<int, int>, int> chi;  // (slot, border pos) -> var
  bool aggregated = false;
};

struct RoutingParts {
  milp::Model model;
  std::vector<int> rho;
  std::vector<AdvBlock> blocks;
  std::map<std::pair<int, int>, int> block_index;
  std::vector<std::vector<int>> psi;
  std::vector<std::array<int, 2>> kappa;
};

struct RecoveryTuning {
  const AdvertisementPlan* old_plan = nullptr;
  double punishment = 0;
};

constexpr std::size_t kAggregateGroups = 16;
constexpr std::size_t kExactDiffGroups = 512;
constexpr int kExactDiffBorders = 8;

long long component_diff(const MetricVector& a, const MetricVector& b) {
  if (a.size() != b.size()) return static_cast<long long>(std::max(a.size(), b.size()));
  long long n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i] ? 1 : 0;
  return n;
}

struct DiffPick {
  long long changes = 0;
  MetricVector metrics;
};

// Best member of an exit class: fewest advertised components that differ from
// old_m, preferring larger pinned sets and smaller pin masks.
std::optional<DiffPick> class_min_diff(const DeltaMatrix& delta, const ExitVector& exits,
                                       const MetricVector& old_m) {
  int beta = static_cast<int>(old_m.size());
  for (int keep = beta; keep >= 0; --keep) {
    for (unsigned mask = 0; mask < (1u << beta); ++mask) {
      if (std::popcount(mask) != keep) continue;
      std::vector<long long> fixed(beta, -1);
      for (int b = 0; b < beta; ++b) {
        if (mask >> b & 1u) fixed[b] = old_m[b];
      }
      MetricVector witness;
      if (exit_vector_feasible_fixed(delta, exits, fixed, &witness)) {
        return DiffPick{beta - keep, std::move(witness)};
      }
    }
  }
  return std::nullopt;
}

const AdvertisementPlan::Choice* old_choice(const AdvertisementPlan* plan, int k, int d) {
  if (plan == nullptr || static_cast<std::size_t>(k) >= plan->chosen.size()) return nullptr;
  auto it = plan->chosen[k].find(d);
  return it == plan->chosen[k].end() ? nullptr : &it->second;
}

void tune_group(const SubdomainAdvertisementSpace& space, std::size_t block_groups,
                const AdvertisementPlan::Choice* old, double punishment, BlockGroup& g,
                milp::Model& model) {
  g.plan_member = g.members.front();
  g.plan_metrics = space.vectors[g.plan_member].metrics;
  g.diff_count = 0;
  if (old == nullptr) return;
  int beta = static_cast<int>(space.border_ids.size());
  bool exact = beta <= kExactDiffBorders && block_groups <= kExactDiffGroups &&
               old->metrics.size() == static_cast<std::size_t>(beta);
  if (exact) {
    bool found = false;
    for (int ci : g.members) {
      auto pick = class_min_diff(space.distances, space.vectors[ci].exits, old->metrics);
      if (pick && (!found || pick->changes < g.diff_count)) {
        found = true;
        g.diff_count = pick->changes;
        g.plan_member = ci;
        g.plan_metrics = std::move(pick->metrics);
        if (g.diff_count == 0) break;
      }
    }
    if (!found) g.diff_count = component_diff(g.plan_metrics, old->metrics);
  } else {
    g.diff_count = component_diff(g.plan_metrics, old->metrics);
  }
  if (punishment != 0) model.set_objective_coef(g.var, punishment * g.diff_count);
}

RoutingParts build_routing(const Topology& topo, Mode mode, const OptimizeContext& ctx,
                           const std::vector<Flow>& flows, const RecoveryTuning* rec) {
  const PathTables& tables = *ctx.tables;
  if (tables.flow_paths.size() != flows.size()) {
    throw std::invalid_argument("path tables do not cover the flow list");
  }
  RoutingParts P;
  P.rho.reserve(tables.paths.size());

  if (mode == Mode::SdnPartitioning) {
    const auto& spaces = *ctx.spaces;
    std::map<std::pair<int, int>, std::map<int, std::set<int>>> usage;
    for (const RoutePath& p : tables.paths) {
      for (const auto& c : p.exit_choices) {
        usage[{c.subdomain, flows[p.flow].dst}][c.entry_row].insert(c.border_pos);
      }
    }
    for (const auto& [key, rows] : usage) {
      AdvBlock blk;
      blk.k = key.first;
      blk.d = key.second;
      const SubdomainAdvertisementSpace& space = spaces.at(blk.k);
      blk.row_slot.assign(space.node_ids.size(), -1);
      for (const auto& [row, poss] : rows) {
        blk.row_slot[row] = static_cast<int>(blk.used_rows.size());
        blk.used_rows.push_back(row);
      }
      for (std::size_t ci = 0; ci < space.vectors.size(); ++ci) {
        std::vector<int> proj(blk.used_rows.size());
        for (std::size_t s = 0; s < blk.used_rows.size(); ++s) {
          proj[s] = space.vectors[ci].exits[blk.used_rows[s]];
        }
        auto [it, fresh] = blk.group_of.try_emplace(proj, static_cast<int>(blk.groups.size()));
        if (fresh) {
          BlockGroup g;
          g.proj = proj;
          blk.groups.push_back(std::move(g));
        }
        blk.groups[it->second].members.push_back(static_cast<int>(ci));
      }
      std::string tag = "k" + std::to_string(blk.k + 1) + "." + topo.node(blk.d).id;
      for (std::size_t gi = 0; gi < blk.groups.size(); ++gi) {
        blk.groups[gi].var = P.model.add_bool("phi." + tag + ".g" + std::to_string(gi));
      }
      const AdvertisementPlan::Choice* old =
          rec ? old_choice(rec->old_plan, blk.k, blk.d) : nullptr;
      for (BlockGroup& g : blk.groups) {
        tune_group(space, blk.groups.size(), old, rec ? rec->punishment : 0.0, g, P.model);
      }
      std::vector<milp::Term> one;
      one.reserve(blk.groups.size());
      for (const BlockGroup& g : blk.groups) one.push_back({g.var, 1});
      P.model.add_constraint(std::move(one), milp::Sense::EQ, 1, "one_adv." + tag);
      blk.aggregated = blk.groups.size() > kAggregateGroups;
      if (blk.aggregated) {
        for (const auto& [row, poss] : rows) {
          int slot = blk.row_slot[row];
          for (int pos : poss) {
            int var = P.model.add_bool("chi." + tag + ".r" + std::to_string(row) + ".b" +
                                       std::to_string(pos));
            std::vector<milp::Term> tie{{var, 1}};
            for (const BlockGroup& g : blk.groups) {
              if (g.proj[slot] == pos) tie.push_back({g.var, -1});
            }
            P.model.add_constraint(std::move(tie), milp::Sense::EQ, 0,
                                   "tie_chi." + tag + ".r" + std::to_string(row));
            blk.chi[{slot, pos}] = var;
          }
        }
      }
      P.block_index[key] = static_cast<int>(P.blocks.size());
      P.blocks.push_back(std::move(blk));
    }
  }

  for (std::size_t pi = 0; pi < tables.paths.size(); ++pi) {
    P.rho.push_back(P.model.add_bool("rho.p" + std::to_string(pi)));
  }
  for (std::size_t f = 0; f < flows.size(); ++f) {
    std::vector<milp::Term> terms;
    terms.reserve(tables.flow_paths[f].size());
    for (int pi : tables.flow_paths[f]) terms.push_back({P.rho[pi], 1});
    P.model.add_constraint(std::move(terms), milp::Sense::EQ, 1,
                           "one_path.f" + std::to_string(f));
  }
  if (mode == Mode::SdnPartitioning) {
    for (std::size_t pi = 0; pi < tables.paths.size(); ++pi) {
      const RoutePath& p = tables.paths[pi];
      for (const auto& c : p.exit_choices) {
        const AdvBlock& blk =
            P.blocks[P.block_index.at({c.subdomain, flows[p.flow].dst})];
        int slot = blk.row_slot[c.entry_row];
        std::vector<milp::Term> terms{{P.rho[pi], 1}};
        if (blk.aggregated) {
          terms.push_back({blk.chi.at({slot, c.border_pos}), -1});
        } else {
          for (const BlockGroup& g : blk.groups) {
            if (g.proj[slot] == c.border_pos) terms.push_back({g.var, -1});
          }
        }
        P.model.add_constraint(std::move(terms), milp::Sense::LE, 0,
                               "consistent.p" + std::to_string(pi) + ".k" +
                                   std::to_string(c.subdomain + 1));
      }
    }
  }
  return P;
}

std::vector<std::array<std::vector<milp::Term>, 2>> load_terms(
    const RoutingParts& P, const Topology& topo, const std::vector<Flow>& flows,
    const PathTables& tables) {
  std::vector<std::array<std::vector<milp::Term>, 2>> terms(topo.link_count());
  for (std::size_t pi = 0; pi < tables.paths.size(); ++pi) {
    double dm = flows[tables.paths[pi].flow].demand;
    for (const auto& [li, dir] : tables.traversals[pi]) {
      terms[li][dir].push_back({P.rho[pi], dm});
    }
  }
  return terms;
}

void add_capacity_rows(RoutingParts& P, const Topology& topo,
                       const std::vector<Flow>& flows, const PathTables& tables,
                       const std::vector<CapacityType>& catalog, double u_max) {
  auto loads = load_terms(P, topo, flows, tables);
  P.psi.assign(topo.link_count(), {});
  for (int li = 0; li < topo.link_count(); ++li) {
    std::string tag = "l" + std::to_string(li);
    milp::Group grp;
    for (std::size_t t = 0; t < catalog.size(); ++t) {
      P.psi[li].push_back(
          P.model.add_bool("psi." + tag + ".t" + std::to_string(t), catalog[t].cost));
      grp.vars.push_back(P.psi[li].back());
    }
    std::vector<milp::Term> one;
    for (int v : P.psi[li]) one.push_back({v, 1});
    grp.constraints.push_back(
        P.model.add_constraint(std::move(one), milp::Sense::EQ, 1, "one_type." + tag));
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<milp::Term> row;
      for (std::size_t t = 0; t < catalog.size(); ++t) {
        row.push_back({P.psi[li][t], catalog[t].rate_gbps * u_max});
      }
      for (const milp::Term& t : loads[li][dir]) row.push_back({t.var, -t.coef});
      grp.constraints.push_back(P.model.add_constraint(
          std::move(row), milp::Sense::GE, 0, "cap." + tag + ".d" + std::to_string(dir)));
    }
    P.model.add_group(std::move(grp));
  }
}

void add_te_rows(RoutingParts& P, const Topology& topo, const std::vector<Flow>& flows,
                 const PathTables& tables, const std::vector<double>& caps,
                 const CostFunction& cost) {
  auto loads = load_terms(P, topo, flows, tables);
  P.kappa.assign(topo.link_count(), {-1, -1});
  for (int li = 0; li < topo.link_count(); ++li) {
    for (int dir = 0; dir < 2; ++dir) {
      std::string tag = "l" + std::to_string(li) + ".d" + std::to_string(dir);
      int kv = P.model.add_continuous("kappa." + tag, 1);
      P.kappa[li][dir] = kv;
      for (std::size_t yi = 0; yi < cost.pieces.size(); ++yi) {
        const CostFunction::Piece& y = cost.pieces[yi];
        if (y.slope == 0 && y.intercept <= 0) continue;
        std::vector<milp::Term> row{{kv, 1}};
        for (const milp::Term& t : loads[li][dir]) {
          row.push_back({t.var, -y.slope * t.coef / caps[li]});
        }
        P.model.add_constraint(std::move(row), milp::Sense::GE, y.intercept,
                               "piece." + tag + ".y" + std::to_string(yi));
      }
    }
  }
}

void set_branch_order(RoutingParts& P) {
  std::vector<int> order;
  for (const AdvBlock& b : P.blocks) {
    for (const BlockGroup& g : b.groups) order.push_back(g.var);
  }
  order.insert(order.end(), P.rho.begin(), P.rho.end());
  for (const auto& link_psi : P.psi) {
    order.insert(order.end(), link_psi.begin(), link_psi.end());
  }
  P.model.set_branch_order(std::move(order));
}

// ====== warm starts and local improvement ======

constexpr double kBig = 1e15;
constexpr double kImprove = 1e-9;
constexpr std::size_t kGroupMoveLimit = 64;

struct WarmContext {
  const RoutingParts* P = nullptr;
  const std::vector<Flow>* flows = nullptr;
  const PathTables* tables = nullptr;
  int link_count = 0;
  const std::vector<CapacityType>* catalog = nullptr;  // capacity objective
  double u_max = 1.0;
  const std::vector<double>* caps = nullptr;  // balancing objective
  const CostFunction* cost = nullptr;
  double punishment = 0;
};

struct LocalState {
  std::vector<int> pinned;   // group per block
  std::vector<int> path_of;  // path per flow
  std::vector<std::array<double, 2>> load;
  double objective = 0;
};

double link_pair_cost(const WarmContext& ctx, int li, double l0, double l1) {
  if (ctx.cost != nullptr) {
    double cp = (*ctx.caps)[li];
    return ctx.cost->eval(l0 / cp) + ctx.cost->eval(l1 / cp);
  }
  int t = smallest_type(*ctx.catalog, std::max(l0, l1), ctx.u_max);
  return t < 0 ? kBig : (*ctx.catalog)[t].cost;
}

bool path_consistent(const WarmContext& ctx, const std::vector<int>& pinned, int pi) {
  const RoutePath& p = ctx.tables->paths[pi];
  for (const auto& c : p.exit_choices) {
    int bi = ctx.P->block_index.at({c.subdomain, (*ctx.flows)[p.flow].dst});
    const AdvBlock& blk = ctx.P->blocks[bi];
    if (blk.groups[pinned[bi]].proj[blk.row_slot[c.entry_row]] != c.border_pos) {
      return false;
    }
  }
  return true;
}

// Objective change of loading (dm > 0) or unloading (dm < 0) one path.
double path_delta(const WarmContext& ctx, const LocalState& state, int pi, double dm) {
  double delta = 0;
  for (const auto& [li, dir] : ctx.tables->traversals[pi]) {
    double l0 = state.load[li][0], l1 = state.load[li][1];
    double before = link_pair_cost(ctx, li, l0, l1);
    (dir == 0 ? l0 : l1) += dm;
    delta += link_pair_cost(ctx, li, l0, l1) - before;
  }
  return delta;
}

void apply_path(const WarmContext& ctx, LocalState& state, int pi, double dm) {
  state.objective += path_delta(ctx, state, pi, dm);
  for (const auto& [li, dir] : ctx.tables->traversals[pi]) state.load[li][dir] += dm;
}

// Cheapest consistent path for the flow, loads assumed stripped of it already.
bool greedy_assign(const WarmContext& ctx, LocalState& state, int f) {
  double dm = (*ctx.flows)[f].demand;
  int best = -1;
  double best_delta = 0;
  for (int pi : ctx.tables->flow_paths[f]) {
    if (!path_consistent(ctx, state.pinned, pi)) continue;
    double delta = path_delta(ctx, state, pi, dm);
    if (best < 0 || delta < best_delta - kImprove) {
      best = pi;
      best_delta = delta;
    }
  }
  if (best < 0) return false;
  state.path_of[f] = best;
  apply_path(ctx, state, best, dm);
  return true;
}

double base_objective(const WarmContext& ctx, const LocalState& state) {
  double obj = 0;
  for (int li = 0; li < ctx.link_count; ++li) {
    obj += link_pair_cost(ctx, li, state.load[li][0], state.load[li][1]);
  }
  for (std::size_t bi = 0; bi < state.pinned.size(); ++bi) {
    obj += ctx.punishment *
           static_cast<double>(ctx.P->blocks[bi].groups[state.pinned[bi]].diff_count);
  }
  return obj;
}

// Deterministic first-improvement search: path moves per flow, then
// advertisement group moves with greedy reassignment of the flows they break.
void improve_state(const WarmContext& ctx, LocalState& state) {
  const std::vector<Flow>& flows = *ctx.flows;
  for (int round = 0; round < 25; ++round) {
    bool improved = false;
    for (std::size_t f = 0; f < flows.size(); ++f) {
      int cur = state.path_of[f];
      apply_path(ctx, state, cur, -flows[f].demand);
      double keep = path_delta(ctx, state, cur, flows[f].demand);
      int best = cur;
      double best_delta = keep;
      for (int pi : ctx.tables->flow_paths[f]) {
        if (pi == cur || !path_consistent(ctx, state.pinned, pi)) continue;
        double delta = path_delta(ctx, state, pi, flows[f].demand);
        if (delta < best_delta - kImprove) {
          best = pi;
          best_delta = delta;
        }
      }
      state.path_of[f] = best;
      apply_path(ctx, state, best, flows[f].demand);
      if (best != cur) improved = true;
    }
    for (std::size_t bi = 0; bi < ctx.P->blocks.size(); ++bi) {
      const AdvBlock& blk = ctx.P->blocks[bi];
      if (blk.groups.size() > kGroupMoveLimit) continue;
      for (std::size_t g = 0; g < blk.groups.size(); ++g) {
        if (static_cast<int>(g) == state.pinned[bi]) continue;
        LocalState saved = state;
        state.objective +=
            ctx.punishment * static_cast<double>(blk.groups[g].diff_count -
                                                 blk.groups[state.pinned[bi]].diff_count);
        state.pinned[bi] = static_cast<int>(g);
        bool ok = true;
        for (std::size_t f = 0; f < flows.size() && ok; ++f) {
          if (path_consistent(ctx, state.pinned, state.path_of[f])) continue;
          apply_path(ctx, state, state.path_of[f], -flows[f].demand);
          state.path_of[f] = -1;
          ok = greedy_assign(ctx, state, static_cast<int>(f));
        }
        if (ok && state.objective < saved.objective - kImprove) {
          improved = true;
        } else {
          state = std::move(saved);
        }
      }
    }
    if (!improved) break;
  }
}

void apply_block_choice(const AdvBlock& blk, int gi, std::vector<double>& values) {
  values[blk.groups[gi].var] = 1;
  for (const auto& [key, var] : blk.chi) {
    values[var] = blk.groups[gi].proj[key.first] == key.second ? 1 : 0;
  }
}

// Completes the pin and path assignment, improves it locally, and emits the
// variable vector; nullopt when some flow has no consistent candidate.
std::optional<std::vector<double>> finish_warm(const WarmContext& ctx,
                                               std::vector<int> pinned,
                                               const std::vector<int>& preferred) {
  const std::vector<Flow>& flows = *ctx.flows;
  LocalState state;
  state.pinned = std::move(pinned);
  state.path_of.assign(flows.size(), -1);
  state.load.assign(ctx.link_count, {0.0, 0.0});
  state.objective = base_objective(ctx, state);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    if (preferred[f] >= 0 && path_consistent(ctx, state.pinned, preferred[f])) {
      state.path_of[f] = preferred[f];
      apply_path(ctx, state, preferred[f], flows[f].demand);
    }
  }
  for (std::size_t f = 0; f < flows.size(); ++f) {
    if (state.path_of[f] < 0 && !greedy_assign(ctx, state, static_cast<int>(f))) {
      return std::nullopt;
    }
  }
  improve_state(ctx, state);
  const RoutingParts& P = *ctx.P;
  std::vector<double> values(P.model.variables().size(), 0.0);
  for (std::size_t bi = 0; bi < P.blocks.size(); ++bi) {
    apply_block_choice(P.blocks[bi], state.pinned[bi], values);
  }
  for (std::size_t f = 0; f < flows.size(); ++f) values[P.rho[state.path_of[f]]] = 1;
  if (ctx.catalog != nullptr) {
    for (int li = 0; li < ctx.link_count; ++li) {
      int t = smallest_type(*ctx.catalog, std::max(state.load[li][0], state.load[li][1]),
                            ctx.u_max);
      if (t < 0) return std::nullopt;
      values[P.psi[li][t]] = 1;
    }
  }
  return values;
}

// Maps an existing routing solution onto the model variables; nullopt when the
// routing cannot be expressed with the current tables or spaces.
std::optional<std::vector<double>> warm_vector(
    const WarmContext& ctx, const std::vector<SubdomainAdvertisementSpace>* spaces,
    const RoutingSolution& warm) {
  const std::vector<Flow>& flows = *ctx.flows;
  const PathTables& tables = *ctx.tables;
  const RoutingParts& P = *ctx.P;
  if (warm.flow_routes.size() != flows.size()) return std::nullopt;
  std::vector<int> chosen(flows.size(), -1);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    for (int pi : tables.flow_paths[f]) {
      if (tables.paths[pi].nodes == warm.flow_routes[f]) {
        chosen[f] = pi;
        break;
      }
    }
    if (chosen[f] < 0) return std::nullopt;
  }
  std::vector<int> pinned(P.blocks.size(), 0);
  for (std::size_t bi = 0; bi < P.blocks.size(); ++bi) {
    const AdvBlock& blk = P.blocks[bi];
    const SubdomainAdvertisementSpace& space = spaces->at(blk.k);
    std::map<int, int> need;  // slot -> pos demanded by the matched paths
    for (std::size_t f = 0; f < flows.size(); ++f) {
      if (flows[f].dst != blk.d) continue;
      for (const auto& c : tables.paths[chosen[f]].exit_choices) {
        if (c.subdomain != blk.k) continue;
        auto [it, fresh] = need.emplace(blk.row_slot[c.entry_row], c.border_pos);
        if (!fresh && it->second != c.border_pos) return std::nullopt;
      }
    }
    auto fits = [&](const std::vector<int>& proj) {
      for (const auto& [slot, pos] : need) {
        if (proj[slot] != pos) return false;
      }
      return true;
    };
    int gi = -1;
    const AdvertisementPlan::Choice* pref = old_choice(&warm.plan, blk.k, blk.d);
    if (pref != nullptr && pref->vector_index >= 0 &&
        static_cast<std::size_t>(pref->vector_index) < space.vectors.size()) {
      std::vector<int> proj(blk.used_rows.size());
      for (std::size_t s = 0; s < blk.used_rows.size(); ++s) {
        proj[s] = space.vectors[pref->vector_index].exits[blk.used_rows[s]];
      }
      if (fits(proj)) gi = blk.group_of.at(proj);
    }
    if (gi < 0) {
      for (std::size_t g = 0; g < blk.groups.size(); ++g) {
        if (fits(blk.groups[g].proj)) {
          gi = static_cast<int>(g);
          break;
        }
      }
    }
    if (gi < 0) return std::nullopt;
    pinned[bi] = gi;
  }
  return finish_warm(ctx, std::move(pinned), chosen);
}

// Routes every flow before pinning: commits the exit requirements of the
// first admissible candidate per flow, then picks the lowest-diff group
// matching the commitments of each block. Keeps the previous plan wherever
// the surviving paths allow it.
std::vector<int> route_first_pins(const WarmContext& ctx, std::vector<int>& preferred) {
  const RoutingParts& P = *ctx.P;
  const PathTables& tables = *ctx.tables;
  std::vector<std::map<int, int>> need(P.blocks.size());
  auto matches = [&](int bi, const std::map<int, int>& extra) {
    for (const BlockGroup& g : P.blocks[bi].groups) {
      bool ok = true;
      for (const auto& [slot, pos] : need[bi]) {
        if (g.proj[slot] != pos) {
          ok = false;
          break;
        }
      }
      for (const auto& [slot, pos] : extra) {
        if (ok && g.proj[slot] != pos) ok = false;
      }
      if (ok) return true;
    }
    return false;
  };
  auto compatible = [&](int pi) {
    const RoutePath& p = tables.paths[pi];
    for (const auto& c : p.exit_choices) {
      int bi = P.block_index.at({c.subdomain, (*ctx.flows)[p.flow].dst});
      const AdvBlock& blk = P.blocks[bi];
      std::map<int, int> extra{{blk.row_slot[c.entry_row], c.border_pos}};
      if (!matches(bi, extra)) return false;
    }
    return true;
  };
  auto commit = [&](int pi) {
    const RoutePath& p = tables.paths[pi];
    for (const auto& c : p.exit_choices) {
      int bi = P.block_index.at({c.subdomain, (*ctx.flows)[p.flow].dst});
      need[bi][P.blocks[bi].row_slot[c.entry_row]] = c.border_pos;
    }
  };
  for (std::size_t f = 0; f < ctx.flows->size(); ++f) {
    int taken = -1;
    if (preferred[f] >= 0 && compatible(preferred[f])) taken = preferred[f];
    for (int pi : tables.flow_paths[f]) {
      if (taken >= 0) break;
      if (compatible(pi)) taken = pi;
    }
    if (taken >= 0) commit(taken);
    preferred[f] = taken;
  }
  std::vector<int> pinned(P.blocks.size(), 0);
  for (std::size_t bi = 0; bi < P.blocks.size(); ++bi) {
    const AdvBlock& blk = P.blocks[bi];
    int best = -1;
    for (std::size_t g = 0; g < blk.groups.size(); ++g) {
      bool ok = true;
      for (const auto& [slot, pos] : need[bi]) {
        if (blk.groups[g].proj[slot] != pos) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (best < 0 || blk.groups[g].diff_count < blk.groups[best].diff_count) {
        best = static_cast<int>(g);
      }
    }
    pinned[bi] = best < 0 ? 0 : best;
  }
  return pinned;
}

// Column of the first border crossed on the canonical least-cost route, -1
// when that border is not part of B_k.
int first_border_col(const Topology& topo, const Partitioning& part, int k, int from,
                     int to, const NodeMask& all) {
  PathResult pr = least_cost_path(topo, all, from, to);
  for (std::size_t i = 1; i < pr.nodes.size(); ++i) {
    if (part.is_border(pr.nodes[i])) {
      const auto& B = part.borders[k];
      auto it = std::find(B.begin(), B.end(), pr.nodes[i]);
      return it == B.end() ? -1 : static_cast<int>(it - B.begin());
    }
  }
  return -1;
}

// Seeds the partitioned model with the least-cost routing: each sub-domain
// advertises the exit pattern of the regular least-cost tree wherever that
// pattern is realizable.
std::optional<std::vector<double>> projection_warm(const WarmContext& ctx,
                                                   const Topology& topo,
                                                   const Partitioning& part) {
  const RoutingParts& P = *ctx.P;
  const std::vector<Flow>& flows = *ctx.flows;
  NodeMask all = full_mask(topo);
  std::vector<int> pinned(P.blocks.size(), 0);
  for (std::size_t bi = 0; bi < P.blocks.size(); ++bi) {
    const AdvBlock& blk = P.blocks[bi];
    std::vector<int> proj(blk.used_rows.size(), -1);
    bool complete = true;
    for (std::size_t s = 0; s < blk.used_rows.size(); ++s) {
      int node = part.subdomains[blk.k][blk.used_rows[s]];
      proj[s] = first_border_col(topo, part, blk.k, node, blk.d, all);
      if (proj[s] < 0) complete = false;
    }
    if (complete) {
      auto it = blk.group_of.find(proj);
      if (it != blk.group_of.end()) pinned[bi] = it->second;
    }
  }
  std::vector<int> preferred(flows.size(), -1);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    PathResult pr = least_cost_path(topo, all, flows[f].src, flows[f].dst);
    for (int pi : ctx.tables->flow_paths[f]) {
      if (ctx.tables->paths[pi].nodes == pr.nodes) {
        preferred[f] = pi;
        break;
      }
    }
  }
  return finish_warm(ctx, std::move(pinned), preferred);
}

// ====== solution extraction ======

void read_routing(const RoutingParts& P, const milp::Solution& sol, const Topology& topo,
                  const std::vector<Flow>& flows, const PathTables& tables,
                  RoutingSolution& out) {
  out.status = sol.status;
  out.objective = sol.objective;
  out.chosen_path.assign(flows.size(), -1);
  out.flow_routes.assign(flows.size(), {});
  for (std::size_t f = 0; f < flows.size(); ++f) {
    for (int pi : tables.flow_paths[f]) {
      if (sol.values[P.rho[pi]] > 0.5) {
        out.chosen_path[f] = pi;
        out.flow_routes[f] = tables.paths[pi].nodes;
        break;
      }
    }
    if (out.chosen_path[f] < 0) throw milp::ModelError("flow left without a path");
  }
  out.link_load = loads_of(topo, flows, out.flow_routes);
}

struct RecoveryExtract {
  const AdvertisementPlan* old_plan = nullptr;
  const std::vector<char>* affected = nullptr;
  long long changes = 0;
};

// Chosen advertisement per (sub-domain, destination); pairs no candidate path
// cares about get a deterministic filler, or the previous advertisement during
// recovery.
void read_plan(const RoutingParts& P, const milp::Solution& sol, const Topology& topo,
               const Partitioning& part,
               const std::vector<SubdomainAdvertisementSpace>& spaces,
               RecoveryExtract* rec, AdvertisementPlan& plan) {
  plan.chosen.assign(part.K, {});
  for (const AdvBlock& blk : P.blocks) {
    int gi = -1;
    for (std::size_t g = 0; g < blk.groups.size(); ++g) {
      if (sol.values[blk.groups[g].var] > 0.5) {
        gi = static_cast<int>(g);
        break;
      }
    }
    if (gi < 0) throw milp::ModelError("advertisement block left unassigned");
    const BlockGroup& g = blk.groups[gi];
    plan.chosen[blk.k][blk.d] = {g.plan_member, g.plan_metrics};
    if (rec != nullptr) rec->changes += g.diff_count;
  }
  for (int k = 0; k < part.K; ++k) {
    const SubdomainAdvertisementSpace& space = spaces[k];
    if (space.vectors.empty()) continue;
    NodeMask mask = part.subdomain_mask(topo, k);
    for (int d = 0; d < topo.node_count(); ++d) {
      if (mask[d] || plan.chosen[k].count(d) != 0) continue;
      const AdvertisementPlan::Choice* old = rec ? old_choice(rec->old_plan, k, d) : nullptr;
      if (old == nullptr) {
        plan.chosen[k][d] = {0, space.vectors[0].metrics};
        continue;
      }
      if (!(*rec->affected)[k]) {
        plan.chosen[k][d] = *old;
        continue;
      }
      std::optional<ExitVector> exits = exit_vector(space.distances, old->metrics);
      if (exits) {
        int ci = -1;
        for (std::size_t v = 0; v < space.vectors.size(); ++v) {
          if (space.vectors[v].exits == *exits) {
            ci = static_cast<int>(v);
            break;
          }
        }
        if (ci >= 0) {
          plan.chosen[k][d] = {ci, old->metrics};
          continue;
        }
      }
      int beta = static_cast<int>(space.border_ids.size());
      bool exact = beta <= kExactDiffBorders && space.vectors.size() <= kExactDiffGroups &&
                   old->metrics.size() == static_cast<std::size_t>(beta);
      AdvertisementPlan::Choice pick{0, space.vectors[0].metrics};
      long long best = component_diff(pick.metrics, old->metrics);
      if (exact) {
        for (std::size_t v = 0; v < space.vectors.size(); ++v) {
          auto cand = class_min_diff(space.distances, space.vectors[v].exits, old->metrics);
          if (cand && cand->changes < best) {
            best = cand->changes;
            pick = {static_cast<int>(v), std::move(cand->metrics)};
            if (best == 0) break;
          }
        }
      }
      plan.chosen[k][d] = std::move(pick);
      rec->changes += best;
    }
  }
}

}  // namespace

// ====== capacity dimensioning ======

std::pair<CapacityPlan, RoutingSolution> dimension_capacity(
    const Topology& topo, Mode mode, const OptimizeContext& ctx,
    const std::vector<Flow>& flows, const std::vector<CapacityType>& catalog,
    double u_max, const milp::Limits& limits, const RoutingSolution* warm) {
  if (!(u_max > 0) || u_max > 1) throw std::invalid_argument("u_max must be in (0,1]");
  if (catalog.empty()) throw std::invalid_argument("capacity catalog is empty");

  if (mode == Mode::Ospf) {
    RoutingSolution routing = ospf_baseline(topo, flows);
    CapacityPlan plan;
    plan.type_of_link.assign(topo.link_count(), -1);
    plan.capacity_per_link.assign(topo.link_count(), 0);
    for (int li = 0; li < topo.link_count(); ++li) {
      int t = smallest_type(catalog,
                            std::max(routing.link_load[li][0], routing.link_load[li][1]),
                            u_max);
      if (t < 0) {
        throw milp::ModelError("no capacity type carries the load on link " +
                               topo.node(topo.link(li).a).id + "-" +
                               topo.node(topo.link(li).b).id);
      }
      plan.type_of_link[li] = t;
      plan.capacity_per_link[li] = catalog[t].rate_gbps;
      plan.total_cost += catalog[t].cost;
    }
    routing.objective = plan.total_cost;
    return {std::move(plan), std::move(routing)};
  }

  if (ctx.tables == nullptr) throw std::invalid_argument("path tables required");
  if (mode == Mode::SdnPartitioning &&
      (ctx.partitioning == nullptr || ctx.spaces == nullptr)) {
    throw std::invalid_argument("partitioning context required");
  }
  RoutingParts P = build_routing(topo, mode, ctx, flows, nullptr);
  add_capacity_rows(P, topo, flows, *ctx.tables, catalog, u_max);
  set_branch_order(P);

  WarmContext wc;
  wc.P = &P;
  wc.flows = &flows;
  wc.tables = ctx.tables;
  wc.link_count = topo.link_count();
  wc.catalog = &catalog;
  wc.u_max = u_max;
  std::optional<std::vector<double>> wv;
  if (warm != nullptr) wv = warm_vector(wc, ctx.spaces, *warm);
  if (!wv) {
    if (mode == Mode::SdnPartitioning) {
      wv = projection_warm(wc, topo, *ctx.partitioning);
    } else {
      wv = warm_vector(wc, nullptr, ospf_baseline(topo, flows));
    }
  }
  milp::Solution sol = milp::solve(P.model, limits, wv ? &*wv : nullptr);
  if (sol.status == milp::Status::Infeasible) {
    throw milp::ModelError("capacity dimensioning is infeasible for the demand set");
  }

  RoutingSolution routing;
  routing.mode = mode;
  read_routing(P, sol, topo, flows, *ctx.tables, routing);
  if (mode == Mode::SdnPartitioning) {
    read_plan(P, sol, topo, *ctx.partitioning, *ctx.spaces, nullptr, routing.plan);
  }
  CapacityPlan plan;
  plan.type_of_link.assign(topo.link_count(), -1);
  plan.capacity_per_link.assign(topo.link_count(), 0);
  for (int li = 0; li < topo.link_count(); ++li) {
    for (std::size_t t = 0; t < catalog.size(); ++t) {
      if (sol.values[P.psi[li][t]] > 0.5) {
        plan.type_of_link[li] = static_cast<int>(t);
        plan.capacity_per_link[li] = catalog[t].rate_gbps;
        plan.total_cost += catalog[t].cost;
        break;
      }
    }
    if (plan.type_of_link[li] < 0) throw milp::ModelError("link left without a type");
  }
  return {std::move(plan), std::move(routing)};
}

// ====== traffic engineering ======

RoutingSolution balance_load(const Topology& topo, Mode mode, const OptimizeContext& ctx,
                             const std::vector<Flow>& flows,
                             const std::vector<double>& capacity_per_link,
                             const CostFunction& cost, const milp::Limits& limits,
                             const RoutingSolution* warm) {
  check_capacities(topo, capacity_per_link);

  if (mode == Mode::Ospf) {
    RoutingSolution routing = ospf_baseline(topo, flows);
    routing.objective = te_objective(routing.link_load, capacity_per_link, cost);
    return routing;
  }

  if (ctx.tables == nullptr) throw std::invalid_argument("path tables required");
  if (mode == Mode::SdnPartitioning &&
      (ctx.partitioning == nullptr || ctx.spaces == nullptr)) {
    throw std::invalid_argument("partitioning context required");
  }
  RoutingParts P = build_routing(topo, mode, ctx, flows, nullptr);
  add_te_rows(P, topo, flows, *ctx.tables, capacity_per_link, cost);
  set_branch_order(P);

  WarmContext wc;
  wc.P = &P;
  wc.flows = &flows;
  wc.tables = ctx.tables;
  wc.link_count = topo.link_count();
  wc.caps = &capacity_per_link;
  wc.cost = &cost;
  std::optional<std::vector<double>> wv;
  if (warm != nullptr) wv = warm_vector(wc, ctx.spaces, *warm);
  if (!wv) {
    if (mode == Mode::SdnPartitioning) {
      wv = projection_warm(wc, topo, *ctx.partitioning);
    } else {
      wv = warm_vector(wc, nullptr, ospf_baseline(topo, flows));
    }
  }
  milp::Solution sol = milp::solve(P.model, limits, wv ? &*wv : nullptr);
  if (sol.status == milp::Status::Infeasible) {
    throw milp::ModelError("load balancing model is infeasible");
  }
  RoutingSolution routing;
  routing.mode = mode;
  read_routing(P, sol, topo, flows, *ctx.tables, routing);
  if (mode == Mode::SdnPartitioning) {
    read_plan(P, sol, topo, *ctx.partitioning, *ctx.spaces, nullptr, routing.plan);
  }
  return routing;
}

// ====== failure recovery ======

namespace {

SubdomainAdvertisementSpace refresh_space(const Topology& topo, const Partitioning& part,
                                          int k) {
  SubdomainAdvertisementSpace space =
      enumerate_metric_vectors(subdomain_distances(topo, part, k));
  space.subdomain = k;
  for (int r : part.subdomains[k]) space.node_ids.push_back(topo.node(r).id);
  for (int b : part.borders[k]) space.border_ids.push_back(topo.node(b).id);
  return space;
}

}  // namespace

RecoverResult recover(const Topology& topo, const Partitioning& part,
                      const std::vector<SubdomainAdvertisementSpace>& spaces,
                      const std::vector<Flow>& flows,
                      const std::vector<double>& capacity_per_link, int failed_link,
                      const RoutingSolution& previous, double punishment,
                      const CostFunction& cost, const milp::Limits& limits,
                      int max_sdn_chain) {
  if (failed_link < 0 || failed_link >= topo.link_count()) {
    throw std::invalid_argument("failed link index out of range");
  }
  check_capacities(topo, capacity_per_link);

  RecoverResult result;
  result.residual = topo.without_link(failed_link);
  std::vector<double> rcaps = capacity_per_link;
  rcaps.erase(rcaps.begin() + failed_link);

  const Link& failed = topo.link(failed_link);
  std::vector<char> affected(part.K, 0);
  result.spaces = spaces;
  for (int k = 0; k < part.K; ++k) {
    NodeMask mask = part.subdomain_mask(topo, k);
    if (mask[failed.a] && mask[failed.b]) {
      affected[k] = 1;
      result.spaces[k] = refresh_space(result.residual, part, k);
    }
  }

  NodeMask all = full_mask(result.residual);
  std::map<int, std::vector<long long>> reach;
  for (const Flow& f : flows) {
    auto it = reach.find(f.dst);
    if (it == reach.end()) {
      it = reach.emplace(f.dst, least_cost_distances(result.residual, all, f.dst)).first;
    }
    if (it->second[f.src] >= kUnreachable) {
      throw DisconnectionError("failure of " + topo.node(failed.a).id + "-" +
                               topo.node(failed.b).id + " disconnects " +
                               topo.node(f.src).id + " from " + topo.node(f.dst).id);
    }
  }
  try {
    result.tables =
        enumerate_paths(result.residual, part, result.spaces, flows, max_sdn_chain);
  } catch (const PathEnumerationError& e) {
    std::string what = e.what();
    if (what.rfind("no admissible path", 0) == 0) throw DisconnectionError(what);
    throw;
  }

  OptimizeContext rctx{&part, &result.spaces, &result.tables};
  RecoveryTuning tune{&previous.plan, punishment};
  RoutingParts P = build_routing(result.residual, Mode::SdnPartitioning, rctx, flows, &tune);
  add_te_rows(P, result.residual, flows, result.tables, rcaps, cost);
  set_branch_order(P);

  WarmContext wc;
  wc.P = &P;
  wc.flows = &flows;
  wc.tables = &result.tables;
  wc.link_count = result.residual.link_count();
  wc.caps = &rcaps;
  wc.cost = &cost;
  wc.punishment = punishment;
  std::vector<int> preferred(flows.size(), -1);
  if (previous.flow_routes.size() == flows.size()) {
    for (std::size_t f = 0; f < flows.size(); ++f) {
      for (int pi : result.tables.flow_paths[f]) {
        if (result.tables.paths[pi].nodes == previous.flow_routes[f]) {
          preferred[f] = pi;
          break;
        }
      }
    }
  }
  std::vector<int> pinned = route_first_pins(wc, preferred);
  std::optional<std::vector<double>> wv = finish_warm(wc, std::move(pinned), preferred);

  milp::Solution sol = milp::solve(P.model, limits, wv ? &*wv : nullptr);
  if (sol.status == milp::Status::Infeasible) {
    throw milp::ModelError("recovery model is infeasible");
  }
  result.routing.mode = Mode::SdnPartitioning;
  read_routing(P, sol, result.residual, flows, result.tables, result.routing);
  RecoveryExtract rex{&previous.plan, &affected, 0};
  read_plan(P, sol, result.residual, part, result.spaces, &rex, result.routing.plan);
  result.metric_changes = rex.changes;
  return result;
}

// ====== stability and loss reporting ======

long long reconfiguration_events(Mode mode, const Topology& topo, const Partitioning* part,
                                 int failed_link, const AdvertisementPlan* old_plan,
                                 const AdvertisementPlan* new_plan) {
  if (mode == Mode::Ospf) return 2LL * topo.node_count();
  if (mode == Mode::FullSdn) return 0;
  if (part == nullptr) throw std::invalid_argument("partitioning required");
  long long events = 0;
  const Link& failed = topo.link(failed_link);
  for (int u : {failed.a, failed.b}) {
    if (!part->is_border(u)) {
      events += static_cast<long long>(part->subdomains[part->subdomain_of(u)].size());
    }
  }
  if (old_plan != nullptr && new_plan != nullptr) {
    int upto = std::min(old_plan->chosen.size(), new_plan->chosen.size());
    for (int k = 0; k < upto; ++k) {
      long long interior = static_cast<long long>(part->subdomains[k].size());
      for (const auto& [d, choice] : new_plan->chosen[k]) {
        auto it = old_plan->chosen[k].find(d);
        if (it == old_plan->chosen[k].end()) continue;
        events += component_diff(it->second.metrics, choice.metrics) * interior;
      }
    }
  }
  return events;
}

LossStats loss_and_congestion(const Topology& topo, const RoutingSolution& sol,
                              const std::vector<double>& capacity_per_link,
                              const std::vector<Flow>& flows) {
  check_capacities(topo, capacity_per_link);
  LossStats stats;
  double total_demand = 0;
  for (const Flow& f : flows) total_demand += f.demand;
  double excess = 0;
  int congested = 0;
  for (int li = 0; li < topo.link_count(); ++li) {
    for (int dir = 0; dir < 2; ++dir) {
      double over = sol.link_load[li][dir] - capacity_per_link[li];
      if (over > 1e-9) {
        excess += over;
        ++congested;
      }
    }
  }
  stats.loss_ratio = total_demand > 0 ? excess / total_demand : 0;
  stats.congested_fraction =
      topo.link_count() > 0 ? congested / (2.0 * topo.link_count()) : 0;
  return stats;
}

// ====== serialization ======

std::string CapacityPlan::to_json(const Topology& topo,
                                  const std::vector<CapacityType>& catalog) const {
  nlohmann::json j;
  j["total_cost"] = total_cost;
  nlohmann::json links = nlohmann::json::array();
  for (std::size_t li = 0; li < type_of_link.size(); ++li) {
    nlohmann::json e;
    const Link& l = topo.link(static_cast<int>(li));
    e["a"] = topo.node(l.a).id;
    e["b"] = topo.node(l.b).id;
    e["rate_gbps"] = capacity_per_link[li];
    e["cost"] = catalog.at(type_of_link[li]).cost;
    links.push_back(std::move(e));
  }
  j["links"] = std::move(links);
  return j.dump(2);
}

std::string AdvertisementPlan::to_json(
    const Topology& topo, const std::vector<SubdomainAdvertisementSpace>& spaces) const {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    nlohmann::json j;
    j["subdomain"] = k + 1;
    j["borders"] = spaces.at(k).border_ids;
    nlohmann::json dests = nlohmann::json::array();
    for (const auto& [d, choice] : chosen[k]) {
      nlohmann::json e;
      e["destination"] = topo.node(d).id;
      e["vector"] = choice.vector_index;
      e["metrics"] = choice.metrics;
      dests.push_back(std::move(e));
    }
    j["advertisements"] = std::move(dests);
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::string routing_solution_json(const Topology& topo, const RoutingSolution& sol) {
  nlohmann::json j;
  j["mode"] = mode_name(sol.mode);
  j["status"] = status_name(sol.status);
  j["objective"] = sol.objective;
  nlohmann::json flows = nlohmann::json::array();
  for (const auto& route : sol.flow_routes) {
    nlohmann::json ids = nlohmann::json::array();
    for (int n : route) ids.push_back(topo.node(n).id);
    flows.push_back(std::move(ids));
  }
  j["routes"] = std::move(flows);
  nlohmann::json links = nlohmann::json::array();
  for (int li = 0; li < topo.link_count(); ++li) {
    nlohmann::json e;
    e["a"] = topo.node(topo.link(li).a).id;
    e["b"] = topo.node(topo.link(li).b).id;
    e["load_ab"] = sol.link_load[li][0];
    e["load_ba"] = sol.link_load[li][1];
    links.push_back(std::move(e));
  }
  j["links"] = std::move(links);
  return j.dump(2);
}

}  // namespace sdnpart
