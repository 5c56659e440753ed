#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "sdnpart/lsa.hpp"
#include "sdnpart/partition.hpp"
#include "sdnpart/paths.hpp"
#include "util.hpp"

using namespace sdnpart;

namespace {

struct Workspace {
  Topology topo;
  Partitioning part;
  std::vector<SubdomainAdvertisementSpace> spaces;
  std::vector<Flow> flows;
  PathTables tables;
};

Workspace demo_workspace(int max_sdn_chain = 2) {
  Workspace w;
  w.topo = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  w.part = partition(w.topo, 2, 2);
  w.spaces = enumerate_all_subdomains(w.topo, w.part);
  for (int s = 0; s < w.topo.node_count(); ++s)
    for (int d = 0; d < w.topo.node_count(); ++d)
      if (s != d) w.flows.push_back({s, d, 1.0});
  w.tables = enumerate_paths(w.topo, w.part, w.spaces, w.flows, max_sdn_chain);
  return w;
}

int row_of(const Partitioning& part, int k, int node) {
  const auto& group = part.subdomains[k];
  for (size_t i = 0; i < group.size(); ++i)
    if (group[i] == node) return static_cast<int>(i);
  return -1;
}

int border_pos_of(const Partitioning& part, int k, int node) {
  const auto& group = part.borders[k];
  for (size_t i = 0; i < group.size(); ++i)
    if (group[i] == node) return static_cast<int>(i);
  return -1;
}

}  // namespace

// ====== structural invariants ======

TEST_CASE("every candidate path is simple and connected end to end") {
  Workspace w = demo_workspace();
  CHECK(w.tables.paths.size() > w.flows.size());  // alternatives must exist
  REQUIRE(w.tables.flow_paths.size() == w.flows.size());
  for (size_t f = 0; f < w.flows.size(); ++f) {
    REQUIRE(!w.tables.flow_paths[f].empty());
    for (int pi : w.tables.flow_paths[f]) {
      const RoutePath& p = w.tables.paths[pi];
      CHECK(p.flow == static_cast<int>(f));
      REQUIRE(p.nodes.size() >= 2);
      CHECK(p.nodes.front() == w.flows[f].src);
      CHECK(p.nodes.back() == w.flows[f].dst);
      std::set<int> uniq(p.nodes.begin(), p.nodes.end());
      CHECK(uniq.size() == p.nodes.size());
      for (size_t i = 0; i + 1 < p.nodes.size(); ++i)
        CHECK(w.topo.link_between(p.nodes[i], p.nodes[i + 1]) >= 0);
    }
  }
}

TEST_CASE("segments partition the node sequence") {
  Workspace w = demo_workspace();
  for (const RoutePath& p : w.tables.paths) {
    REQUIRE(!p.segments.empty());
    size_t cursor = 0;
    for (const PathSegment& seg : p.segments) {
      REQUIRE(seg.nodes.size() >= 2);
      // consecutive segments share their junction node
      for (size_t i = 0; i < seg.nodes.size(); ++i) {
        REQUIRE(cursor + i < p.nodes.size());
        CHECK(seg.nodes[i] == p.nodes[cursor + i]);
      }
      cursor += seg.nodes.size() - 1;
      if (seg.sdn_link) {
        CHECK(seg.nodes.size() == 2);
        CHECK(seg.subdomain == -1);
        CHECK(w.part.is_border(seg.nodes.front()));
      } else {
        CHECK(seg.subdomain >= 0);
      }
    }
    CHECK(cursor == p.nodes.size() - 1);
  }
}

TEST_CASE("ospf segments are the least cost route inside their mask") {
  Workspace w = demo_workspace();
  for (const RoutePath& p : w.tables.paths) {
    for (const PathSegment& seg : p.segments) {
      if (seg.sdn_link) continue;
      NodeMask m = w.part.subdomain_mask(w.topo, seg.subdomain);
      PathResult ref = least_cost_path(w.topo, m, seg.nodes.front(), seg.nodes.back());
      CHECK(ref.nodes == seg.nodes);
    }
  }
}

TEST_CASE("sdn chains stay within the hop allowance") {
  for (int chain : {1, 2, 3}) {
    Workspace w = demo_workspace(chain);
    for (const RoutePath& p : w.tables.paths) {
      int run = 0, longest = 0;
      for (const PathSegment& seg : p.segments) {
        run = seg.sdn_link ? run + 1 : 0;
        longest = std::max(longest, run);
      }
      CHECK(longest <= chain);
    }
  }
}

TEST_CASE("a path enters each sub-domain at most once") {
  Workspace w = demo_workspace();
  for (const RoutePath& p : w.tables.paths) {
    std::set<int> visited;
    for (const PathSegment& seg : p.segments) {
      if (seg.sdn_link) continue;
      auto [it, fresh] = visited.insert(seg.subdomain);
      CHECK(fresh);
    }
  }
}

TEST_CASE("intra sub-domain flows get exactly the one ospf path") {
  Workspace w = demo_workspace();
  for (size_t f = 0; f < w.flows.size(); ++f) {
    int ks = w.part.is_border(w.flows[f].src) ? -1 : w.part.subdomain_of(w.flows[f].src);
    int kd = w.part.is_border(w.flows[f].dst) ? -1 : w.part.subdomain_of(w.flows[f].dst);
    if (ks < 0 || ks != kd) continue;
    REQUIRE(w.tables.flow_paths[f].size() == 1);
    const RoutePath& p = w.tables.paths[w.tables.flow_paths[f][0]];
    NodeMask m = w.part.subdomain_mask(w.topo, ks);
    PathResult ref = least_cost_path(w.topo, m, w.flows[f].src, w.flows[f].dst);
    CHECK(p.nodes == ref.nodes);
    CHECK(p.exit_choices.empty());
  }
}

TEST_CASE("paths from a border start with an sdn link") {
  Workspace w = demo_workspace();
  for (size_t f = 0; f < w.flows.size(); ++f) {
    if (!w.part.is_border(w.flows[f].src)) continue;
    for (int pi : w.tables.flow_paths[f]) {
      const RoutePath& p = w.tables.paths[pi];
      CHECK(p.segments.front().sdn_link);
    }
  }
}

// ====== exit bookkeeping ======

TEST_CASE("exit choices mirror the exiting segments") {
  Workspace w = demo_workspace();
  for (const RoutePath& p : w.tables.paths) {
    std::vector<RoutePath::ExitChoice> expect;
    for (const PathSegment& seg : p.segments) {
      if (seg.sdn_link || seg.exit_border < 0) continue;
      RoutePath::ExitChoice c;
      c.subdomain = seg.subdomain;
      c.entry_row = row_of(w.part, seg.subdomain, seg.nodes.front());
      c.border_pos = border_pos_of(w.part, seg.subdomain, seg.exit_border);
      REQUIRE(c.entry_row >= 0);
      REQUIRE(c.border_pos >= 0);
      CHECK(seg.nodes.back() == seg.exit_border);
      expect.push_back(c);
    }
    REQUIRE(p.exit_choices.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i) {
      CHECK(p.exit_choices[i].subdomain == expect[i].subdomain);
      CHECK(p.exit_choices[i].entry_row == expect[i].entry_row);
      CHECK(p.exit_choices[i].border_pos == expect[i].border_pos);
    }
  }
}

TEST_CASE("consistency masks match the advertised exits") {
  Workspace w = demo_workspace();
  REQUIRE(w.tables.cons.size() == w.tables.paths.size());
  for (size_t pi = 0; pi < w.tables.paths.size(); ++pi) {
    const RoutePath& p = w.tables.paths[pi];
    REQUIRE(w.tables.cons[pi].size() == p.exit_choices.size());
    for (size_t c = 0; c < p.exit_choices.size(); ++c) {
      const auto& choice = p.exit_choices[c];
      const auto& space = w.spaces[choice.subdomain];
      REQUIRE(w.tables.cons[pi][c].size() == space.vectors.size());
      for (size_t vi = 0; vi < space.vectors.size(); ++vi) {
        bool expect = space.vectors[vi].exits[choice.entry_row] == choice.border_pos;
        CHECK(static_cast<bool>(w.tables.cons[pi][c][vi]) == expect);
        // the public predicate agrees with the stored mask
        CHECK(consistency(p, choice.subdomain, p.nodes.back(), space,
                          space.vectors[vi].metrics) == expect);
      }
      // some vector must support the choice, otherwise the path is dead weight
      bool supported = false;
      for (char bit : w.tables.cons[pi][c])
        if (bit) supported = true;
      CHECK(supported);
    }
  }
}

TEST_CASE("consistency is vacuous off the traversed sub-domains") {
  Workspace w = demo_workspace();
  const RoutePath& p = w.tables.paths[0];
  for (int k = 0; k < w.part.K; ++k) {
    bool crossed = false;
    for (const auto& choice : p.exit_choices)
      if (choice.subdomain == k) crossed = true;
    if (crossed) continue;
    for (const auto& entry : w.spaces[k].vectors)
      CHECK(consistency(p, k, p.nodes.back(), w.spaces[k], entry.metrics));
  }
}

TEST_CASE("traversals list every hop with its direction") {
  Workspace w = demo_workspace();
  REQUIRE(w.tables.traversals.size() == w.tables.paths.size());
  for (size_t pi = 0; pi < w.tables.paths.size(); ++pi) {
    const RoutePath& p = w.tables.paths[pi];
    const auto& tr = w.tables.traversals[pi];
    REQUIRE(tr.size() == p.nodes.size() - 1);
    for (size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      int u = p.nodes[i], v = p.nodes[i + 1];
      int link = w.topo.link_between(u, v);
      CHECK(tr[i].first == link);
      int dir = w.topo.link(link).a == u ? 0 : 1;
      CHECK(tr[i].second == dir);
    }
  }
}

// ====== per-flow projection property ======

TEST_CASE("one advertisement fixes one exit per flow and sub-domain") {
  Workspace w = demo_workspace();
  for (int k = 0; k < w.part.K; ++k) {
    const auto& space = w.spaces[k];
    for (size_t vi = 0; vi < space.vectors.size(); ++vi) {
      for (size_t f = 0; f < w.flows.size(); ++f) {
        // collect the exits that remain consistent for flow f in k when the
        // advertisement for its destination is pinned to vector vi
        std::set<int> exits;
        bool crosses = false;
        for (int pi : w.tables.flow_paths[f]) {
          const RoutePath& p = w.tables.paths[pi];
          for (size_t c = 0; c < p.exit_choices.size(); ++c) {
            if (p.exit_choices[c].subdomain != k) continue;
            crosses = true;
            if (w.tables.cons[pi][c][vi]) exits.insert(p.exit_choices[c].border_pos);
          }
        }
        if (!crosses) continue;
        // all consistent entries leaving from the same entry row share an exit
        std::set<std::pair<int, int>> row_exit;
        for (int pi : w.tables.flow_paths[f]) {
          const RoutePath& p = w.tables.paths[pi];
          for (size_t c = 0; c < p.exit_choices.size(); ++c)
            if (p.exit_choices[c].subdomain == k && w.tables.cons[pi][c][vi])
              row_exit.insert({p.exit_choices[c].entry_row, p.exit_choices[c].border_pos});
        }
        std::set<int> rows;
        for (auto [row, exit] : row_exit) {
          CHECK(exit == space.vectors[vi].exits[row]);
          rows.insert(row);
        }
        CHECK(rows.size() == row_exit.size());
      }
    }
  }
}

// ====== full sdn tables ======

TEST_CASE("full sdn paths stay within the hop slack") {
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  std::vector<Flow> flows = {{t.index_of("a"), t.index_of("e"), 1.0},
                             {t.index_of("b"), t.index_of("h"), 2.0}};
  PathTables tables = full_sdn_paths(t, flows, 2);
  REQUIRE(tables.flow_paths.size() == 2);
  for (size_t f = 0; f < flows.size(); ++f) {
    REQUIRE(!tables.flow_paths[f].empty());
    // hop floor from unit metrics
    Topology hops;
    for (const auto& nd : t.nodes()) hops.add_node(nd.id);
    for (const auto& l : t.links()) hops.add_link(t.node(l.a).id, t.node(l.b).id, 1);
    long long floor_hops =
        least_cost_path(hops, full_mask(hops), flows[f].src, flows[f].dst).distance;
    bool saw_shortest = false;
    for (int pi : tables.flow_paths[f]) {
      const RoutePath& p = tables.paths[pi];
      CHECK(static_cast<long long>(p.nodes.size()) - 1 <= floor_hops + 2);
      if (static_cast<long long>(p.nodes.size()) - 1 == floor_hops) saw_shortest = true;
      std::set<int> uniq(p.nodes.begin(), p.nodes.end());
      CHECK(uniq.size() == p.nodes.size());
      CHECK(p.exit_choices.empty());
      CHECK(tables.cons[pi].empty());
    }
    CHECK(saw_shortest);
  }
}

TEST_CASE("candidate injection dedupes") {
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  std::vector<Flow> flows = {{t.index_of("a"), t.index_of("c"), 1.0}};
  PathTables tables = full_sdn_paths(t, flows, 1);
  size_t before = tables.paths.size();
  const std::vector<int>& existing = tables.paths[tables.flow_paths[0][0]].nodes;
  int idx = add_candidate_path(tables, t, 0, existing);
  CHECK(tables.paths.size() == before);
  CHECK(idx == tables.flow_paths[0][0]);
  std::vector<int> detour = {t.index_of("a"), t.index_of("g"), t.index_of("f"),
                             t.index_of("e"), t.index_of("c")};
  int fresh = add_candidate_path(tables, t, 0, detour);
  CHECK(tables.paths.size() == before + 1);
  CHECK(tables.paths[fresh].nodes == detour);
  REQUIRE(tables.traversals.size() == tables.paths.size());
  CHECK(tables.traversals[fresh].size() == detour.size() - 1);
}

TEST_CASE("path budget overruns raise the enumeration error") {
  Workspace w = demo_workspace();
  CHECK_THROWS_AS(
      enumerate_paths(w.topo, w.part, w.spaces, w.flows, 2, 3), PathEnumerationError);
}

// ====== border destination fallback ======

TEST_CASE("border destinations stay reachable when their own side is cut") {
  // dropping a-b isolates border a from sub-domain 1's interior, so flows
  // toward a must leave through e and come back around
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  Partitioning part = partition(t, 2, 2);
  int drop = t.link_between(t.index_of("a"), t.index_of("b"));
  REQUIRE(drop >= 0);
  Topology cut = t.without_link(drop);
  auto spaces = enumerate_all_subdomains(cut, part);
  std::vector<Flow> flows = {{t.index_of("b"), t.index_of("a"), 1.0},
                             {t.index_of("d"), t.index_of("a"), 1.0}};
  PathTables tables = enumerate_paths(cut, part, spaces, flows, 2);
  for (size_t f = 0; f < flows.size(); ++f) {
    REQUIRE(!tables.flow_paths[f].empty());
    for (int pi : tables.flow_paths[f]) {
      const RoutePath& p = tables.paths[pi];
      CHECK(p.nodes.back() == t.index_of("a"));
      // the final hop arrives over a surviving link
      int u = p.nodes[p.nodes.size() - 2];
      CHECK(cut.link_between(u, t.index_of("a")) >= 0);
    }
  }
}

TEST_CASE("an unreachable interior destination kills the flow") {
  // dropping b-c strands b: interior destinations are not advertised, so no
  // candidate path may exist and the enumeration must say so
  Topology t = load_topology(std::string(SDNPART_DATA_DIR) + "/demo8.txt");
  Partitioning part = partition(t, 2, 2);
  int drop = t.link_between(t.index_of("b"), t.index_of("c"));
  Topology cut = t.without_link(drop);
  auto spaces = enumerate_all_subdomains(cut, part);
  std::vector<Flow> flows = {{t.index_of("d"), t.index_of("b"), 1.0}};
  CHECK_THROWS_AS(enumerate_paths(cut, part, spaces, flows, 2), PathEnumerationError);
}
