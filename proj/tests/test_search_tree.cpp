#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "test_support.hpp"

#include "vln/errors.hpp"
#include "vln/search_tree.hpp"

using namespace vln;
using vln::test::near;
using vln::test::random_graph;

namespace {

// Independent reimplementation of the greedy diversity-capped selection,
// written directly from the rule: sort by (score, path value, id), then
// admit while each parent has capacity.
std::vector<std::string> brute_force_top_k(const SearchTree& tree, const NavGraph& graph,
                                           const std::string& current, int k, double lambda,
                                           int cap) {
  struct Row {
    std::string id;
    std::string parent;
    double v_path;
    double dist;
    double score;
  };
  std::vector<Row> rows;
  double max_dist = 0.0;
  for (const auto& leaf : tree.leaves()) {
    if (leaf == current) {
      continue;
    }
    const auto d = geodesic_distance(graph, current, leaf);
    if (!d) {
      continue;
    }
    max_dist = std::max(max_dist, *d);
    rows.push_back(Row{leaf, tree.node(leaf).parent.value_or(""), tree.path_value(leaf), *d, 0});
  }
  for (auto& row : rows) {
    row.score = row.v_path - ((max_dist > 0.0) ? lambda * row.dist / max_dist : 0.0);
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.v_path != b.v_path) return a.v_path > b.v_path;
    return a.id < b.id;
  });
  std::map<std::string, int> used;
  std::vector<std::string> out;
  for (const auto& row : rows) {
    if (static_cast<int>(out.size()) == k) break;
    if (used[row.parent] >= cap) continue;
    used[row.parent] += 1;
    out.push_back(row.id);
  }
  return out;
}

// DFS from the root: visits every node exactly once iff the structure is an
// acyclic tree with consistent parent/child links.
bool tree_is_consistent(const SearchTree& tree) {
  std::set<std::string> seen;
  std::vector<std::string> stack{tree.root()};
  while (!stack.empty()) {
    const std::string id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) {
      return false;
    }
    for (const auto& child : tree.node(id).children) {
      if (!tree.node(child).parent || *tree.node(child).parent != id) {
        return false;
      }
      stack.push_back(child);
    }
  }
  return seen.size() == tree.size();
}

NavGraph line_graph(int n, double spacing = 2.0) {
  std::vector<Waypoint> wps;
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i) {
    wps.push_back(Waypoint{"n" + vln::test::pad2(i), Eigen::Vector3d(i * spacing, 0, 0)});
    if (i > 0) {
      edges.emplace_back("n" + vln::test::pad2(i - 1), "n" + vln::test::pad2(i));
    }
  }
  return NavGraph(wps, edges);
}

// Recorded operation sequence, replayable with shifted values so covariance
// properties can compare two trees built by identical structure.
struct TreeOp {
  bool is_expand = true;
  std::string current;
  std::vector<std::string> candidates;
  SemanticValueMap values;
  double reward = 0.0;
};

SearchTree replay(const std::string& root, double root_value, const std::vector<TreeOp>& ops,
                  double shift) {
  SearchTree tree(root, root_value + shift);
  for (const auto& op : ops) {
    if (op.is_expand) {
      SemanticValueMap shifted;
      for (const auto& [id, v] : op.values) {
        shifted[id] = v + shift;
      }
      (void)tree.expand(op.current, op.candidates, shifted);
    } else {
      tree.backpropagate(op.current, op.reward + shift);
    }
  }
  return tree;
}

std::vector<TreeOp> random_ops(Rng& rng, const NavGraph& graph, const std::string& root,
                               int count) {
  std::vector<TreeOp> ops;
  std::vector<std::string> in_tree{root};
  std::set<std::string> members{root};
  for (int i = 0; i < count; ++i) {
    TreeOp op;
    op.current = in_tree[rng.next_below(in_tree.size())];
    op.is_expand = rng.next_below(2) == 0;
    if (op.is_expand) {
      op.candidates = navigable_candidates(graph, op.current);
      for (const auto& c : op.candidates) {
        op.values[c] = rng.next_real(0.0, 0.6);
        if (members.insert(c).second) {
          in_tree.push_back(c);
        }
      }
    } else {
      op.reward = rng.next_real(0.0, 0.6);
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

}  // namespace

TEST_CASE("expand initializes children and skips cross-branch waypoints") {
  SearchTree tree("r", 0.5);
  const auto added = tree.expand("r", {"a", "b"}, {{"a", 0.7}, {"b", 0.3}});
  CHECK(added == std::vector<std::string>{"a", "b"});
  CHECK(tree.node("a").q_value == 0.7);
  CHECK(tree.node("a").visit_count == 0);
  CHECK(tree.node("b").q_value == 0.3);
  CHECK(*tree.node("a").parent == "r");

  // "a" is already in the tree: expanding it from "b" must skip it.
  const auto again = tree.expand("b", {"a", "c"}, {{"a", 0.9}, {"c", 0.4}});
  CHECK(again == std::vector<std::string>{"c"});
  CHECK(*tree.node("a").parent == "r");  // not re-parented
  CHECK(tree.node("a").q_value == 0.7);

  CHECK_THROWS_AS((void)tree.expand("missing", {"x"}, {{"x", 0.1}}), StructureError);
  CHECK_THROWS_AS((void)tree.expand("r", {"z"}, {}), LookupError);
}

TEST_CASE("compute_reward averages added values and falls back to Q(current)") {
  SearchTree tree("r", 0.62);
  tree.expand("r", {"a", "b", "c"}, {{"a", 0.2}, {"b", 0.9}, {"c", 0.4}});
  CHECK(near(tree.compute_reward("r", {"a", "b", "c"}, {{"a", 0.2}, {"b", 0.9}, {"c", 0.4}}),
             0.5));
  CHECK(near(tree.compute_reward("r", {}, {}), 0.62));
  CHECK(near(tree.compute_reward("r", {"b"}, {{"b", 0.8}}), 0.8));
}

TEST_CASE("backpropagate is a running mean along the selected path only") {
  SearchTree tree("r", 0.1);
  tree.expand("r", {"a"}, {{"a", 0.5}});
  tree.expand("a", {"v", "w"}, {{"v", 0.5}, {"w", 0.33}});

  tree.backpropagate("v", 0.8);
  CHECK(near(tree.node("v").q_value, 0.8));  // first update overwrites the prior
  CHECK(tree.node("v").visit_count == 1);

  tree.backpropagate("v", 0.4);
  CHECK(near(tree.node("v").q_value, 0.6));
  CHECK(tree.node("v").visit_count == 2);

  // Sibling off the path keeps its initial state.
  CHECK(near(tree.node("w").q_value, 0.33));
  CHECK(tree.node("w").visit_count == 0);

  CHECK_THROWS_AS(tree.backpropagate("nope", 0.5), StructureError);
}

TEST_CASE("backprop with prior visits keeps the semantic prior as one observation") {
  SearchTree tree("r", 0.5, /*initial_visits=*/1);
  tree.expand("r", {"a"}, {{"a", 0.6}});
  CHECK(tree.node("a").visit_count == 1);
  tree.backpropagate("a", 0.9);
  // Running mean of {0.6 (prior pseudo-observation), 0.9}.
  CHECK(near(tree.node("a").q_value, 0.75));
}

TEST_CASE("path_value matches the worked weighting example") {
  // Path [r, a, v] with N = (5, 3, 0), Q = (0.5, 0.7, 0.9):
  // weights (6, 4, 1)/11 give (6*0.5 + 4*0.7 + 1*0.9) / 11.
  SearchTree tree("r", 0.5);
  tree.expand("r", {"a"}, {{"a", 0.7}});
  tree.expand("a", {"v"}, {{"v", 0.9}});
  for (int i = 0; i < 3; ++i) tree.backpropagate("a", 0.7);  // N(r)=3, N(a)=3, Q unchanged
  for (int i = 0; i < 2; ++i) tree.backpropagate("r", 0.5);  // N(r)=5, Q(r) drifts toward 0.5

  // Rewards were chosen to keep Q(a) = 0.7 exactly; Q(r) is a mean of
  // {0.7, 0.7, 0.7, 0.5, 0.5} so rebuild its running value explicitly.
  const double qr = tree.node("r").q_value;
  CHECK(near(qr, (3 * 0.7 + 2 * 0.5) / 5.0));
  CHECK(tree.node("r").visit_count == 5);
  CHECK(tree.node("a").visit_count == 3);
  CHECK(tree.node("v").visit_count == 0);
  CHECK(near(tree.path_value("v"), (6.0 * qr + 4.0 * 0.7 + 1.0 * 0.9) / 11.0));

  // The spec's exact table: weights (6,4,1)/11 over Q = (0.5, 0.7, 0.9).
  CHECK(near((6.0 * 0.5 + 4.0 * 0.7 + 1.0 * 0.9) / 11.0, 6.7 / 11.0));

  // Single-node path: the root's own value.
  SearchTree solo("r", 0.4);
  CHECK(near(solo.path_value("r"), 0.4));

  // All-equal Q is a fixed point regardless of visit profile.
  SearchTree flat("r", 0.37);
  flat.expand("r", {"a"}, {{"a", 0.37}});
  flat.expand("a", {"v"}, {{"v", 0.37}});
  flat.backpropagate("a", 0.37);
  flat.backpropagate("v", 0.37);
  CHECK(near(flat.path_value("v"), 0.37));
}

TEST_CASE("score_leaf applies the normalized distance penalty") {
  const NavGraph g = line_graph(9, 1.0);  // n00..n08, unit spacing
  SearchTree tree("n00", 0.5);
  tree.expand("n00", {"n01"}, {{"n01", 0.7}});
  tree.expand("n01", {"n02"}, {{"n02", 0.7}});
  tree.expand("n02", {"n03"}, {{"n03", 0.7}});
  tree.expand("n03", {"n04"}, {{"n04", 0.7}});

  const double v_path = tree.path_value("n04");
  const auto scored = tree.score_leaf(g, "n00", "n04", 0.3, 8.0);
  CHECK(near(scored.distance, 4.0));
  CHECK(near(scored.score, v_path - 0.3 * 4.0 / 8.0));

  // The spec's numeric row: V_path 0.7, d 4 m, max 8 m, lambda 0.3 -> 0.55.
  CHECK(near(0.7 - 0.3 * (4.0 / 8.0), 0.55));

  const auto unpenalized = tree.score_leaf(g, "n00", "n04", 0.0, 8.0);
  CHECK(near(unpenalized.score, v_path));

  const auto zero_distance = tree.score_leaf(g, "n04", "n04", 0.3, 8.0);
  CHECK(near(zero_distance.score, tree.path_value("n04")));

  const auto degenerate_max = tree.score_leaf(g, "n00", "n04", 0.3, 0.0);
  CHECK(near(degenerate_max.score, v_path));

  // Monotone penalty: score non-increasing in distance for fixed V_path.
  double previous = 1e9;
  for (const char* leaf : {"n01", "n02", "n03", "n04"}) {
    // All Qs equal so V_path is constant along the chain.
    const auto sc = tree.score_leaf(g, "n00", leaf, 0.3, 8.0);
    if (near(sc.path_value, tree.score_leaf(g, "n00", "n04", 0.3, 8.0).path_value)) {
      CHECK(sc.score <= previous + 1e-12);
      previous = sc.score;
    }
  }
}

TEST_CASE("select_top_k enforces the per-parent diversity cap") {
  Rng rng(3);
  const NavGraph g = random_graph(rng, 10, 8);
  SearchTree tree("n00", 0.5);
  tree.expand("n00", {"n01", "n02"}, {{"n01", 0.8}, {"n02", 0.6}});
  tree.expand("n01", {"n03", "n04", "n05"}, {{"n03", 0.9}, {"n04", 0.8}, {"n05", 0.7}});
  tree.expand("n02", {"n06"}, {{"n06", 0.2}});

  const auto top = tree.select_top_k(g, "n00", 3, 0.0);
  REQUIRE(top.size() == 3);
  int from_n01 = 0;
  for (const auto& sc : top) {
    if (*tree.node(sc.waypoint_id).parent == "n01") {
      ++from_n01;
    }
  }
  CHECK(from_n01 == 2);  // third sibling skipped
  CHECK(top[0].waypoint_id == "n03");
  CHECK(top[1].waypoint_id == "n04");
  CHECK(top[2].waypoint_id == "n06");

  const auto single = tree.select_top_k(g, "n00", 1, 0.0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].waypoint_id == "n03");

  // All leaves under one parent with k = 5: the cap binds at 2.
  SearchTree narrow("n00", 0.5);
  narrow.expand("n00", {"n01", "n02", "n03", "n04"},
                {{"n01", 0.9}, {"n02", 0.8}, {"n03", 0.7}, {"n04", 0.6}});
  CHECK(narrow.select_top_k(g, "n00", 5, 0.0).size() == 2);

  CHECK_THROWS_AS((void)tree.select_top_k(g, "n00", 0, 0.3), ConfigError);
}

TEST_CASE("current node is excluded and leafless selections are empty") {
  const NavGraph g = line_graph(4);
  SearchTree tree("n00", 0.5);
  CHECK(tree.select_top_k(g, "n00", 3, 0.3).empty());  // root is the only leaf

  tree.expand("n00", {"n01"}, {{"n01", 0.9}});
  CHECK(tree.select_top_k(g, "n01", 3, 0.3).empty());  // only leaf == current
}

TEST_CASE("unreachable leaves are excluded before scoring") {
  const NavGraph g({{"n00", Eigen::Vector3d(0, 0, 0)},
                    {"n01", Eigen::Vector3d(1, 0, 0)},
                    {"n02", Eigen::Vector3d(5, 0, 0)},
                    {"n03", Eigen::Vector3d(6, 0, 0)}},
                   {{"n00", "n01"}, {"n02", "n03"}});
  SearchTree tree("n00", 0.5);
  tree.expand("n00", {"n01", "n03"}, {{"n01", 0.2}, {"n03", 0.9}});
  const auto top = tree.select_top_k(g, "n00", 5, 0.3);
  REQUIRE(top.size() == 1);
  CHECK(top[0].waypoint_id == "n01");
}

TEST_CASE("property: random interleavings stay acyclic and match the greedy oracle") {
  Rng rng(424242);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.next_int(4, 12);
    const NavGraph g = random_graph(rng, n, rng.next_int(0, 6));
    const auto ids = g.ids();

    SearchTree tree(ids[0], rng.next_unit());
    for (const auto& op : random_ops(rng, g, ids[0], 12)) {
      if (op.is_expand) {
        (void)tree.expand(op.current, op.candidates, op.values);
      } else {
        tree.backpropagate(op.current, op.reward);
      }
      REQUIRE(tree_is_consistent(tree));
    }

    const double lambda = rng.next_real(0.0, 1.0);
    const int k = rng.next_int(1, 5);
    const std::string current = ids[rng.next_below(ids.size())];
    if (!tree.contains(current)) {
      continue;
    }
    const auto expected = brute_force_top_k(tree, g, current, k, lambda, 2);
    std::vector<std::string> actual;
    for (const auto& sc : tree.select_top_k(g, current, k, lambda)) {
      actual.push_back(sc.waypoint_id);
    }
    CHECK(actual == expected);
  }
}

TEST_CASE("property: conservation (backprop touches only the selected path)") {
  Rng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    const NavGraph g = random_graph(rng, 10, 5);
    const auto ids = g.ids();
    SearchTree tree(ids[0], rng.next_unit());
    const auto ops = random_ops(rng, g, ids[0], 10);
    for (const auto& op : ops) {
      if (op.is_expand) {
        (void)tree.expand(op.current, op.candidates, op.values);
      } else {
        tree.backpropagate(op.current, op.reward);
      }
    }

    // Snapshot, backprop once, diff everything off the path.
    std::map<std::string, std::pair<double, int>> before;
    for (const auto& id : tree.ids()) {
      before[id] = {tree.node(id).q_value, tree.node(id).visit_count};
    }
    const auto members = tree.ids();
    const std::string target = members[rng.next_below(members.size())];
    std::set<std::string> on_path;
    for (const auto& id : tree.path_from_root(target)) {
      on_path.insert(id);
    }
    tree.backpropagate(target, rng.next_unit());
    for (const auto& id : tree.ids()) {
      if (on_path.count(id)) {
        CHECK(tree.node(id).visit_count == before[id].second + 1);
      } else {
        CHECK(tree.node(id).q_value == before[id].first);
        CHECK(tree.node(id).visit_count == before[id].second);
      }
    }
  }
}

TEST_CASE("property: shifting every value by a constant preserves the top-k ranking") {
  Rng rng(777);
  for (int trial = 0; trial < 60; ++trial) {
    const NavGraph g = random_graph(rng, 9, 4);
    const auto ids = g.ids();
    const double root_value = rng.next_real(0.0, 0.4);
    const auto ops = random_ops(rng, g, ids[0], 10);

    const SearchTree base = replay(ids[0], root_value, ops, 0.0);
    const SearchTree shifted = replay(ids[0], root_value, ops, 0.25);

    const std::string current = ids[rng.next_below(ids.size())];
    if (!base.contains(current)) {
      continue;
    }
    const auto base_top = base.select_top_k(g, current, 4, 0.3);
    const auto shifted_top = shifted.select_top_k(g, current, 4, 0.3);
    REQUIRE(base_top.size() == shifted_top.size());
    for (std::size_t i = 0; i < base_top.size(); ++i) {
      CHECK(base_top[i].waypoint_id == shifted_top[i].waypoint_id);
      // Every path value shifts by exactly the constant.
      CHECK(near(shifted_top[i].path_value, base_top[i].path_value + 0.25, 1e-9));
    }
  }
}
