#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

#include "vln/errors.hpp"
#include "vln/nav_graph.hpp"

using namespace vln;
using vln::test::enumerate_shortest;
using vln::test::near;
using vln::test::random_graph;

namespace {

NavGraph triangle() {
  return NavGraph({{"A", Eigen::Vector3d(0, 0, 0)},
                   {"B", Eigen::Vector3d(4, 0, 0)},
                   {"C", Eigen::Vector3d(0, 3, 0)}},
                  {{"A", "B"}, {"B", "C"}, {"A", "C"}});
}

NavGraph chain(const std::vector<double>& xs) {
  std::vector<Waypoint> wps;
  std::vector<std::pair<std::string, std::string>> edges;
  const std::string names = "ABCDEFGH";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    wps.push_back({std::string(1, names[i]), Eigen::Vector3d(xs[i], 0, 0)});
    if (i > 0) {
      edges.emplace_back(std::string(1, names[i - 1]), std::string(1, names[i]));
    }
  }
  return NavGraph(wps, edges);
}

}  // namespace

TEST_CASE("construction rejects malformed graphs") {
  CHECK_THROWS_AS(NavGraph({{"A", {}}, {"A", {}}}, {}), ValidationError);
  CHECK_THROWS_AS(NavGraph({{"A", {}}}, {{"A", "A"}}), ValidationError);
  CHECK_THROWS_AS(NavGraph({{"A", {}}}, {{"A", "B"}}), ValidationError);
  CHECK_THROWS_AS(
      NavGraph({{"A", Eigen::Vector3d(std::nan(""), 0, 0)}}, {}), ValidationError);
}

TEST_CASE("navigable candidates are sorted adjacency") {
  const auto g = triangle();
  CHECK(navigable_candidates(g, "B") == std::vector<std::string>{"A", "C"});

  const NavGraph isolated({{"D", {}}}, {});
  CHECK(navigable_candidates(isolated, "D").empty());

  const auto path = chain({0, 2, 5, 9, 14});
  CHECK(navigable_candidates(path, "C") == std::vector<std::string>{"B", "D"});

  CHECK_THROWS_AS((void)navigable_candidates(g, "Z"), LookupError);
}

TEST_CASE("geodesic distance on chains and disconnected pairs") {
  const auto g = chain({0, 2, 5});  // |AB| = 2, |BC| = 3
  CHECK(near(*geodesic_distance(g, "A", "A"), 0.0));
  CHECK(near(*geodesic_distance(g, "A", "C"), 5.0));

  const NavGraph split({{"A", Eigen::Vector3d(0, 0, 0)}, {"B", Eigen::Vector3d(1, 0, 0)}}, {});
  CHECK_FALSE(geodesic_distance(split, "A", "B").has_value());
  CHECK_THROWS_AS((void)geodesic_distance(split, "A", "Z"), LookupError);
}

TEST_CASE("shortest path basics and lexicographic ties") {
  const auto g = chain({0, 2, 5});
  CHECK(shortest_path(g, "A", "A") == std::vector<std::string>{"A"});
  CHECK(shortest_path(g, "A", "C") == std::vector<std::string>{"A", "B", "C"});

  // Diamond with two equal-length routes: via B and via D.
  const NavGraph diamond({{"A", Eigen::Vector3d(0, 0, 0)},
                          {"B", Eigen::Vector3d(1, 1, 0)},
                          {"D", Eigen::Vector3d(1, -1, 0)},
                          {"Z", Eigen::Vector3d(2, 0, 0)}},
                         {{"A", "B"}, {"B", "Z"}, {"A", "D"}, {"D", "Z"}});
  CHECK(shortest_path(diamond, "A", "Z") == std::vector<std::string>{"A", "B", "Z"});

  const NavGraph split({{"A", Eigen::Vector3d(0, 0, 0)}, {"B", Eigen::Vector3d(1, 0, 0)}}, {});
  CHECK_THROWS_AS((void)shortest_path(split, "A", "B"), UnreachableError);
}

TEST_CASE("property: dijkstra agrees with exhaustive enumeration") {
  Rng rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.next_int(2, 8);
    const NavGraph g = random_graph(rng, n, rng.next_int(0, 4));
    const auto ids = g.ids();
    for (int pair = 0; pair < 6; ++pair) {
      const auto& from = ids[rng.next_below(ids.size())];
      const auto& to = ids[rng.next_below(ids.size())];
      const auto expected = enumerate_shortest(g, from, to);
      const auto got = geodesic_distance(g, from, to);
      REQUIRE(got.has_value());
      CHECK(near(*got, expected.length, 1e-9));
      CHECK(shortest_path(g, from, to) == expected.path);
    }
  }
}

TEST_CASE("property: symmetry, triangle inequality, path validity") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.next_int(3, 20);
    const NavGraph g = random_graph(rng, n, rng.next_int(0, 4));
    const auto ids = g.ids();
    for (int probe = 0; probe < 8; ++probe) {
      const auto& a = ids[rng.next_below(ids.size())];
      const auto& b = ids[rng.next_below(ids.size())];
      const auto& c = ids[rng.next_below(ids.size())];
      const double ab = *geodesic_distance(g, a, b);
      CHECK(near(ab, *geodesic_distance(g, b, a), 1e-9));
      CHECK(ab <= *geodesic_distance(g, a, c) + *geodesic_distance(g, c, b) + 1e-9);

      const auto path = shortest_path(g, a, b);
      REQUIRE(!path.empty());
      CHECK(path.front() == a);
      CHECK(path.back() == b);
      double length = 0.0;
      for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& nbrs = g.neighbors(path[i - 1]);
        CHECK(std::find(nbrs.begin(), nbrs.end(), path[i]) != nbrs.end());
        length += g.edge_weight(path[i - 1], path[i]);
      }
      CHECK(near(length, ab, 1e-9));
    }
  }
}

TEST_CASE("candidates are deterministic across repeated calls") {
  Rng rng(7);
  const NavGraph g = random_graph(rng, 12, 6);
  for (const auto& id : g.ids()) {
    CHECK(navigable_candidates(g, id) == navigable_candidates(g, id));
  }
}

TEST_CASE("episode validation") {
  Episode episode;
  episode.graph = chain({0, 2, 5});
  episode.start_id = "A";
  episode.goal_id = "C";
  CHECK_NOTHROW(validate_episode(episode));

  episode.goal_id = "Z";
  CHECK_THROWS_AS(validate_episode(episode), ValidationError);

  episode.goal_id = "C";
  episode.success_radius = 0.0;
  CHECK_THROWS_AS(validate_episode(episode), ValidationError);

  episode.success_radius = 3.0;
  episode.max_steps = -1;
  CHECK_THROWS_AS(validate_episode(episode), ValidationError);
}
