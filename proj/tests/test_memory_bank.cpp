#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vln/errors.hpp"
#include "vln/memory_bank.hpp"

using namespace vln;

namespace {

MultimodalContext make_context(int t, const std::string& waypoint,
                               std::vector<std::string> nearest = {},
                               std::vector<std::string> answers = {},
                               SemanticValueMap values = {}) {
  MultimodalContext c;
  c.timestep = t;
  c.instruction = "go to the table";
  c.trajectory_caption = "trajectory@" + std::to_string(t);
  c.semantic_map_text = "map@" + std::to_string(t);
  c.waypoint_id = waypoint;
  c.nearest_objects = std::move(nearest);
  c.answers = std::move(answers);
  c.semantic_values = std::move(values);
  return c;
}

}  // namespace

TEST_CASE("store enforces strictly increasing timesteps") {
  MemoryBank bank;
  bank.store(make_context(0, "a"));
  CHECK(bank.size() == 1);
  bank.store(make_context(2, "b"));
  CHECK_THROWS_AS(bank.store(make_context(1, "c")), ValidationError);
  CHECK_THROWS_AS(bank.store(make_context(2, "c")), ValidationError);
}

TEST_CASE("index records revisits in order") {
  MemoryBank bank;
  bank.store(make_context(0, "a"));
  bank.store(make_context(1, "w"));
  bank.store(make_context(2, "w"));
  bank.store(make_context(7, "w"));
  CHECK(bank.visits("w") == std::vector<int>{1, 2, 7});
  CHECK(bank.visits("zz").empty());
  CHECK(bank.latest_context("w")->timestep == 7);
  CHECK(bank.latest_context("zz") == nullptr);
}

TEST_CASE("contexts_for_path: most recent context wins, placeholders carry values") {
  MemoryBank bank;
  bank.store(make_context(0, "r", {}, {}, {{"a", 0.4}, {"frontier", 0.8}}));
  bank.store(make_context(1, "a", {}, {}, {{"frontier", 0.7}}));
  bank.store(make_context(2, "a"));

  const auto entries = bank.contexts_for_path({"r", "a", "frontier"});
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].waypoint_id == "r");
  CHECK(entries[0].context->timestep == 0);
  CHECK(entries[1].context->timestep == 2);  // revisit: later context chosen
  CHECK(entries[2].context == nullptr);      // never visited
  REQUIRE(entries[2].semantic_value.has_value());
  CHECK(*entries[2].semantic_value == 0.7);  // latest snapshot wins
}

TEST_CASE("trajectory reconstruction is templated and deterministic") {
  MemoryBank bank;
  bank.store(make_context(0, "w00", {"door", "bench"}, {"a brown wooden door, closed"}));
  bank.store(make_context(1, "w01", {}, {}));
  bank.store(make_context(2, "w02", {"table"},
                          {std::string(200, 'x')}));  // long answer gets truncated

  const std::string caption = reconstruct_trajectory(bank, {"w00", "w01", "w02"});
  const std::string expected =
      "Step 0: started at w00; saw door, bench; learned a brown wooden door, closed; "
      "Step 1: moved to w01; saw nothing notable; "
      "Step 2: moved to w02; saw table; learned " +
      std::string(120, 'x');
  CHECK(caption == expected);
  CHECK(caption == reconstruct_trajectory(bank, {"w00", "w01", "w02"}));

  // Single start node.
  MemoryBank solo;
  solo.store(make_context(0, "w00", {"sofa"}));
  CHECK(reconstruct_trajectory(solo, {"w00"}) == "Step 0: started at w00; saw sofa");

  // Missing entry is an error.
  CHECK_THROWS_AS((void)reconstruct_trajectory(bank, {"w00", "missing"}), ValidationError);
}

TEST_CASE("caption length grows linearly with bounded per-step clauses") {
  MemoryBank bank;
  std::vector<std::string> visited;
  for (int t = 0; t < 40; ++t) {
    const std::string id = "w" + std::to_string(t);
    bank.store(make_context(t, id, {"door", "sofa", "rug"}, {std::string(500, 'y')}));
    visited.push_back(id);
  }
  const std::string caption = reconstruct_trajectory(bank, visited);
  // Each clause is bounded: step header + three categories + 120-char excerpt.
  CHECK(caption.size() < 40 * 200);
}
