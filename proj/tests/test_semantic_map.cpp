#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "test_support.hpp"

#include "vln/errors.hpp"
#include "vln/rng.hpp"
#include "vln/semantic_map.hpp"

using namespace vln;
using vln::test::near;

namespace {

constexpr double kPi = std::numbers::pi;

Detection det(double x1, double y1, double x2, double y2, const std::string& category,
              int view = 0) {
  return Detection{PixelRect{x1, y1, x2, y2}, category, view};
}

}  // namespace

TEST_CASE("heading angle matches the closed form") {
  CHECK(near(heading_angle(PixelRect{400, 0, 624, 10}, 1024.0), 0.0));
  CHECK(near(heading_angle(PixelRect{0, 0, 0, 10}, 1024.0), -kPi));
  CHECK(near(heading_angle(PixelRect{256, 0, 512, 10}, 1024.0), -kPi / 4.0));

  // Wraparound-expanded boxes stay within the clamp.
  CHECK(near(heading_angle(PixelRect{1024, 0, 2048, 10}, 1024.0), kPi));

  CHECK_THROWS_AS((void)heading_angle(PixelRect{-1, 0, 10, 10}, 1024.0), ValidationError);
  CHECK_THROWS_AS((void)heading_angle(PixelRect{20, 0, 10, 10}, 1024.0), ValidationError);
  CHECK_THROWS_AS((void)heading_angle(PixelRect{0, 0, 3000, 10}, 1024.0), ValidationError);
  CHECK_THROWS_AS((void)heading_angle(PixelRect{std::nan(""), 0, 10, 10}, 1024.0),
                  ValidationError);
}

TEST_CASE("heading angle is monotone in center x and antisymmetric under mirroring") {
  const double W = 2048.0;
  Rng rng(5);
  double previous = -10.0;
  for (int cx = 20; cx < 2040; cx += 50) {
    const double h = heading_angle(PixelRect{cx - 10.0, 0, cx + 10.0, 10}, W);
    CHECK(h > previous);
    previous = h;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const double x1 = rng.next_real(0.0, W - 40.0);
    const double x2 = x1 + rng.next_real(1.0, 40.0);
    const PixelRect box{x1, 0, x2, 10};
    const PixelRect mirrored{W - x2, 0, W - x1, 10};
    CHECK(near(heading_angle(mirrored, W), -heading_angle(box, W), 1e-9));
  }
}

TEST_CASE("build merges overlapping same-category detections keeping nearest depth") {
  const std::map<std::size_t, double> depths{{0, 3.1}, {1, 3.0}, {2, 8.0}};
  const auto map = build_semantic_map(
      {det(100, 100, 220, 300, "door", 0), det(110, 105, 230, 305, "door", 1),
       det(1500, 200, 1600, 280, "sofa", 5)},
      depths, 2048.0, 512.0);
  REQUIRE(map.entries.size() == 2);
  CHECK(map.entries[0].category == "door");
  CHECK(near(map.entries[0].depth, 3.0));  // nearest instance won
  CHECK(map.entries[1].category == "sofa");
}

TEST_CASE("build keeps distinct objects and sorts deterministically") {
  const std::map<std::size_t, double> depths{{0, 2.0}, {1, 4.0}, {2, 3.0}};
  const auto map = build_semantic_map({det(1200, 10, 1300, 80, "chair"),
                                       det(200, 10, 300, 80, "chair"),
                                       det(700, 10, 800, 80, "table")},
                                      depths, 2048.0, 512.0);
  REQUIRE(map.entries.size() == 3);
  CHECK(map.entries[0].heading < map.entries[1].heading);
  CHECK(map.entries[1].heading < map.entries[2].heading);
  for (const auto& entry : map.entries) {
    CHECK(near(entry.heading, heading_angle(entry.bbox, 2048.0)));
  }
}

TEST_CASE("build rejects missing or bad depths") {
  CHECK_THROWS_AS(
      (void)build_semantic_map({det(0, 0, 10, 10, "door")}, {}, 2048.0, 512.0),
      ValidationError);
  CHECK_THROWS_AS((void)build_semantic_map({det(0, 0, 10, 10, "door")}, {{0, -1.0}}, 2048.0,
                                           512.0),
                  ValidationError);
  const auto empty = build_semantic_map({}, {}, 2048.0, 512.0);
  CHECK(empty.entries.empty());
}

TEST_CASE("rendered text follows the template") {
  SemanticMap map;
  map.panorama_width = 1024.0;
  map.panorama_height = 512.0;
  map.entries.push_back(SemanticEntry{-0.7854, "sofa", PixelRect{256, 100, 512, 300}, 2.5});
  CHECK(render_map_text(map) ==
        "turn left 45.0 degrees, sofa (bounding box [256,100,512,300]) at 2.5 meters");

  map.entries[0].heading = 0.0;
  map.entries[0].category = "door";
  CHECK(render_map_text(map) ==
        "straight ahead, door (bounding box [256,100,512,300]) at 2.5 meters");

  map.entries[0].heading = 0.7854;
  CHECK(render_map_text(map) ==
        "turn right 45.0 degrees, door (bounding box [256,100,512,300]) at 2.5 meters");

  map.entries.clear();
  CHECK(render_map_text(map) == "no objects detected");
}

TEST_CASE("render is byte-stable and parse recovers the rounded entries") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.next_int(0, 6);
    std::vector<Detection> detections;
    std::map<std::size_t, double> depths;
    const std::vector<std::string> cats{"door", "sofa", "table", "plant", "lamp"};
    for (int i = 0; i < n; ++i) {
      const double x1 = rng.next_real(0.0, 2000.0);
      detections.push_back(det(x1, 10.0, x1 + rng.next_real(5.0, 40.0), 200.0, rng.pick(cats)));
      depths[i] = rng.next_real(0.5, 12.0);
    }
    const auto map = build_semantic_map(detections, depths, 2048.0, 512.0);
    const std::string text = render_map_text(map);
    CHECK(text == render_map_text(map));

    const auto parsed = parse_map_text(text);
    REQUIRE(parsed.has_value());
    REQUIRE(parsed->size() == map.entries.size());
    for (std::size_t i = 0; i < map.entries.size(); ++i) {
      CHECK((*parsed)[i].category == map.entries[i].category);
      const double expect_deg = map.entries[i].heading * 180.0 / kPi;
      CHECK(std::abs((*parsed)[i].heading_deg - expect_deg) <= 0.05 + 1e-9);
      CHECK(std::abs((*parsed)[i].depth - map.entries[i].depth) <= 0.05 + 1e-9);
    }
  }
}
