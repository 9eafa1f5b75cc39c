#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vln {

// Axis-aligned pixel rectangle in panorama coordinates.
struct PixelRect {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  [[nodiscard]] double width() const { return x2 - x1; }
  [[nodiscard]] double height() const { return y2 - y1; }
  [[nodiscard]] double area() const { return width() * height(); }
  [[nodiscard]] double center_x() const { return 0.5 * (x1 + x2); }
  [[nodiscard]] double center_y() const { return 0.5 * (y1 + y2); }
};

// Intersection-over-union of two rectangles; 0 when either is degenerate.
[[nodiscard]] double rect_iou(const PixelRect& a, const PixelRect& b);

struct Detection {
  PixelRect bbox;        // panorama coordinates; x may extend to 2W when a
                         // box wraps across the panorama seam
  std::string category;
  int view_index = 0;    // which of the K directional views produced it
};

struct SemanticEntry {
  double heading = 0.0;  // radians, [-pi, pi]
  std::string category;
  PixelRect bbox;
  double depth = 0.0;    // meters, > 0
};

struct SemanticMap {
  int timestep = 0;
  std::vector<SemanticEntry> entries;  // sorted by (heading, category, depth)
  double panorama_width = 2048.0;
  double panorama_height = 512.0;
};

// Heading angle of a bounding box: pi * ((x1 + x2 - F) / F), clamped to
// [-pi, pi]. F is the full panorama width. Accepts wraparound-expanded
// boxes with 0 <= x1 <= x2 <= 2F. Throws ValidationError on non-finite or
// negative coordinates, x1 > x2, x2 > 2F, or non-positive F.
[[nodiscard]] double heading_angle(const PixelRect& bbox, double panorama_width);

// Builds the per-timestep map from detections and their depths (indexed by
// detection position). Overlapping-view duplicates of the same category with
// IoU > 0.5 are merged, keeping the nearest-depth instance. Entries come out
// sorted by (heading, category, depth). Throws ValidationError when a depth
// is missing or non-positive.
[[nodiscard]] SemanticMap build_semantic_map(const std::vector<Detection>& detections,
                                             const std::map<std::size_t, double>& depths,
                                             double panorama_width, double panorama_height,
                                             int timestep = 0);

// One line per entry:
//   "turn left 45.0 degrees, sofa (bounding box [256,100,512,300]) at 2.5 meters"
// Headings render as signed degrees with 1 decimal (negative = left,
// positive = right, 0.0 = "straight ahead"); depths with 1 decimal; bbox
// coordinates rounded to integers. An empty map renders as
// "no objects detected". Output is byte-identical for identical maps.
[[nodiscard]] std::string render_map_text(const SemanticMap& map);

// Inverse of render_map_text up to the stated rounding: recovers category,
// heading in degrees, bbox, and depth per line. Returns std::nullopt for
// text that does not follow the template.
struct ParsedMapLine {
  double heading_deg = 0.0;
  std::string category;
  PixelRect bbox;
  double depth = 0.0;
};
[[nodiscard]] std::optional<std::vector<ParsedMapLine>> parse_map_text(const std::string& text);

}  // namespace vln
