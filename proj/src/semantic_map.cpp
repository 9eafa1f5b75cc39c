#include "vln/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <sstream>

#include "vln/errors.hpp"

namespace vln {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_fixed1(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", value);
  return buf;
}

}  // namespace

double rect_iou(const PixelRect& a, const PixelRect& b) {
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return inter / uni;
}

double heading_angle(const PixelRect& bbox, double panorama_width) {
  if (!(panorama_width > 0.0) || !std::isfinite(panorama_width)) {
    throw ValidationError("panorama width must be positive and finite");
  }
  if (!std::isfinite(bbox.x1) || !std::isfinite(bbox.x2)) {
    throw ValidationError("bounding box coordinates must be finite");
  }
  if (bbox.x1 < 0.0 || bbox.x2 < 0.0) {
    throw ValidationError("bounding box coordinates must be non-negative");
  }
  if (bbox.x1 > bbox.x2) {
    throw ValidationError("bounding box has x1 > x2");
  }
  if (bbox.x2 > 2.0 * panorama_width) {
    throw ValidationError("bounding box exceeds wraparound-expanded panorama bounds");
  }
  const double h = kPi * ((bbox.x1 + bbox.x2 - panorama_width) / panorama_width);
  return std::clamp(h, -kPi, kPi);
}

SemanticMap build_semantic_map(const std::vector<Detection>& detections,
                               const std::map<std::size_t, double>& depths,
                               double panorama_width, double panorama_height, int timestep) {
  SemanticMap map;
  map.timestep = timestep;
  map.panorama_width = panorama_width;
  map.panorama_height = panorama_height;

  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& det = detections[i];
    auto dit = depths.find(i);
    if (dit == depths.end()) {
      throw ValidationError("detection " + std::to_string(i) + " ('" + det.category +
                            "') has no depth entry");
    }
    const double depth = dit->second;
    if (!(depth > 0.0) || !std::isfinite(depth)) {
      throw ValidationError("detection " + std::to_string(i) + " has a non-positive depth");
    }
    if (det.bbox.y1 > det.bbox.y2 || det.bbox.y1 < 0.0 || det.bbox.y2 > panorama_height) {
      throw ValidationError("detection " + std::to_string(i) + " has an out-of-bounds bbox");
    }

    SemanticEntry entry{heading_angle(det.bbox, panorama_width), det.category, det.bbox, depth};

    // Overlapping views report the same physical object more than once;
    // merge same-category boxes with IoU > 0.5, keeping the nearest depth.
    bool merged = false;
    for (auto& kept : map.entries) {
      if (kept.category == entry.category && rect_iou(kept.bbox, entry.bbox) > 0.5) {
        if (entry.depth < kept.depth) {
          kept = entry;
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      map.entries.push_back(std::move(entry));
    }
  }

  std::sort(map.entries.begin(), map.entries.end(),
            [](const SemanticEntry& a, const SemanticEntry& b) {
              if (a.heading != b.heading) return a.heading < b.heading;
              if (a.category != b.category) return a.category < b.category;
              return a.depth < b.depth;
            });
  return map;
}

std::string render_map_text(const SemanticMap& map) {
  if (map.entries.empty()) {
    return "no objects detected";
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& entry : map.entries) {
    if (!first) {
      out << "\n";
    }
    first = false;

    const double deg = entry.heading * 180.0 / kPi;
    const std::string magnitude = format_fixed1(std::abs(deg));
    if (magnitude == "0.0") {
      out << "straight ahead";
    } else if (deg < 0.0) {
      out << "turn left " << magnitude << " degrees";
    } else {
      out << "turn right " << magnitude << " degrees";
    }
    out << ", " << entry.category << " (bounding box [" << std::llround(entry.bbox.x1) << ","
        << std::llround(entry.bbox.y1) << "," << std::llround(entry.bbox.x2) << ","
        << std::llround(entry.bbox.y2) << "]) at " << format_fixed1(entry.depth) << " meters";
  }
  return out.str();
}

std::optional<std::vector<ParsedMapLine>> parse_map_text(const std::string& text) {
  if (text == "no objects detected") {
    return std::vector<ParsedMapLine>{};
  }
  static const std::regex line_re(
      R"(^(straight ahead|turn (left|right) (\d+\.\d) degrees), (.+) \(bounding box \[(-?\d+),(-?\d+),(-?\d+),(-?\d+)\]\) at (\d+\.\d) meters$)");

  std::vector<ParsedMapLine> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      return std::nullopt;
    }
    ParsedMapLine parsed;
    if (m[1] == "straight ahead") {
      parsed.heading_deg = 0.0;
    } else {
      const double magnitude = std::stod(m[3]);
      parsed.heading_deg = (m[2] == "left") ? -magnitude : magnitude;
    }
    parsed.category = m[4];
    parsed.bbox = PixelRect{std::stod(m[5]), std::stod(m[6]), std::stod(m[7]), std::stod(m[8])};
    parsed.depth = std::stod(m[9]);
    lines.push_back(std::move(parsed));
  }
  return lines;
}

}  // namespace vln
