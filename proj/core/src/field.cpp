#include "pitch2d/field.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "pitch2d/errors.hpp"
#include "json_util.hpp"

namespace pitch2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGeomTol = 1e-9;

bool inside_field(const WorldPoint& p, const FieldConfig& cfg, double tol = kGeomTol) {
  return p.x >= -tol && p.x <= cfg.length_m + tol && p.y >= -tol && p.y <= cfg.width_m + tol;
}

void add_rect(FieldMarkings& m, double x1, double y1, double x2, double y2) {
  m.segments.push_back({{x1, y1}, {x2, y1}});
  m.segments.push_back({{x2, y1}, {x2, y2}});
  m.segments.push_back({{x2, y2}, {x1, y2}});
  m.segments.push_back({{x1, y2}, {x1, y1}});
}

// Open-sided box attached to a goal line: the three segments of a penalty
// or goal area on the side whose goal line sits at x = gx, extending to
// depth d, between y1 and y2. `dir` is +1 on the left side, -1 on the right.
void add_area_box(FieldMarkings& m, double gx, int dir, double depth, double y1, double y2) {
  const double fx = gx + dir * depth;
  m.segments.push_back({{gx, y1}, {fx, y1}});
  m.segments.push_back({{fx, y1}, {fx, y2}});
  m.segments.push_back({{fx, y2}, {gx, y2}});
}

FieldMarkings build_markings(const FieldConfig& cfg) {
  const double L = cfg.length_m;
  const double W = cfg.width_m;
  const double cy = W / 2.0;

  FieldMarkings m;
  add_rect(m, 0.0, 0.0, L, W);
  m.segments.push_back({{L / 2.0, 0.0}, {L / 2.0, W}});

  m.arcs.push_back({{L / 2.0, cy}, kCenterCircleRadius, 0.0, kTwoPi});
  m.arcs.push_back({{L / 2.0, cy}, kSpotRadius, 0.0, kTwoPi});

  const double box_half = kPenaltyBoxDepth + kGoalHalfWidth;
  const double goal_half = kGoalAreaDepth + kGoalHalfWidth;
  add_area_box(m, 0.0, +1, kPenaltyBoxDepth, cy - box_half, cy + box_half);
  add_area_box(m, L, -1, kPenaltyBoxDepth, cy - box_half, cy + box_half);
  add_area_box(m, 0.0, +1, kGoalAreaDepth, cy - goal_half, cy + goal_half);
  add_area_box(m, L, -1, kGoalAreaDepth, cy - goal_half, cy + goal_half);

  m.arcs.push_back({{kPenaltySpotDepth, cy}, kSpotRadius, 0.0, kTwoPi});
  m.arcs.push_back({{L - kPenaltySpotDepth, cy}, kSpotRadius, 0.0, kTwoPi});

  // Penalty arcs: the part of the spot-centered circle outside the box.
  const double arc_half = std::acos((kPenaltyBoxDepth - kPenaltySpotDepth) / kPenaltyArcRadius);
  m.arcs.push_back({{kPenaltySpotDepth, cy}, kPenaltyArcRadius, -arc_half, arc_half});
  m.arcs.push_back({{L - kPenaltySpotDepth, cy},
                    kPenaltyArcRadius,
                    std::numbers::pi - arc_half,
                    std::numbers::pi + arc_half});

  m.arcs.push_back({{0.0, 0.0}, kCornerArcRadius, 0.0, std::numbers::pi / 2.0});
  m.arcs.push_back({{L, 0.0}, kCornerArcRadius, std::numbers::pi / 2.0, std::numbers::pi});
  m.arcs.push_back({{L, W}, kCornerArcRadius, std::numbers::pi, 1.5 * std::numbers::pi});
  m.arcs.push_back({{0.0, W}, kCornerArcRadius, 1.5 * std::numbers::pi, kTwoPi});
  return m;
}

WorldPoint arc_point(const ArcM& arc, double angle) {
  return {arc.center.x + arc.radius * std::cos(angle), arc.center.y + arc.radius * std::sin(angle)};
}

void check_markings_inside(const FieldMarkings& m, const FieldConfig& cfg) {
  for (const auto& seg : m.segments) {
    if (!inside_field(seg.a, cfg) || !inside_field(seg.b, cfg)) {
      throw ConfigError("field dimensions too small: marking segment leaves the field rectangle");
    }
  }
  for (const auto& arc : m.arcs) {
    // Endpoints plus every quarter-angle extreme covered by the sweep.
    if (!inside_field(arc_point(arc, arc.start_rad), cfg) ||
        !inside_field(arc_point(arc, arc.end_rad), cfg)) {
      throw ConfigError("field dimensions too small: marking arc leaves the field rectangle");
    }
    const double first = std::ceil(arc.start_rad / (std::numbers::pi / 2.0));
    for (double k = first; k * (std::numbers::pi / 2.0) <= arc.end_rad + kGeomTol; k += 1.0) {
      if (!inside_field(arc_point(arc, k * (std::numbers::pi / 2.0)), cfg)) {
        throw ConfigError("field dimensions too small: marking arc leaves the field rectangle");
      }
    }
  }
}

}  // namespace

FieldTemplate canonical_template(const FieldConfig& config) {
  if (!std::isfinite(config.length_m) || !std::isfinite(config.width_m)) {
    throw ConfigError("field dimensions must be finite");
  }
  if (config.length_m <= 0.0 || config.width_m <= 0.0) {
    throw ConfigError("field dimensions must be positive");
  }
  if (config.length_m < config.width_m) {
    throw ConfigError("field length must be at least its width");
  }

  const double L = config.length_m;
  const double W = config.width_m;
  const double cx = L / 2.0;
  const double cy = W / 2.0;
  const double dy =
      std::sqrt(kPenaltyArcRadius * kPenaltyArcRadius -
                (kPenaltyBoxDepth - kPenaltySpotDepth) * (kPenaltyBoxDepth - kPenaltySpotDepth));
  const double apex_x = kPenaltySpotDepth + kPenaltyArcRadius;

  FieldTemplate tmpl;
  tmpl.config = config;
  tmpl.keypoints[kHalfwayBottomTouchline] = {cx, 0.0};
  tmpl.keypoints[kCenterCircleBottom] = {cx, cy - kCenterCircleRadius};
  tmpl.keypoints[kCenterMark] = {cx, cy};
  tmpl.keypoints[kCenterCircleTop] = {cx, cy + kCenterCircleRadius};
  tmpl.keypoints[kHalfwayTopTouchline] = {cx, W};
  tmpl.keypoints[kLeftArcBoxBottom] = {kPenaltyBoxDepth, cy - dy};
  tmpl.keypoints[kLeftArcApex] = {apex_x, cy};
  tmpl.keypoints[kLeftArcBoxTop] = {kPenaltyBoxDepth, cy + dy};
  tmpl.keypoints[kRightArcBoxBottom] = {L - kPenaltyBoxDepth, cy - dy};
  tmpl.keypoints[kRightArcApex] = {L - apex_x, cy};
  tmpl.keypoints[kRightArcBoxTop] = {L - kPenaltyBoxDepth, cy + dy};
  tmpl.keypoints[kHalfwayQuarterMark] = {cx, W / 4.0};

  for (const auto& kp : tmpl.keypoints) {
    if (!inside_field(kp, config)) {
      throw ConfigError("field dimensions too small: canonical keypoint leaves the field rectangle");
    }
  }

  tmpl.markings = build_markings(config);
  check_markings_inside(tmpl.markings, config);

  std::set<int> seen;
  for (const auto& override_ : config.keypoint_overrides) {
    if (override_.keypoint_id < 0 || override_.keypoint_id >= kKeypointCount) {
      throw ConfigError("keypoint override id out of range [0,11]: " +
                        std::to_string(override_.keypoint_id));
    }
    if (!seen.insert(override_.keypoint_id).second) {
      throw ConfigError("duplicate keypoint override id: " + std::to_string(override_.keypoint_id));
    }
    if (!finite(override_.world) || !inside_field(override_.world, config)) {
      throw ConfigError("keypoint override outside the field rectangle for id " +
                        std::to_string(override_.keypoint_id));
    }
    tmpl.keypoints[static_cast<std::size_t>(override_.keypoint_id)] = override_.world;
  }
  return tmpl;
}

WorldPoint keypoint_world_position(const FieldTemplate& tmpl, int keypoint_id) {
  if (keypoint_id < 0 || keypoint_id >= kKeypointCount) {
    throw ValidationError("keypoint id out of range [0,11]: " + std::to_string(keypoint_id));
  }
  return tmpl.keypoints[static_cast<std::size_t>(keypoint_id)];
}

std::array<std::pair<int, int>, 3> mirror_keypoint_pairs() {
  return {{{kLeftArcBoxBottom, kRightArcBoxBottom},
           {kLeftArcApex, kRightArcApex},
           {kLeftArcBoxTop, kRightArcBoxTop}}};
}

FieldConfig read_field_config(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  detail::Json j;
  try {
    j = detail::Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("field config is not valid JSON: ") + e.what());
  }

  FieldConfig cfg;
  try {
    cfg.length_m = detail::require_number(j, "length_m");
    cfg.width_m = detail::require_number(j, "width_m");
    if (j.contains("keypoint_overrides")) {
      for (const auto& o : j.at("keypoint_overrides")) {
        KeypointOverride ko;
        ko.keypoint_id = static_cast<int>(detail::require_integer(o, "id"));
        ko.world.x = detail::require_number(o, "x");
        ko.world.y = detail::require_number(o, "y");
        cfg.keypoint_overrides.push_back(ko);
      }
    }
  } catch (const ParseError& e) {
    throw ConfigError(std::string("field config: ") + e.what());
  }
  return cfg;
}

FieldConfig load_field_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field config: " + path.string());
  return read_field_config(in);
}

void write_field_config(std::ostream& out, const FieldConfig& config) {
  detail::Json j;
  j["length_m"] = config.length_m;
  j["width_m"] = config.width_m;
  j["keypoint_overrides"] = detail::Json::array();
  for (const auto& o : config.keypoint_overrides) {
    j["keypoint_overrides"].push_back({{"id", o.keypoint_id}, {"x", o.world.x}, {"y", o.world.y}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace pitch2d
