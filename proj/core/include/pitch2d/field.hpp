#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pitch2d/geometry.hpp"

namespace pitch2d {

inline constexpr int kKeypointCount = 12;

// Standard marking dimensions (meters) shared by the canonical layout and
// the rendered field geometry.
inline constexpr double kCenterCircleRadius = 9.15;
inline constexpr double kPenaltyArcRadius = 9.15;
inline constexpr double kPenaltyBoxDepth = 16.5;
inline constexpr double kPenaltySpotDepth = 11.0;
inline constexpr double kGoalAreaDepth = 5.5;
inline constexpr double kGoalHalfWidth = 3.66;
inline constexpr double kCornerArcRadius = 1.0;
inline constexpr double kSpotRadius = 0.11;

// Canonical keypoint ids. The layout places twelve identifiable anchors on
// the halfway line and both penalty arcs; docs/field_template.md gives the
// closed-form positions. Id 11 is an auxiliary halfway-line point (see the
// docs for why a twelfth marking intersection cannot exist symmetrically).
enum KeypointId : int {
  kHalfwayBottomTouchline = 0,
  kCenterCircleBottom = 1,
  kCenterMark = 2,
  kCenterCircleTop = 3,
  kHalfwayTopTouchline = 4,
  kLeftArcBoxBottom = 5,
  kLeftArcApex = 6,
  kLeftArcBoxTop = 7,
  kRightArcBoxBottom = 8,
  kRightArcApex = 9,
  kRightArcBoxTop = 10,
  kHalfwayQuarterMark = 11,
};

struct KeypointOverride {
  int keypoint_id = 0;
  WorldPoint world;
};

// Pitch dimensions plus optional per-keypoint world overrides. Overrides
// exist so a template can be matched to a surveyed real field instead of
// the canonical reconstruction.
struct FieldConfig {
  double length_m = 105.0;  // touchline length
  double width_m = 68.0;    // goal-line width
  std::vector<KeypointOverride> keypoint_overrides;
};

struct LineSegmentM {
  WorldPoint a;
  WorldPoint b;
};

// Circular arc, angles in radians counter-clockwise from +x.
struct ArcM {
  WorldPoint center;
  double radius = 0.0;
  double start_rad = 0.0;
  double end_rad = 0.0;
};

// Line and arc geometry of the pitch markings, world meters. Used for
// rendering only; never for calibration.
struct FieldMarkings {
  std::vector<LineSegmentM> segments;
  std::vector<ArcM> arcs;
};

// Metric 2D field model: configured dimensions, the twelve keypoint world
// positions indexed by keypoint id, and marking geometry.
struct FieldTemplate {
  FieldConfig config;
  std::array<WorldPoint, kKeypointCount> keypoints{};
  FieldMarkings markings;
};

// Builds the canonical template for the given dimensions, applying
// overrides last. Throws ConfigError for non-positive or too-small
// dimensions (the standard markings must fit), length < width, duplicate
// or out-of-range override ids, or overrides outside the field rectangle.
[[nodiscard]] FieldTemplate canonical_template(const FieldConfig& config);

// World position of one keypoint. Throws ValidationError for ids outside
// [0, 11].
[[nodiscard]] WorldPoint keypoint_world_position(const FieldTemplate& tmpl, int keypoint_id);

// Keypoint id pairs that exchange under a horizontal flip of the camera
// image; axis keypoints map to themselves.
[[nodiscard]] std::array<std::pair<int, int>, 3> mirror_keypoint_pairs();

// Field configuration file I/O (JSON: length_m, width_m, keypoint_overrides).
[[nodiscard]] FieldConfig read_field_config(std::istream& in);
[[nodiscard]] FieldConfig load_field_config(const std::filesystem::path& path);
void write_field_config(std::ostream& out, const FieldConfig& config);

}  // namespace pitch2d
