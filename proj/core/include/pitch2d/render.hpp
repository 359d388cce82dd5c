#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "pitch2d/analytics.hpp"
#include "pitch2d/color.hpp"
#include "pitch2d/field.hpp"

namespace pitch2d {

// SVG document scale: 10 document units per meter, origin at the top-left
// corner of the field with y flipped (world y up, document y down).
inline constexpr double kDocUnitsPerMeter = 10.0;

struct RenderStyle {
  std::array<ColorVec, 2> team_colors{ColorVec{220, 50, 47}, ColorVec{38, 97, 156}};
  ColorVec unlabeled_color{190, 190, 190};
  double marker_radius_m = 1.0;
  ColorVec line_color{255, 255, 255};
  ColorVec background{45, 110, 55};
  ColorVec ramp_low{255, 237, 160};   // heatmap color at relative intensity 0
  ColorVec ramp_high{189, 0, 38};     // and at 1
};

struct FramePosition {
  WorldPoint pos;
  std::optional<int> team;
};

// Field markings plus one marker per position, colored by team. Output is
// deterministic: identical inputs yield byte-identical documents.
[[nodiscard]] std::string render_frame(const FieldTemplate& tmpl,
                                       std::span<const FramePosition> positions,
                                       const RenderStyle& style = {});

// One filled cell per nonzero count, ramp color by intensity relative to
// the hottest cell, markings overlaid.
[[nodiscard]] std::string render_heatmap(const FieldTemplate& tmpl,
                                         const HeatmapGrid& grid,
                                         const RenderStyle& style = {});

}  // namespace pitch2d
