#include "pitch2d/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "pitch2d/errors.hpp"

namespace pitch2d {

namespace {

constexpr double kLineWidthDoc = 1.2;  // ~0.12 m marking lines

// Shortest round-trip decimal form; keeps documents byte-deterministic and
// lets tests recover the exact coordinate values.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string rgb(const ColorVec& c) {
  return "rgb(" + std::to_string(static_cast<int>(std::lround(c.r))) + "," +
         std::to_string(static_cast<int>(std::lround(c.g))) + "," +
         std::to_string(static_cast<int>(std::lround(c.b))) + ")";
}

ColorVec lerp(const ColorVec& a, const ColorVec& b, double t) {
  return ColorVec{a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

void validate_style(const RenderStyle& style) {
  if (!(style.marker_radius_m > 0.0)) throw ConfigError("marker radius must be positive");
  for (const ColorVec* c : {&style.team_colors[0], &style.team_colors[1], &style.unlabeled_color,
                            &style.line_color, &style.background, &style.ramp_low, &style.ramp_high}) {
    if (!valid(*c)) throw ConfigError("style colors must have channels in [0,255]");
  }
}

class SvgBuilder {
 public:
  SvgBuilder(const FieldTemplate& tmpl, const RenderStyle& style)
      : width_m_(tmpl.config.length_m), height_m_(tmpl.config.width_m), style_(style) {
    const std::string w = fmt(width_m_ * kDocUnitsPerMeter);
    const std::string h = fmt(height_m_ * kDocUnitsPerMeter);
    doc_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    doc_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + w + "\" height=\"" + h +
            "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
    doc_ += "<rect x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h + "\" fill=\"" +
            rgb(style.background) + "\"/>\n";
  }

  // World meters to document units: 10 units per meter, y flipped so the
  // world origin sits at the bottom-left of the document.
  double doc_x(double x) const { return x * kDocUnitsPerMeter; }
  double doc_y(double y) const { return (height_m_ - y) * kDocUnitsPerMeter; }

  void add_markings(const FieldMarkings& markings) {
    const std::string stroke = "\" stroke=\"" + rgb(style_.line_color) + "\" stroke-width=\"" +
                               fmt(kLineWidthDoc) + "\" fill=\"none\"/>\n";
    for (const auto& seg : markings.segments) {
      doc_ += "<line x1=\"" + fmt(doc_x(seg.a.x)) + "\" y1=\"" + fmt(doc_y(seg.a.y)) + "\" x2=\"" +
              fmt(doc_x(seg.b.x)) + "\" y2=\"" + fmt(doc_y(seg.b.y)) + stroke;
    }
    for (const auto& arc : markings.arcs) {
      if (arc.radius <= 2.0 * kSpotRadius) {
        // Spot marks render filled.
        doc_ += "<circle cx=\"" + fmt(doc_x(arc.center.x)) + "\" cy=\"" + fmt(doc_y(arc.center.y)) +
                "\" r=\"" + fmt(arc.radius * kDocUnitsPerMeter) + "\" fill=\"" +
                rgb(style_.line_color) + "\"/>\n";
        continue;
      }
      const double sweep = arc.end_rad - arc.start_rad;
      if (sweep >= 2.0 * std::numbers::pi - 1e-12) {
        doc_ += "<circle cx=\"" + fmt(doc_x(arc.center.x)) + "\" cy=\"" + fmt(doc_y(arc.center.y)) +
                "\" r=\"" + fmt(arc.radius * kDocUnitsPerMeter) + stroke;
        continue;
      }
      // Partial arcs as sampled polylines; 64 chords per full turn.
      const int chords = std::max(8, static_cast<int>(std::ceil(64.0 * sweep / (2.0 * std::numbers::pi))));
      doc_ += "<polyline points=\"";
      for (int k = 0; k <= chords; ++k) {
        const double angle = arc.start_rad + sweep * k / chords;
        const double px = arc.center.x + arc.radius * std::cos(angle);
        const double py = arc.center.y + arc.radius * std::sin(angle);
        if (k > 0) doc_ += " ";
        doc_ += fmt(doc_x(px)) + "," + fmt(doc_y(py));
      }
      doc_ += stroke;
    }
  }

  void add_marker(const WorldPoint& pos, const ColorVec& color) {
    doc_ += "<circle cx=\"" + fmt(doc_x(pos.x)) + "\" cy=\"" + fmt(doc_y(pos.y)) + "\" r=\"" +
            fmt(style_.marker_radius_m * kDocUnitsPerMeter) + "\" fill=\"" + rgb(color) + "\"/>\n";
  }

  void add_cell(int ix, int iy, double cell_size_m, const ColorVec& color) {
    // Border cells clip to the field rectangle.
    const double x0 = ix * cell_size_m;
    const double x1 = std::min((ix + 1) * cell_size_m, width_m_);
    const double y0 = iy * cell_size_m;
    const double y1 = std::min((iy + 1) * cell_size_m, height_m_);
    doc_ += "<rect x=\"" + fmt(doc_x(x0)) + "\" y=\"" + fmt(doc_y(y1)) + "\" width=\"" +
            fmt((x1 - x0) * kDocUnitsPerMeter) + "\" height=\"" +
            fmt((y1 - y0) * kDocUnitsPerMeter) + "\" fill=\"" + rgb(color) + "\"/>\n";
  }

  std::string finish() {
    doc_ += "</svg>\n";
    return std::move(doc_);
  }

 private:
  double width_m_;
  double height_m_;
  RenderStyle style_;
  std::string doc_;
};

}  // namespace

std::string render_frame(const FieldTemplate& tmpl,
                         std::span<const FramePosition> positions,
                         const RenderStyle& style) {
  validate_style(style);
  SvgBuilder svg(tmpl, style);
  svg.add_markings(tmpl.markings);
  for (const auto& p : positions) {
    const ColorVec& color =
        p.team ? style.team_colors[static_cast<std::size_t>(*p.team & 1)] : style.unlabeled_color;
    svg.add_marker(p.pos, color);
  }
  return svg.finish();
}

std::string render_heatmap(const FieldTemplate& tmpl,
                           const HeatmapGrid& grid,
                           const RenderStyle& style) {
  validate_style(style);
  if (grid.counts.size() != static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny)) {
    throw ValidationError("heatmap counts length does not match nx * ny");
  }

  SvgBuilder svg(tmpl, style);
  double max_count = 0.0;
  for (const auto c : grid.counts) max_count = std::max(max_count, c);
  if (max_count > 0.0) {
    for (int iy = 0; iy < grid.ny; ++iy) {
      for (int ix = 0; ix < grid.nx; ++ix) {
        const double count = grid.at(ix, iy);
        if (count <= 0.0) continue;
        svg.add_cell(ix, iy, grid.cell_size_m, lerp(style.ramp_low, style.ramp_high, count / max_count));
      }
    }
  }
  svg.add_markings(tmpl.markings);
  return svg.finish();
}

}  // namespace pitch2d
