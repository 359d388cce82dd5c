#pragma once

#include <cmath>

namespace pitch2d {

// Metric pitch coordinates. x runs along the touchline from the left goal
// line, y along the goal line from the bottom touchline, so every on-pitch
// point is non-negative. Projected players may fall slightly outside.
struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};

// Image coordinates in pixels (column, row); y grows downward.
struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

// Image coordinates as fractions of width/height, either both in [0,1] or
// both exactly -1 for points outside the frame.
struct NormPoint {
  double x = -1.0;
  double y = -1.0;

  [[nodiscard]] bool is_sentinel() const { return x == -1.0 && y == -1.0; }
  [[nodiscard]] bool in_unit_square() const {
    return x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0;
  }
  [[nodiscard]] static NormPoint sentinel() { return NormPoint{-1.0, -1.0}; }
};

// Axis-aligned pixel box with x1 < x2 and y1 < y2.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  [[nodiscard]] double width() const { return x2 - x1; }
  [[nodiscard]] double height() const { return y2 - y1; }
  [[nodiscard]] double area() const { return width() * height(); }
};

[[nodiscard]] inline double distance(const WorldPoint& a, const WorldPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

[[nodiscard]] inline double distance(const PixelPoint& a, const PixelPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

[[nodiscard]] inline bool finite(const WorldPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

[[nodiscard]] inline bool finite(const PixelPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

[[nodiscard]] inline bool valid(const BBox& b) {
  return std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
         std::isfinite(b.y2) && b.x1 < b.x2 && b.y1 < b.y2;
}

}  // namespace pitch2d
