#pragma once

#include <cmath>

namespace pitch2d {

// RGB color vector with real-valued channels in [0, 255].
struct ColorVec {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

[[nodiscard]] inline double distance(const ColorVec& a, const ColorVec& b) {
  const double dr = a.r - b.r;
  const double dg = a.g - b.g;
  const double db = a.b - b.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

[[nodiscard]] inline double squared_distance(const ColorVec& a, const ColorVec& b) {
  const double dr = a.r - b.r;
  const double dg = a.g - b.g;
  const double db = a.b - b.b;
  return dr * dr + dg * dg + db * db;
}

// Rec. 601 luma; used only as a stable ordering key for team labels.
[[nodiscard]] inline double luminance(const ColorVec& c) {
  return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
}

[[nodiscard]] inline bool valid_channel(double v) {
  return std::isfinite(v) && v >= 0.0 && v <= 255.0;
}

[[nodiscard]] inline bool valid(const ColorVec& c) {
  return valid_channel(c.r) && valid_channel(c.g) && valid_channel(c.b);
}

}  // namespace pitch2d
