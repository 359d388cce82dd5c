#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pitch2d/color.hpp"
#include "pitch2d/geometry.hpp"

namespace pitch2d {

// Polygonal segmentation mask outline, pixel coordinates, >= 1 vertex.
struct MaskPolygon {
  std::vector<PixelPoint> vertices;
};

// 5x5 RGB patch sampled at the bounding-box center, row-major, 75 bytes.
using Patch = std::array<std::uint8_t, 75>;
inline constexpr std::size_t kPatchPixels = 25;

// One tracked player in one frame.
struct Detection {
  int track_id = 0;
  BBox bbox;
  std::optional<MaskPolygon> mask;
  std::optional<Patch> patch;
  std::optional<ColorVec> mean_color;
};

// One field keypoint as seen (or not) in a frame. visible == true iff pos
// is inside the unit square; invisible keypoints carry the (-1,-1) sentinel.
struct KeypointObservation {
  int keypoint_id = 0;
  NormPoint pos;
  bool visible = false;
};

// One video frame's worth of data: player detections plus keypoint
// observations, with the frame's timestamp and image dimensions.
struct FrameRecord {
  std::int64_t frame_idx = 0;
  double timestamp_s = 0.0;
  int image_w = 0;
  int image_h = 0;
  std::vector<Detection> detections;
  std::vector<KeypointObservation> keypoints;
};

}  // namespace pitch2d
