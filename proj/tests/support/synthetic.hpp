#pragma once

// Deterministic generators for synthetic scenes, correspondences and
// record fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pitch2d/field.hpp"
#include "pitch2d/geometry.hpp"
#include "pitch2d/homography.hpp"
#include "pitch2d/records.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

// Plain homogeneous multiply-then-divide, independent of the library path.
inline pitch2d::WorldPoint apply_oracle(const pitch2d::Homography& h, const pitch2d::PixelPoint& p) {
  const std::array<double, 3> v{h.h[0] * p.x + h.h[1] * p.y + h.h[2],
                                h.h[3] * p.x + h.h[4] * p.y + h.h[5],
                                h.h[6] * p.x + h.h[7] * p.y + h.h[8]};
  return {v[0] / v[2], v[1] / v[2]};
}

// Random non-degenerate image->world map: rotation * scale plus bounded
// perspective, so every point of a 1280x720 frame stays far from the line
// at infinity.
inline pitch2d::Homography random_homography(Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> scale(0.05, 0.2);
  std::uniform_real_distribution<double> shift(-20.0, 60.0);
  std::uniform_real_distribution<double> perspective(-2e-4, 2e-4);

  const double theta = angle(rng);
  const double s = scale(rng);
  pitch2d::Homography h;
  h.h = {s * std::cos(theta), -s * std::sin(theta), shift(rng),
         s * std::sin(theta), s * std::cos(theta),  shift(rng),
         perspective(rng),    perspective(rng),     1.0};
  return h;
}

inline pitch2d::PixelPoint random_image_point(Rng& rng, double w = 1280.0, double h = 720.0) {
  std::uniform_real_distribution<double> ux(0.0, w);
  std::uniform_real_distribution<double> uy(0.0, h);
  return {ux(rng), uy(rng)};
}

// n spread-out image points: one per cell of a coarse grid, jittered.
// Keeps random correspondence sets away from collinearity.
inline std::vector<pitch2d::PixelPoint> spread_image_points(Rng& rng, int n, double w = 1280.0,
                                                            double h = 720.0) {
  const int cols = 4;
  const int rows = 3;
  std::vector<int> cells(static_cast<std::size_t>(cols * rows));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  std::shuffle(cells.begin(), cells.end(), rng);

  std::uniform_real_distribution<double> jitter(0.15, 0.85);
  std::vector<pitch2d::PixelPoint> points;
  points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int cell = cells[static_cast<std::size_t>(i) % cells.size()];
    const int cx = cell % cols;
    const int cy = cell / cols;
    points.push_back({(cx + jitter(rng)) * (w / cols), (cy + jitter(rng)) * (h / rows)});
  }
  return points;
}

inline std::vector<pitch2d::Correspondence> correspondences_through(
    const pitch2d::Homography& image_to_world, const std::vector<pitch2d::PixelPoint>& points) {
  std::vector<pitch2d::Correspondence> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p, apply_oracle(image_to_world, p)});
  return out;
}

// --- camera scene: a world->image view that keeps the whole pitch visible ---

struct Camera {
  // world->image matrix entries for frame t; mild pan keeps each frame's
  // homography distinct.
  static pitch2d::Homography world_to_image(int frame) {
    pitch2d::Homography g;
    g.h = {10.0, 0.0,  50.0 + 0.3 * frame,
           0.0,  -9.0, 680.0,
           1e-5, 2e-5, 1.0};
    return g;
  }
  static pitch2d::Homography image_to_world(int frame) {
    return pitch2d::invert(world_to_image(frame));
  }
  static constexpr int kImageW = 1280;
  static constexpr int kImageH = 720;
};

struct PlayerSpec {
  int track_id = 0;
  pitch2d::WorldPoint start;
  double vx = 0.0;  // m/s
  double vy = 0.0;
  pitch2d::ColorVec color;
};

struct SceneFixture {
  std::vector<pitch2d::FrameRecord> frames;
  std::vector<PlayerSpec> players;
  double frame_dt = 0.04;
  int frame_count = 0;

  pitch2d::WorldPoint player_position(const PlayerSpec& p, int frame) const {
    const double t = frame * frame_dt;
    return {p.start.x + p.vx * t, p.start.y + p.vy * t};
  }

  double player_path_length(const PlayerSpec& p) const {
    const double total_t = (frame_count - 1) * frame_dt;
    return std::hypot(p.vx, p.vy) * total_t;
  }
};

// 22 players on two teams with distinct kit colors, constant velocities,
// every canonical keypoint visible and exact in every frame.
inline SceneFixture make_scene(const pitch2d::FieldTemplate& tmpl, int frame_count,
                               int players_per_team = 11) {
  SceneFixture fixture;
  fixture.frame_count = frame_count;

  const pitch2d::ColorVec kit_a{200.0, 30.0, 40.0};
  const pitch2d::ColorVec kit_b{30.0, 40.0, 200.0};
  for (int i = 0; i < players_per_team; ++i) {
    fixture.players.push_back({i, {20.0 + 6.0 * (i % 6), 14.0 + 8.0 * (i / 6)},
                               1.0 + 0.1 * i, 0.5, kit_a});
    fixture.players.push_back({100 + i, {60.0 + 4.0 * (i % 6), 18.0 + 8.0 * (i / 6)},
                               -0.8 - 0.1 * i, 0.4, kit_b});
  }

  for (int t = 0; t < frame_count; ++t) {
    const pitch2d::Homography g = Camera::world_to_image(t);
    pitch2d::FrameRecord record;
    record.frame_idx = t;
    record.timestamp_s = t * fixture.frame_dt;
    record.image_w = Camera::kImageW;
    record.image_h = Camera::kImageH;

    for (const auto& player : fixture.players) {
      const pitch2d::WorldPoint pos = fixture.player_position(player, t);
      const pitch2d::WorldPoint anchor_w = apply_oracle(g, {pos.x, pos.y});
      pitch2d::Detection det;
      det.track_id = player.track_id;
      det.bbox = pitch2d::BBox{anchor_w.x - 6.0, anchor_w.y - 24.0, anchor_w.x + 6.0, anchor_w.y};
      det.mean_color = player.color;
      record.detections.push_back(det);
    }
    for (int id = 0; id < pitch2d::kKeypointCount; ++id) {
      const pitch2d::WorldPoint kp = tmpl.keypoints[static_cast<std::size_t>(id)];
      const pitch2d::WorldPoint img = apply_oracle(g, {kp.x, kp.y});
      pitch2d::KeypointObservation obs;
      obs.keypoint_id = id;
      obs.pos = {img.x / Camera::kImageW, img.y / Camera::kImageH};
      obs.visible = true;
      record.keypoints.push_back(obs);
    }
    fixture.frames.push_back(std::move(record));
  }
  return fixture;
}

// Random value on the 1/4096 grid; binary fractions survive a double
// horizontal flip bit-exactly.
inline double dyadic(Rng& rng, double lo, double hi) {
  std::uniform_int_distribution<int> grid(0, 4096);
  const double t = grid(rng) / 4096.0;
  const double span = hi - lo;
  return lo + std::round(t * span * 4096.0) / 4096.0;
}

// Annotation records with dyadic coordinates, random visibility and the
// occasional detection payload; used by the flip-involution checks.
inline std::vector<pitch2d::FrameRecord> make_dyadic_annotations(Rng& rng, int count) {
  std::vector<pitch2d::FrameRecord> records;
  std::uniform_int_distribution<int> visible_coin(0, 3);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> det_count(0, 3);

  for (int t = 0; t < count; ++t) {
    pitch2d::FrameRecord record;
    record.frame_idx = t;
    record.timestamp_s = t * 0.25;
    record.image_w = 1280;
    record.image_h = 720;

    for (int id = 0; id < pitch2d::kKeypointCount; ++id) {
      pitch2d::KeypointObservation obs;
      obs.keypoint_id = id;
      if (visible_coin(rng) != 0) {
        obs.visible = true;
        obs.pos = {dyadic(rng, 0.0, 1.0), dyadic(rng, 0.0, 1.0)};
      }
      record.keypoints.push_back(obs);
    }

    const int dets = det_count(rng);
    for (int d = 0; d < dets; ++d) {
      pitch2d::Detection det;
      det.track_id = d;
      const double x1 = dyadic(rng, 0.0, 1000.0);
      const double y1 = dyadic(rng, 0.0, 600.0);
      det.bbox = pitch2d::BBox{x1, y1, x1 + dyadic(rng, 1.0, 100.0), y1 + dyadic(rng, 1.0, 100.0)};
      if (d % 2 == 0) {
        pitch2d::MaskPolygon mask;
        for (int v = 0; v < 4; ++v) {
          mask.vertices.push_back({dyadic(rng, 0.0, 1280.0), dyadic(rng, 0.0, 720.0)});
        }
        det.mask = mask;
        pitch2d::Patch patch{};
        for (auto& b : patch) b = static_cast<std::uint8_t>(byte(rng));
        det.patch = patch;
      } else {
        det.mean_color = pitch2d::ColorVec{static_cast<double>(byte(rng)),
                                           static_cast<double>(byte(rng)),
                                           static_cast<double>(byte(rng))};
      }
      record.detections.push_back(det);
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace testsupport
