#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pitch2d/field.hpp"
#include "pitch2d/geometry.hpp"
#include "pitch2d/homography.hpp"
#include "pitch2d/records.hpp"
#include "pitch2d/team_clustering.hpp"

namespace pitch2d {

struct TrackSample {
  std::int64_t frame_idx = 0;
  double timestamp_s = 0.0;
  WorldPoint pos;
};

// Time-ordered world positions of one tracked player.
struct Track {
  int track_id = 0;
  std::vector<TrackSample> samples;
  std::optional<int> team;
};

enum class ProjectionAnchor { kBottomCenter, kCenter };

struct BuildDiagnostics {
  long gap_frames = 0;                  // frames without a usable homography
  long dropped_duplicate_timestamps = 0;
  long dropped_at_infinity = 0;
};

// Projects every detection of every calibrated frame through that frame's
// homography and groups the samples by track id (ordered by track id).
// Gap frames contribute nothing; a sample whose timestamp does not advance
// its track, or that maps to infinity, is dropped and counted.
[[nodiscard]] std::vector<Track> build_tracks(std::span<const FrameRecord> frames,
                                              std::span<const FrameCalibration> calibrations,
                                              ProjectionAnchor anchor = ProjectionAnchor::kBottomCenter,
                                              BuildDiagnostics* diagnostics = nullptr);

// Sum of consecutive segment lengths; 0 for a single sample.
[[nodiscard]] double distance_covered(const Track& track);

struct SpeedSample {
  double timestamp_s = 0.0;
  double speed_mps = 0.0;
  bool valid = false;  // false when no neighbor falls inside the window
};

// Path length over elapsed time between the farthest samples within
// window_s/2 on each side of every sample; one-sided at the ends.
// Requires >= 2 samples and window_s > 0 (ValidationError otherwise).
[[nodiscard]] std::vector<SpeedSample> speed_series(const Track& track, double window_s);

// Centered moving average over position; window_samples <= 1 returns the
// track unchanged. Endpoints shrink the window symmetrically.
[[nodiscard]] Track smooth_track(const Track& track, int window_samples);

struct HeatmapGrid {
  int nx = 0;
  int ny = 0;
  double cell_size_m = 0.0;
  std::vector<double> counts;  // row-major, index iy * nx + ix
  bool normalized = false;
  long clamped_samples = 0;  // out-of-field samples clamped to border cells
  long total_samples = 0;

  [[nodiscard]] double at(int ix, int iy) const {
    return counts[static_cast<std::size_t>(iy) * nx + ix];
  }
};

// Bins every sample into a grid covering the field rectangle; out-of-field
// samples clamp to the border cells and are counted. Normalized mode
// divides by the total sample count. Throws ConfigError for a
// non-positive cell size.
[[nodiscard]] HeatmapGrid heatmap(std::span<const Track> tracks,
                                  const FieldTemplate& field,
                                  double cell_size_m,
                                  bool normalized = false);

struct PlayerStats {
  int track_id = 0;
  std::optional<int> team;
  long samples = 0;
  double duration_s = 0.0;
  double distance_m = 0.0;
  double mean_speed_mps = 0.0;  // distance over duration
  double max_speed_mps = 0.0;   // peak of the windowed speed series
};

struct TeamStats {
  int players = 0;
  double total_distance_m = 0.0;
  double mean_speed_mps = 0.0;  // pooled distance over pooled duration
};

struct TeamSummary {
  std::array<TeamStats, 2> teams{};
  TeamStats unlabeled;
  std::array<HeatmapGrid, 2> team_heatmaps{};
  HeatmapGrid combined_heatmap;
  std::vector<PlayerStats> players;
};

// Per-player and per-team aggregates plus per-team and combined heatmaps.
// Team labels come from the assignment when it covers a track, from the
// track itself otherwise; tracks with neither count as unlabeled.
[[nodiscard]] TeamSummary team_summary(std::span<const Track> tracks,
                                       const TeamAssignment& assignment,
                                       const FieldTemplate& field,
                                       double cell_size_m,
                                       double speed_window_s = 0.5);

// --- file formats ---

// Line-delimited track samples: track_id, frame_idx, timestamp_s, x_m,
// y_m, team (null when unlabeled).
void write_tracks(std::ostream& out, std::span<const Track> tracks);
[[nodiscard]] std::vector<Track> read_tracks(std::istream& in);
void save_tracks(const std::filesystem::path& path, std::span<const Track> tracks);
[[nodiscard]] std::vector<Track> load_tracks(const std::filesystem::path& path);

[[nodiscard]] std::string heatmap_json(const HeatmapGrid& grid);
[[nodiscard]] HeatmapGrid parse_heatmap_json(std::istream& in);

[[nodiscard]] std::string stats_json(const TeamSummary& summary);
[[nodiscard]] std::string format_stats(const TeamSummary& summary);

}  // namespace pitch2d
