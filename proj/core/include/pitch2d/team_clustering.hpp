#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pitch2d/color.hpp"
#include "pitch2d/records.hpp"

namespace pitch2d {

// Two-team assignment: track labels, the fitted color centroids and the
// within-cluster sum of squared distances. Label 0 always belongs to the
// lower-luminance centroid so runs are comparable. `degenerate` marks the
// all-identical-colors fallback where every track lands in team 0.
struct TeamAssignment {
  std::map<int, int> labels;  // track_id -> {0, 1}
  std::array<ColorVec, 2> centroids{};
  double inertia = 0.0;
  bool degenerate = false;
  std::map<int, ColorVec> track_colors;  // aggregated color behind each label
};

struct ClusterOptions {
  std::uint64_t seed = 17;
  int restarts = 1;    // > 1 adds seeded random restarts, best inertia wins
  int max_iterations = 100;
  double tolerance = 1e-6;  // centroid movement convergence threshold
};

// Per-channel mean of a 5x5 RGB patch.
[[nodiscard]] ColorVec patch_mean_color(const Patch& patch);

// 2-means over the color vectors. The default single run seeds with the
// canonically smallest color and its farthest point, so the result is
// independent of input order. Throws ValidationError on fewer than two
// entries; all-identical colors return the flagged fallback assignment.
[[nodiscard]] TeamAssignment cluster_teams(std::span<const std::pair<int, ColorVec>> colors,
                                           const ClusterOptions& options = {});

// Label of the nearest centroid; ties go to label 0.
[[nodiscard]] int assign_color(const TeamAssignment& assignment, const ColorVec& color);

struct SequenceTeamOptions {
  ClusterOptions cluster;
  int reestimate_every = 0;  // 0: fit on the first colored frame only
};

// Resolves a color per detection (mean_color, else patch mean), fits the
// centroids on the first frame carrying at least two colored detections
// (plus every Nth frame when re-estimation is enabled), then labels each
// track by its per-channel median color across the sequence. Throws
// ValidationError when no frame carries colors.
[[nodiscard]] TeamAssignment assign_teams(std::span<const FrameRecord> frames,
                                          const SequenceTeamOptions& options = {});

// Team file: centroids, inertia, flags, and per-track labels with
// centroid distances.
void write_team_assignment(std::ostream& out, const TeamAssignment& assignment);
[[nodiscard]] TeamAssignment read_team_assignment(std::istream& in);

}  // namespace pitch2d
