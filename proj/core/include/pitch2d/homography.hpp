#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pitch2d/field.hpp"
#include "pitch2d/geometry.hpp"
#include "pitch2d/records.hpp"

namespace pitch2d {

// 3x3 projective map, image pixels -> world meters, row-major storage.
// Estimation, inversion and file I/O produce matrices in the canonical
// normalization (see normalize()); aggregate construction is unchecked.
struct Homography {
  std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

  [[nodiscard]] double at(int row, int col) const { return h[static_cast<std::size_t>(row) * 3 + col]; }
  [[nodiscard]] double& at(int row, int col) { return h[static_cast<std::size_t>(row) * 3 + col]; }
  [[nodiscard]] static Homography identity() { return Homography{}; }
};

// Canonical scale: h22 == 1 when |h22| is not tiny, otherwise unit
// Frobenius norm with positive first nonzero entry. Idempotent.
[[nodiscard]] Homography normalize(const Homography& h);

[[nodiscard]] double determinant(const Homography& h);

struct Correspondence {
  PixelPoint image;
  WorldPoint world;
};

// Direct linear transform with isotropic pre-normalization of both point
// sets; the algebraic residual is minimized by the smallest right singular
// vector of the stacked constraint matrix. Throws NumericalError for
// fewer than 4 correspondences, degenerate (rank-deficient) configurations,
// or a singular estimate.
[[nodiscard]] Homography estimate_dlt(std::span<const Correspondence> correspondences);

// Applies h to p. Throws NumericalError when p maps to infinity
// (|homogeneous w| <= 1e-9).
[[nodiscard]] WorldPoint apply(const Homography& h, const PixelPoint& p);

// Same map, empty when p is at infinity under h.
[[nodiscard]] std::optional<WorldPoint> try_apply(const Homography& h, const PixelPoint& p);

// Matrix inverse, canonically normalized. Throws NumericalError when
// singular.
[[nodiscard]] Homography invert(const Homography& h);

// Mean world-space distance between apply(h, image_i) and world_i.
// Throws ValidationError on an empty list.
[[nodiscard]] double reprojection_error(const Homography& h,
                                        std::span<const Correspondence> correspondences);

// Mean world-space distance between each visible observation projected
// through h (after denormalizing by the image dimensions) and its template
// position. Throws ValidationError when no observation is visible.
[[nodiscard]] double keypoint_world_mae(const Homography& h,
                                        std::span<const KeypointObservation> observations,
                                        const FieldTemplate& tmpl,
                                        int image_w,
                                        int image_h);

struct ProjectionErrorResult {
  double mean_m = 0.0;
  int points_used = 0;
  int points_excluded = 0;  // at infinity under either map
};

// Mean distance between the images of the same pixels under two maps.
// Points at infinity under either map are excluded and counted. Throws
// ValidationError when the list is empty or no point survives.
[[nodiscard]] ProjectionErrorResult projection_error_between(const Homography& a,
                                                             const Homography& b,
                                                             std::span<const PixelPoint> points);

// --- per-frame calibration over a record stream ---

enum class CalibrationStatus { kFit, kReused, kGap };

[[nodiscard]] std::string to_string(CalibrationStatus status);

struct CalibrationPolicy {
  int min_keypoints = 4;      // visible keypoints required for a fresh fit
  int max_reuse_frames = 30;  // consecutive frames a stale fit may cover
};

struct FrameCalibration {
  std::int64_t frame_idx = 0;
  CalibrationStatus status = CalibrationStatus::kGap;
  std::optional<Homography> h;
  std::optional<double> reprojection_error_m;
};

// Fits each frame with enough visible keypoints; frames that cannot be fit
// reuse the previous valid homography for up to max_reuse_frames frames and
// become gaps after that. Never throws per-frame; estimation failures
// downgrade the frame to the fallback path.
[[nodiscard]] std::vector<FrameCalibration> calibrate_sequence(
    std::span<const FrameRecord> frames,
    const FieldTemplate& tmpl,
    const CalibrationPolicy& policy = {});

// Line-delimited calibration file: frame_idx, status, 9 row-major entries
// (full precision), reprojection_error_m.
void write_calibrations(std::ostream& out, std::span<const FrameCalibration> calibrations);
[[nodiscard]] std::vector<FrameCalibration> read_calibrations(std::istream& in);
void save_calibrations(const std::filesystem::path& path, std::span<const FrameCalibration> calibrations);
[[nodiscard]] std::vector<FrameCalibration> load_calibrations(const std::filesystem::path& path);

}  // namespace pitch2d
