#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pitch2d/field.hpp"
#include "pitch2d/records.hpp"

namespace pitch2d {

// Model output for one keypoint: coordinates are always emitted; masking
// against the truth visibility happens at evaluation time.
struct KeypointPrediction {
  int keypoint_id = 0;
  NormPoint pos{0.0, 0.0};
  double visibility_prob = 0.0;
};

// All 12 predictions for one frame, as stored in a predictions file.
struct FramePredictions {
  std::int64_t frame_idx = 0;
  std::vector<KeypointPrediction> keypoints;
};

// Truth/prediction pairs aligned by frame and keypoint id, C = 12 per frame.
struct KeypointEvalBatch {
  struct Frame {
    std::int64_t frame_idx = 0;
    std::array<KeypointObservation, kKeypointCount> truth{};
    std::array<KeypointPrediction, kKeypointCount> pred{};
  };
  std::vector<Frame> frames;
};

// Aligns truth records with prediction records by frame index and keypoint
// id. Truth keypoints absent from a record count as invisible; absent or
// duplicate prediction ids are alignment errors (ValidationError).
[[nodiscard]] KeypointEvalBatch align_batch(std::span<const FrameRecord> truth_frames,
                                            std::span<const FramePredictions> pred_frames);

struct MaskedMae {
  double value = 0.0;    // normalized image units
  int frames_used = 0;
  int frames_skipped = 0;  // frames without a single visible truth keypoint
};

// Mean absolute coordinate error over visible keypoints only: per frame,
// sum of v * (|dx| + |dy|) divided by the visible count, then averaged
// over frames. Frames with no visible truth keypoint are skipped and
// counted; throws ValidationError when every frame is skipped.
[[nodiscard]] MaskedMae masked_mae(const KeypointEvalBatch& batch);

// Fraction of keypoints whose rounded visibility probability matches the
// truth flag; probabilities of exactly 0.5 round up to visible. Throws
// ValidationError on an empty batch.
[[nodiscard]] double visibility_accuracy(const KeypointEvalBatch& batch);

// Converts a normalized MAE to pixels at the given resolution using the
// mean image dimension (w + h) / 2.
[[nodiscard]] double mae_to_pixels(double mae_norm, int image_w, int image_h);

struct KeypointReport {
  double accuracy = 0.0;
  double mae_norm = 0.0;
  double mae_px = 0.0;
  int frames_used = 0;
  int frames_skipped = 0;
  int image_w = 0;
  int image_h = 0;
};

[[nodiscard]] KeypointReport evaluate_keypoints(const KeypointEvalBatch& batch,
                                                int image_w,
                                                int image_h);

// Line-delimited predictions file: frame_idx + keypoints[{id, x, y,
// visibility_prob}].
[[nodiscard]] std::vector<FramePredictions> read_predictions(std::istream& in);
[[nodiscard]] std::vector<FramePredictions> load_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, std::span<const FramePredictions> preds);

[[nodiscard]] std::string format_keypoint_report(const KeypointReport& report);
[[nodiscard]] std::string keypoint_report_json(const KeypointReport& report);

}  // namespace pitch2d
