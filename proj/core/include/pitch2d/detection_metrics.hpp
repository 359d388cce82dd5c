#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pitch2d/geometry.hpp"
#include "pitch2d/records.hpp"

namespace pitch2d {

struct MatchedPair {
  int pred_index = 0;
  int truth_index = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_preds;
  std::vector<int> unmatched_truths;
};

struct DetectionReport {
  double mean_iou = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

enum class Averaging { kMicro, kMacro };

// Intersection-over-union of two boxes, in [0, 1].
[[nodiscard]] double iou(const BBox& a, const BBox& b);

// Harmonic mean of precision and recall; 0 when both vanish.
[[nodiscard]] double f1_score(double precision, double recall);

// Greedy one-to-one matching by descending IoU at the given threshold.
// Candidates are ordered by IoU, ties broken by the canonical (coordinate)
// order of the boxes and then by input index, so the matched box pairs do
// not depend on input order. Throws ConfigError unless threshold is in
// (0, 1].
[[nodiscard]] MatchResult match_detections(std::span<const BBox> preds,
                                           std::span<const BBox> truths,
                                           double iou_threshold);

// tp/fp/fn counts and precision/recall/F1 with the documented empty-set
// conventions; mean IoU is over matched pairs (1.0 for the empty-perfect
// case, 0.0 when boxes exist but nothing matched).
[[nodiscard]] DetectionReport detection_report(const MatchResult& match);

// Frame-aligned evaluation over two record streams. Micro averaging pools
// counts and matched IoUs across frames; macro averages the per-frame
// reports (counts are summed either way). Matching is independent per
// frame, so extra worker threads cannot change the result. Throws
// ValidationError when the frame-index sets differ.
[[nodiscard]] DetectionReport evaluate_sequence(std::span<const FrameRecord> pred_frames,
                                                std::span<const FrameRecord> truth_frames,
                                                double iou_threshold,
                                                Averaging averaging = Averaging::kMicro,
                                                int threads = 1);

// Human-readable table (Mean IoU, Recall, Precision, F1-Score + counts).
[[nodiscard]] std::string format_detection_report(const DetectionReport& report);

// Machine-readable JSON form; the stable test surface.
[[nodiscard]] std::string detection_report_json(const DetectionReport& report);
[[nodiscard]] DetectionReport parse_detection_report(std::istream& in);

}  // namespace pitch2d
