#include "pitch2d/detection_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "pitch2d/errors.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

namespace pitch2d {

namespace {

std::tuple<double, double, double, double> box_key(const BBox& b) {
  return {b.x1, b.y1, b.x2, b.y2};
}

// Ranks boxes by coordinate order; ties among identical boxes keep input
// order. Greedy tie-breaking on these ranks makes the matched box pairs
// independent of input permutation.
std::vector<int> canonical_ranks(std::span<const BBox> boxes) {
  std::vector<int> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return box_key(boxes[static_cast<std::size_t>(lhs)]) <
           box_key(boxes[static_cast<std::size_t>(rhs)]);
  });
  std::vector<int> rank(boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  }
  return rank;
}

struct FrameTallies {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  double iou_sum = 0.0;
  long pairs = 0;
  DetectionReport report;  // per-frame report, used for macro averaging
};

DetectionReport report_from_counts(long tp, long fp, long fn, double iou_sum, long pairs) {
  DetectionReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                              : (fn == 0 ? 1.0 : 0.0);
  r.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                           : (fp == 0 ? 1.0 : 0.0);
  r.f1 = f1_score(r.precision, r.recall);
  if (pairs > 0) {
    r.mean_iou = iou_sum / static_cast<double>(pairs);
  } else {
    r.mean_iou = (tp + fp + fn) == 0 ? 1.0 : 0.0;
  }
  return r;
}

std::vector<BBox> frame_boxes(const FrameRecord& frame) {
  std::vector<BBox> boxes;
  boxes.reserve(frame.detections.size());
  for (const auto& d : frame.detections) boxes.push_back(d.bbox);
  return boxes;
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

MatchResult match_detections(std::span<const BBox> preds,
                             std::span<const BBox> truths,
                             double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError("iou threshold must be in (0,1]");
  }

  const std::vector<int> pred_rank = canonical_ranks(preds);
  const std::vector<int> truth_rank = canonical_ranks(truths);

  struct Candidate {
    double iou;
    int pred_rank;
    int truth_rank;
    int pred_index;
    int truth_index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < truths.size(); ++j) {
      const double overlap = iou(preds[i], truths[j]);
      if (overlap >= iou_threshold) {
        candidates.push_back({overlap, pred_rank[i], truth_rank[j], static_cast<int>(i),
                              static_cast<int>(j)});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred_rank != b.pred_rank) return a.pred_rank < b.pred_rank;
    return a.truth_rank < b.truth_rank;
  });

  MatchResult result;
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> truth_used(truths.size(), false);
  for (const auto& c : candidates) {
    if (pred_used[static_cast<std::size_t>(c.pred_index)] ||
        truth_used[static_cast<std::size_t>(c.truth_index)]) {
      continue;
    }
    pred_used[static_cast<std::size_t>(c.pred_index)] = true;
    truth_used[static_cast<std::size_t>(c.truth_index)] = true;
    result.pairs.push_back({c.pred_index, c.truth_index, c.iou});
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.pred_index < b.pred_index; });

  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_used[i]) result.unmatched_preds.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < truths.size(); ++j) {
    if (!truth_used[j]) result.unmatched_truths.push_back(static_cast<int>(j));
  }
  return result;
}

DetectionReport detection_report(const MatchResult& match) {
  double iou_sum = 0.0;
  for (const auto& p : match.pairs) iou_sum += p.iou;
  return report_from_counts(static_cast<long>(match.pairs.size()),
                            static_cast<long>(match.unmatched_preds.size()),
                            static_cast<long>(match.unmatched_truths.size()), iou_sum,
                            static_cast<long>(match.pairs.size()));
}

DetectionReport evaluate_sequence(std::span<const FrameRecord> pred_frames,
                                  std::span<const FrameRecord> truth_frames,
                                  double iou_threshold,
                                  Averaging averaging,
                                  int threads) {
  std::map<std::int64_t, const FrameRecord*> truth_by_idx;
  for (const auto& t : truth_frames) {
    if (!truth_by_idx.emplace(t.frame_idx, &t).second) {
      throw ValidationError("duplicate truth frame index " + std::to_string(t.frame_idx));
    }
  }
  std::map<std::int64_t, const FrameRecord*> pred_by_idx;
  for (const auto& p : pred_frames) {
    if (!pred_by_idx.emplace(p.frame_idx, &p).second) {
      throw ValidationError("duplicate prediction frame index " + std::to_string(p.frame_idx));
    }
  }
  if (pred_by_idx.size() != truth_by_idx.size()) {
    throw ValidationError("prediction and truth streams cover different frame sets");
  }
  std::vector<std::pair<const FrameRecord*, const FrameRecord*>> aligned;
  aligned.reserve(pred_by_idx.size());
  for (const auto& [idx, pred] : pred_by_idx) {
    const auto it = truth_by_idx.find(idx);
    if (it == truth_by_idx.end()) {
      throw ValidationError("prediction frame " + std::to_string(idx) + " has no truth frame");
    }
    aligned.emplace_back(pred, it->second);
  }

  std::vector<FrameTallies> tallies(aligned.size());
  detail::parallel_for_index(aligned.size(), threads, [&](std::size_t i) {
    const auto [pred, truth] = aligned[i];
    const MatchResult match =
        match_detections(frame_boxes(*pred), frame_boxes(*truth), iou_threshold);
    FrameTallies& t = tallies[i];
    t.tp = static_cast<long>(match.pairs.size());
    t.fp = static_cast<long>(match.unmatched_preds.size());
    t.fn = static_cast<long>(match.unmatched_truths.size());
    for (const auto& p : match.pairs) t.iou_sum += p.iou;
    t.pairs = t.tp;
    t.report = detection_report(match);
  });

  long tp = 0;
  long fp = 0;
  long fn = 0;
  for (const auto& t : tallies) {
    tp += t.tp;
    fp += t.fp;
    fn += t.fn;
  }

  if (averaging == Averaging::kMicro) {
    double iou_sum = 0.0;
    long pairs = 0;
    for (const auto& t : tallies) {
      iou_sum += t.iou_sum;
      pairs += t.pairs;
    }
    return report_from_counts(tp, fp, fn, iou_sum, pairs);
  }

  // Macro: mean of the per-frame reports; counts still pooled. An empty
  // stream keeps the micro conventions.
  if (tallies.empty()) return report_from_counts(tp, fp, fn, 0.0, 0);
  DetectionReport macro;
  macro.tp = tp;
  macro.fp = fp;
  macro.fn = fn;
  for (const auto& t : tallies) {
    macro.mean_iou += t.report.mean_iou;
    macro.recall += t.report.recall;
    macro.precision += t.report.precision;
    macro.f1 += t.report.f1;
  }
  const auto n = static_cast<double>(tallies.size());
  macro.mean_iou /= n;
  macro.recall /= n;
  macro.precision /= n;
  macro.f1 /= n;
  return macro;
}

std::string format_detection_report(const DetectionReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "Mean IoU  Recall  Precision  F1-Score      TP      FP      FN\n";
  out << "  " << report.mean_iou << "  " << report.recall << "     " << report.precision << "    "
      << report.f1;
  out.unsetf(std::ios::fixed);
  out << "  ";
  out.width(6);
  out << report.tp << "  ";
  out.width(6);
  out << report.fp << "  ";
  out.width(6);
  out << report.fn << "\n";
  return out.str();
}

std::string detection_report_json(const DetectionReport& report) {
  detail::Json j;
  j["mean_iou"] = report.mean_iou;
  j["recall"] = report.recall;
  j["precision"] = report.precision;
  j["f1"] = report.f1;
  j["tp"] = report.tp;
  j["fp"] = report.fp;
  j["fn"] = report.fn;
  return j.dump(2);
}

DetectionReport parse_detection_report(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const detail::Json j = detail::parse_document(buffer.str());
  DetectionReport r;
  r.mean_iou = detail::require_number(j, "mean_iou");
  r.recall = detail::require_number(j, "recall");
  r.precision = detail::require_number(j, "precision");
  r.f1 = detail::require_number(j, "f1");
  r.tp = detail::require_integer(j, "tp");
  r.fp = detail::require_integer(j, "fp");
  r.fn = detail::require_integer(j, "fn");
  return r;
}

}  // namespace pitch2d
