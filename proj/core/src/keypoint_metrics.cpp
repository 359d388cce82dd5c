#include "pitch2d/keypoint_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "pitch2d/errors.hpp"
#include "json_util.hpp"

namespace pitch2d {

KeypointEvalBatch align_batch(std::span<const FrameRecord> truth_frames,
                              std::span<const FramePredictions> pred_frames) {
  std::map<std::int64_t, const FrameRecord*> truth_by_idx;
  for (const auto& t : truth_frames) {
    if (!truth_by_idx.emplace(t.frame_idx, &t).second) {
      throw ValidationError("duplicate truth frame index " + std::to_string(t.frame_idx));
    }
  }
  std::map<std::int64_t, const FramePredictions*> pred_by_idx;
  for (const auto& p : pred_frames) {
    if (!pred_by_idx.emplace(p.frame_idx, &p).second) {
      throw ValidationError("duplicate prediction frame index " + std::to_string(p.frame_idx));
    }
  }
  if (truth_by_idx.size() != pred_by_idx.size()) {
    throw ValidationError("prediction and truth streams cover different frame sets");
  }

  KeypointEvalBatch batch;
  for (const auto& [idx, truth] : truth_by_idx) {
    const auto pit = pred_by_idx.find(idx);
    if (pit == pred_by_idx.end()) {
      throw ValidationError("truth frame " + std::to_string(idx) + " has no prediction frame");
    }

    KeypointEvalBatch::Frame frame;
    frame.frame_idx = idx;
    // Truth keypoints absent from the record count as invisible.
    for (int id = 0; id < kKeypointCount; ++id) {
      frame.truth[static_cast<std::size_t>(id)] =
          KeypointObservation{id, NormPoint::sentinel(), false};
    }
    for (const auto& obs : truth->keypoints) {
      if (obs.keypoint_id < 0 || obs.keypoint_id >= kKeypointCount) {
        throw ValidationError("truth keypoint id out of range [0,11]");
      }
      frame.truth[static_cast<std::size_t>(obs.keypoint_id)] = obs;
    }

    std::array<bool, kKeypointCount> seen{};
    for (const auto& pred : pit->second->keypoints) {
      if (pred.keypoint_id < 0 || pred.keypoint_id >= kKeypointCount) {
        throw ValidationError("prediction keypoint id out of range [0,11]");
      }
      if (seen[static_cast<std::size_t>(pred.keypoint_id)]) {
        throw ValidationError("duplicate prediction for keypoint " +
                              std::to_string(pred.keypoint_id) + " in frame " +
                              std::to_string(idx));
      }
      seen[static_cast<std::size_t>(pred.keypoint_id)] = true;
      if (!(pred.visibility_prob >= 0.0 && pred.visibility_prob <= 1.0)) {
        throw ValidationError("visibility_prob must be in [0,1]");
      }
      if (!pred.pos.in_unit_square()) {
        throw ValidationError("prediction coordinates must be in [0,1]^2");
      }
      frame.pred[static_cast<std::size_t>(pred.keypoint_id)] = pred;
    }
    for (int id = 0; id < kKeypointCount; ++id) {
      if (!seen[static_cast<std::size_t>(id)]) {
        throw ValidationError("frame " + std::to_string(idx) +
                              " is missing a prediction for keypoint " + std::to_string(id));
      }
    }
    batch.frames.push_back(std::move(frame));
  }
  return batch;
}

MaskedMae masked_mae(const KeypointEvalBatch& batch) {
  MaskedMae result;
  double frame_sum = 0.0;
  for (const auto& frame : batch.frames) {
    double err = 0.0;
    int visible = 0;
    for (int id = 0; id < kKeypointCount; ++id) {
      const auto& truth = frame.truth[static_cast<std::size_t>(id)];
      if (!truth.visible) continue;
      const auto& pred = frame.pred[static_cast<std::size_t>(id)];
      err += std::abs(truth.pos.x - pred.pos.x) + std::abs(truth.pos.y - pred.pos.y);
      ++visible;
    }
    if (visible == 0) {
      ++result.frames_skipped;
      continue;
    }
    frame_sum += err / static_cast<double>(visible);
    ++result.frames_used;
  }
  if (result.frames_used == 0) {
    throw ValidationError("no frame carries a visible truth keypoint");
  }
  result.value = frame_sum / static_cast<double>(result.frames_used);
  return result;
}

double visibility_accuracy(const KeypointEvalBatch& batch) {
  if (batch.frames.empty()) throw ValidationError("empty evaluation batch");
  double sum = 0.0;
  for (const auto& frame : batch.frames) {
    int correct = 0;
    for (int id = 0; id < kKeypointCount; ++id) {
      // round-half-up: a probability of exactly 0.5 counts as visible.
      const bool predicted = frame.pred[static_cast<std::size_t>(id)].visibility_prob >= 0.5;
      if (predicted == frame.truth[static_cast<std::size_t>(id)].visible) ++correct;
    }
    sum += static_cast<double>(correct) / static_cast<double>(kKeypointCount);
  }
  return sum / static_cast<double>(batch.frames.size());
}

double mae_to_pixels(double mae_norm, int image_w, int image_h) {
  if (image_w <= 0 || image_h <= 0) throw ConfigError("image dimensions must be positive");
  return mae_norm * (static_cast<double>(image_w) + static_cast<double>(image_h)) / 2.0;
}

KeypointReport evaluate_keypoints(const KeypointEvalBatch& batch, int image_w, int image_h) {
  const MaskedMae mae = masked_mae(batch);
  KeypointReport report;
  report.accuracy = visibility_accuracy(batch);
  report.mae_norm = mae.value;
  report.mae_px = mae_to_pixels(mae.value, image_w, image_h);
  report.frames_used = mae.frames_used;
  report.frames_skipped = mae.frames_skipped;
  report.image_w = image_w;
  report.image_h = image_h;
  return report;
}

std::vector<FramePredictions> read_predictions(std::istream& in) {
  std::vector<FramePredictions> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const detail::Json j = detail::parse_document(line, line_no);
    FramePredictions fp;
    fp.frame_idx = detail::require_integer(j, "frame_idx", line_no);
    for (const auto& kj : detail::require(j, "keypoints", line_no)) {
      KeypointPrediction pred;
      pred.keypoint_id = static_cast<int>(detail::require_integer(kj, "id", line_no));
      pred.pos.x = detail::require_number(kj, "x", line_no);
      pred.pos.y = detail::require_number(kj, "y", line_no);
      pred.visibility_prob = detail::require_number(kj, "visibility_prob", line_no);
      fp.keypoints.push_back(pred);
    }
    result.push_back(std::move(fp));
  }
  return result;
}

std::vector<FramePredictions> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open predictions: " + path.string());
  return read_predictions(in);
}

void write_predictions(std::ostream& out, std::span<const FramePredictions> preds) {
  for (const auto& fp : preds) {
    detail::Json j;
    j["frame_idx"] = fp.frame_idx;
    j["keypoints"] = detail::Json::array();
    for (const auto& k : fp.keypoints) {
      j["keypoints"].push_back({{"id", k.keypoint_id},
                                {"x", k.pos.x},
                                {"y", k.pos.y},
                                {"visibility_prob", k.visibility_prob}});
    }
    out << j.dump() << '\n';
  }
}

std::string format_keypoint_report(const KeypointReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "Accuracy       " << report.accuracy << "\n";
  out << "MAE (% image)  " << report.mae_norm << "\n";
  out << "MAE (pixels)   " << report.mae_px << "\n";
  out.unsetf(std::ios::fixed);
  out << "Frames used    " << report.frames_used << "\n";
  out << "Frames skipped " << report.frames_skipped << "\n";
  return out.str();
}

std::string keypoint_report_json(const KeypointReport& report) {
  detail::Json j;
  j["accuracy"] = report.accuracy;
  j["mae_norm"] = report.mae_norm;
  j["mae_px"] = report.mae_px;
  j["frames_used"] = report.frames_used;
  j["frames_skipped"] = report.frames_skipped;
  j["image_w"] = report.image_w;
  j["image_h"] = report.image_h;
  return j.dump(2);
}

}  // namespace pitch2d
