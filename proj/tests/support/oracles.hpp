#pragma once

// Independent reference implementations used only to check the library.
// Everything here favors brute force over cleverness on purpose.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include "pitch2d/color.hpp"
#include "pitch2d/detection_metrics.hpp"
#include "pitch2d/geometry.hpp"
#include "pitch2d/keypoint_metrics.hpp"

namespace testsupport {

// IoU by counting integer unit cells. Valid for integer-coordinate boxes.
inline double iou_pixel_oracle(const pitch2d::BBox& a, const pitch2d::BBox& b) {
  const auto in_box = [](const pitch2d::BBox& box, int cx, int cy) {
    return cx >= box.x1 && cx + 1 <= box.x2 && cy >= box.y1 && cy + 1 <= box.y2;
  };
  const int lo_x = static_cast<int>(std::floor(std::min(a.x1, b.x1)));
  const int hi_x = static_cast<int>(std::ceil(std::max(a.x2, b.x2)));
  const int lo_y = static_cast<int>(std::floor(std::min(a.y1, b.y1)));
  const int hi_y = static_cast<int>(std::ceil(std::max(a.y2, b.y2)));
  long long in_a = 0;
  long long in_b = 0;
  long long in_both = 0;
  for (int cx = lo_x; cx < hi_x; ++cx) {
    for (int cy = lo_y; cy < hi_y; ++cy) {
      const bool ia = in_box(a, cx, cy);
      const bool ib = in_box(b, cx, cy);
      in_a += ia;
      in_b += ib;
      in_both += ia && ib;
    }
  }
  const long long uni = in_a + in_b - in_both;
  return uni == 0 ? 0.0 : static_cast<double>(in_both) / static_cast<double>(uni);
}

// Greedy matching by repeated full scans instead of one sort: highest IoU
// among unmatched pairs wins, ties broken by canonical box order and then
// input index, matching the documented rule.
inline pitch2d::MatchResult greedy_match_oracle(std::span<const pitch2d::BBox> preds,
                                                std::span<const pitch2d::BBox> truths,
                                                double threshold) {
  const auto key = [](const pitch2d::BBox& b) { return std::make_tuple(b.x1, b.y1, b.x2, b.y2); };
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> truth_used(truths.size(), false);
  pitch2d::MatchResult result;

  while (true) {
    int best_i = -1;
    int best_j = -1;
    double best_iou = -1.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (pred_used[i]) continue;
      for (std::size_t j = 0; j < truths.size(); ++j) {
        if (truth_used[j]) continue;
        const double overlap = pitch2d::iou(preds[i], truths[j]);
        if (overlap < threshold) continue;
        bool better = overlap > best_iou;
        if (overlap == best_iou && best_i >= 0) {
          const auto lhs = std::make_tuple(key(preds[i]), key(truths[j]), i, j);
          const auto rhs = std::make_tuple(key(preds[static_cast<std::size_t>(best_i)]),
                                           key(truths[static_cast<std::size_t>(best_j)]),
                                           static_cast<std::size_t>(best_i),
                                           static_cast<std::size_t>(best_j));
          better = lhs < rhs;
        }
        if (better) {
          best_iou = overlap;
          best_i = static_cast<int>(i);
          best_j = static_cast<int>(j);
        }
      }
    }
    if (best_i < 0) break;
    pred_used[static_cast<std::size_t>(best_i)] = true;
    truth_used[static_cast<std::size_t>(best_j)] = true;
    result.pairs.push_back({best_i, best_j, best_iou});
  }

  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_used[i]) result.unmatched_preds.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < truths.size(); ++j) {
    if (!truth_used[j]) result.unmatched_truths.push_back(static_cast<int>(j));
  }
  return result;
}

struct MaskedMaeOracle {
  double value = 0.0;
  int frames_used = 0;
  int frames_skipped = 0;
};

inline MaskedMaeOracle masked_mae_oracle(const pitch2d::KeypointEvalBatch& batch) {
  MaskedMaeOracle out;
  double total = 0.0;
  for (const auto& frame : batch.frames) {
    double numer = 0.0;
    double denom = 0.0;
    for (std::size_t j = 0; j < frame.truth.size(); ++j) {
      const double v = frame.truth[j].visible ? 1.0 : 0.0;
      numer += v * (std::abs(frame.truth[j].pos.x - frame.pred[j].pos.x) +
                    std::abs(frame.truth[j].pos.y - frame.pred[j].pos.y));
      denom += v;
    }
    if (denom == 0.0) {
      ++out.frames_skipped;
      continue;
    }
    total += numer / denom;
    ++out.frames_used;
  }
  if (out.frames_used > 0) out.value = total / out.frames_used;
  return out;
}

inline double visibility_accuracy_oracle(const pitch2d::KeypointEvalBatch& batch) {
  double total = 0.0;
  for (const auto& frame : batch.frames) {
    double frame_sum = 0.0;
    for (std::size_t j = 0; j < frame.truth.size(); ++j) {
      const int rounded = frame.pred[j].visibility_prob >= 0.5 ? 1 : 0;
      const int truth = frame.truth[j].visible ? 1 : 0;
      frame_sum += rounded == truth ? 1.0 : 0.0;
    }
    total += frame_sum / static_cast<double>(frame.truth.size());
  }
  return total / static_cast<double>(batch.frames.size());
}

struct OptimalPartition {
  double inertia = std::numeric_limits<double>::infinity();
  std::uint32_t mask = 0;  // bit i set: point i in cluster 1 (point 0 fixed to cluster 0)
};

// Exhaustive optimal 2-partition by within-cluster sum of squares.
// Gray-code enumeration keeps each step O(1); fine up to ~24 points.
inline OptimalPartition optimal_two_partition(std::span<const pitch2d::ColorVec> colors) {
  const std::size_t n = colors.size();
  struct Side {
    double sr = 0.0, sg = 0.0, sb = 0.0;  // channel sums
    double sq = 0.0;                      // sum of squared norms
    int count = 0;
  };
  // SSE of one cluster = sum |p|^2 - |sum p|^2 / count.
  const auto sse = [](const Side& s) {
    if (s.count == 0) return 0.0;
    return s.sq - (s.sr * s.sr + s.sg * s.sg + s.sb * s.sb) / s.count;
  };

  Side side[2];
  for (const auto& c : colors) {
    side[0].sr += c.r;
    side[0].sg += c.g;
    side[0].sb += c.b;
    side[0].sq += c.r * c.r + c.g * c.g + c.b * c.b;
    side[0].count += 1;
  }

  const auto move = [&](std::size_t i, int from, int to) {
    const auto& c = colors[i];
    side[from].sr -= c.r;
    side[from].sg -= c.g;
    side[from].sb -= c.b;
    side[from].sq -= c.r * c.r + c.g * c.g + c.b * c.b;
    side[from].count -= 1;
    side[to].sr += c.r;
    side[to].sg += c.g;
    side[to].sb += c.b;
    side[to].sq += c.r * c.r + c.g * c.g + c.b * c.b;
    side[to].count += 1;
  };

  OptimalPartition best;
  std::uint32_t gray = 0;  // membership of points 1..n-1 in cluster 1
  const std::uint64_t steps = 1ULL << (n - 1);
  for (std::uint64_t k = 0;; ++k) {
    if (side[0].count > 0 && side[1].count > 0) {
      const double inertia = sse(side[0]) + sse(side[1]);
      if (inertia < best.inertia) {
        best.inertia = inertia;
        best.mask = gray << 1;  // shift: bit i covers point i+1
      }
    }
    if (k + 1 >= steps) break;
    const auto flip_bit = static_cast<std::uint32_t>(std::countr_zero(k + 1));
    const std::size_t point = static_cast<std::size_t>(flip_bit) + 1;
    const bool now_in_one = ((gray >> flip_bit) & 1u) == 0;
    move(point, now_in_one ? 0 : 1, now_in_one ? 1 : 0);
    gray ^= 1u << flip_bit;
  }

  // The incremental sums drift over millions of updates; recompute the
  // winning partition's inertia from scratch.
  pitch2d::ColorVec sums[2]{};
  int counts[2]{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto cluster = (best.mask >> i) & 1u;
    sums[cluster].r += colors[i].r;
    sums[cluster].g += colors[i].g;
    sums[cluster].b += colors[i].b;
    counts[cluster] += 1;
  }
  double exact = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cluster = (best.mask >> i) & 1u;
    const pitch2d::ColorVec mean{sums[cluster].r / counts[cluster],
                                 sums[cluster].g / counts[cluster],
                                 sums[cluster].b / counts[cluster]};
    exact += squared_distance(colors[i], mean);
  }
  best.inertia = exact;
  return best;
}

}  // namespace testsupport
