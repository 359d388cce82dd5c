#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "pitch2d/errors.hpp"
#include "pitch2d/team_clustering.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace pitch2d;

namespace {

Patch uniform_patch(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Patch patch{};
  for (std::size_t i = 0; i < kPatchPixels; ++i) {
    patch[3 * i] = r;
    patch[3 * i + 1] = g;
    patch[3 * i + 2] = b;
  }
  return patch;
}

// Two color blobs with the given separation and spread.
std::vector<std::pair<int, ColorVec>> two_blobs(testsupport::Rng& rng, int per_side,
                                                double separation, double spread) {
  std::uniform_real_distribution<double> jitter(-spread, spread);
  std::vector<std::pair<int, ColorVec>> colors;
  const ColorVec a{60.0, 60.0, 60.0};
  const ColorVec b{60.0 + separation, 60.0, 60.0};
  for (int i = 0; i < per_side; ++i) {
    colors.push_back({i, {a.r + jitter(rng), a.g + jitter(rng), a.b + jitter(rng)}});
    colors.push_back({100 + i, {b.r + jitter(rng), b.g + jitter(rng), b.b + jitter(rng)}});
  }
  return colors;
}

// Partition of the input induced by the labels, as a canonical key.
std::vector<std::vector<int>> induced_partition(
    const std::vector<std::pair<int, ColorVec>>& colors, const TeamAssignment& assignment) {
  std::vector<std::vector<int>> groups(2);
  for (const auto& [track_id, color] : colors) {
    groups[static_cast<std::size_t>(assignment.labels.at(track_id))].push_back(track_id);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  if (groups[1] < groups[0]) std::swap(groups[0], groups[1]);
  return groups;
}

}  // namespace

TEST_CASE("patch mean color on the documented examples") {
  const ColorVec uniform = patch_mean_color(uniform_patch(100, 50, 25));
  CHECK(uniform.r == 100.0);
  CHECK(uniform.g == 50.0);
  CHECK(uniform.b == 25.0);

  // 12 black pixels, 13 white: mean is 13 * 255 / 25 per channel.
  Patch mixed{};
  for (std::size_t i = 0; i < kPatchPixels; ++i) {
    const std::uint8_t v = i < 12 ? 0 : 255;
    mixed[3 * i] = v;
    mixed[3 * i + 1] = v;
    mixed[3 * i + 2] = v;
  }
  const ColorVec half = patch_mean_color(mixed);
  CHECK(half.r == doctest::Approx(132.6));
  CHECK(half.g == doctest::Approx(132.6));
  CHECK(half.b == doctest::Approx(132.6));

  // One pixel 25 higher in red shifts the mean by exactly 1.
  Patch nudged = uniform_patch(100, 50, 25);
  nudged[0] = 125;
  const ColorVec shifted = patch_mean_color(nudged);
  CHECK(shifted.r == doctest::Approx(101.0));
  CHECK(shifted.g == 50.0);
}

TEST_CASE("well-separated pairs cluster into the obvious groups") {
  const std::vector<std::pair<int, ColorVec>> colors{
      {1, {250, 20, 20}}, {2, {240, 30, 25}}, {3, {10, 10, 230}}, {4, {20, 25, 240}}};
  const TeamAssignment assignment = cluster_teams(colors);

  CHECK(assignment.labels.at(1) == assignment.labels.at(2));
  CHECK(assignment.labels.at(3) == assignment.labels.at(4));
  CHECK(assignment.labels.at(1) != assignment.labels.at(3));

  // Brute force confirms this is the SSE-optimal split.
  std::vector<ColorVec> values;
  for (const auto& [id, c] : colors) values.push_back(c);
  const auto optimal = testsupport::optimal_two_partition(values);
  CHECK(assignment.inertia == doctest::Approx(optimal.inertia).epsilon(1e-9));
}

TEST_CASE("two distinct colors get one centroid each and zero inertia") {
  const std::vector<std::pair<int, ColorVec>> colors{{7, {200, 10, 10}}, {9, {10, 10, 200}}};
  const TeamAssignment assignment = cluster_teams(colors);
  CHECK(assignment.inertia == doctest::Approx(0.0));
  CHECK(assignment.labels.at(7) != assignment.labels.at(9));
  CHECK(!assignment.degenerate);
}

TEST_CASE("a 22-track instance splits 11/11 by nearness") {
  testsupport::Rng rng(97);
  const auto colors = two_blobs(rng, 11, 150.0, 10.0);
  const TeamAssignment assignment = cluster_teams(colors);

  int low = 0;
  for (const auto& [id, label] : assignment.labels) low += label == 0 ? 1 : 0;
  CHECK(low == 11);

  // All original-blob members share a label.
  for (int i = 0; i < 11; ++i) {
    CHECK(assignment.labels.at(i) == assignment.labels.at(0));
    CHECK(assignment.labels.at(100 + i) != assignment.labels.at(0));
  }

  std::vector<ColorVec> values;
  for (const auto& [id, c] : colors) values.push_back(c);
  CHECK(assignment.inertia ==
        doctest::Approx(testsupport::optimal_two_partition(values).inertia).epsilon(1e-9));
}

TEST_CASE("small instances are exactly optimal when well separated") {
  testsupport::Rng rng(101);
  std::uniform_int_distribution<int> per_side(2, 6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto colors = two_blobs(rng, per_side(rng), 140.0, 12.0);
    const TeamAssignment assignment = cluster_teams(colors);
    std::vector<ColorVec> values;
    for (const auto& [id, c] : colors) values.push_back(c);
    CHECK(assignment.inertia ==
          doctest::Approx(testsupport::optimal_two_partition(values).inertia).epsilon(1e-9));
  }
}

TEST_CASE("no single relabel can reduce the inertia") {
  testsupport::Rng rng(103);
  std::uniform_real_distribution<double> channel(0.0, 255.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<int, ColorVec>> colors;
    for (int i = 0; i < 10; ++i) {
      colors.push_back({i, {channel(rng), channel(rng), channel(rng)}});
    }
    const TeamAssignment assignment = cluster_teams(colors);

    const auto inertia_of = [&](const std::vector<int>& labels) {
      // Centroids recomputed from the labeling.
      ColorVec sums[2]{};
      int counts[2]{};
      for (std::size_t i = 0; i < colors.size(); ++i) {
        const auto& c = colors[i].second;
        sums[labels[i]].r += c.r;
        sums[labels[i]].g += c.g;
        sums[labels[i]].b += c.b;
        counts[labels[i]] += 1;
      }
      if (counts[0] == 0 || counts[1] == 0) return std::numeric_limits<double>::infinity();
      double total = 0.0;
      for (std::size_t i = 0; i < colors.size(); ++i) {
        const ColorVec centroid{sums[labels[i]].r / counts[labels[i]],
                                sums[labels[i]].g / counts[labels[i]],
                                sums[labels[i]].b / counts[labels[i]]};
        total += squared_distance(colors[i].second, centroid);
      }
      return total;
    };

    std::vector<int> labels;
    for (const auto& [id, c] : colors) labels.push_back(assignment.labels.at(id));
    const double base = inertia_of(labels);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto flipped = labels;
      flipped[i] = 1 - flipped[i];
      CHECK(inertia_of(flipped) >= base - 1e-9);
    }
  }
}

TEST_CASE("clustering is order-independent and canonically labeled") {
  testsupport::Rng rng(107);
  auto colors = two_blobs(rng, 8, 120.0, 15.0);
  const TeamAssignment base = cluster_teams(colors);

  for (int shuffle_round = 0; shuffle_round < 5; ++shuffle_round) {
    std::shuffle(colors.begin(), colors.end(), rng);
    const TeamAssignment shuffled = cluster_teams(colors);
    CHECK(shuffled.labels == base.labels);
    CHECK(induced_partition(colors, shuffled) == induced_partition(colors, base));
  }

  // Label 0 is the lower-luminance centroid.
  CHECK(luminance(base.centroids[0]) <= luminance(base.centroids[1]));
}

TEST_CASE("degenerate and undersized inputs") {
  CHECK_THROWS_AS(cluster_teams(std::vector<std::pair<int, ColorVec>>{{1, {10, 10, 10}}}),
                  ValidationError);

  const std::vector<std::pair<int, ColorVec>> identical{
      {1, {50, 50, 50}}, {2, {50, 50, 50}}, {3, {50, 50, 50}}};
  const TeamAssignment fallback = cluster_teams(identical);
  CHECK(fallback.degenerate);
  CHECK(fallback.inertia == 0.0);
  for (const auto& [id, label] : fallback.labels) CHECK(label == 0);

  const std::vector<std::pair<int, ColorVec>> duplicate_ids{{1, {10, 0, 0}}, {1, {0, 10, 0}}};
  CHECK_THROWS_AS(cluster_teams(duplicate_ids), ValidationError);
}

TEST_CASE("assign_color picks the nearest centroid with ties to 0") {
  TeamAssignment assignment;
  assignment.centroids = {ColorVec{0, 0, 0}, ColorVec{100, 0, 0}};
  CHECK(assign_color(assignment, {0, 0, 0}) == 0);
  CHECK(assign_color(assignment, {100, 0, 0}) == 1);
  CHECK(assign_color(assignment, {50, 0, 0}) == 0);  // equidistant
  CHECK(assign_color(assignment, {90, 0, 0}) == 1);  // 0.9 toward centroid 1
}

TEST_CASE("sequence assignment aggregates per-track medians") {
  // Three frames; track 9 is glared in the middle frame.
  std::vector<FrameRecord> frames;
  for (int t = 0; t < 3; ++t) {
    FrameRecord record;
    record.frame_idx = t;
    record.timestamp_s = 0.1 * t;
    record.image_w = 100;
    record.image_h = 100;
    Detection red;
    red.track_id = 9;
    red.bbox = BBox{0, 0, 2, 2};
    red.mean_color = t == 1 ? ColorVec{15, 15, 210} : ColorVec{210, 20, 20};
    Detection blue;
    blue.track_id = 5;
    blue.bbox = BBox{4, 4, 6, 6};
    blue.mean_color = ColorVec{10, 10, 205};
    record.detections.push_back(red);
    record.detections.push_back(blue);
    frames.push_back(record);
  }

  const TeamAssignment assignment = assign_teams(frames);
  // The median color of track 9 is red despite the glare frame.
  CHECK(assignment.labels.at(9) != assignment.labels.at(5));

  SUBCASE("patch colors work when mean colors are absent") {
    for (auto& frame : frames) {
      for (auto& det : frame.detections) {
        const ColorVec c = *det.mean_color;
        det.mean_color.reset();
        det.patch = uniform_patch(static_cast<std::uint8_t>(c.r), static_cast<std::uint8_t>(c.g),
                                  static_cast<std::uint8_t>(c.b));
      }
    }
    const TeamAssignment from_patches = assign_teams(frames);
    CHECK(from_patches.labels.at(9) != from_patches.labels.at(5));
  }

  SUBCASE("frames without colors are an error") {
    for (auto& frame : frames) {
      for (auto& det : frame.detections) {
        det.mean_color.reset();
        det.patch.reset();
      }
    }
    CHECK_THROWS_AS(assign_teams(frames), ValidationError);
  }
}

TEST_CASE("team assignment files round-trip the labels") {
  const std::vector<std::pair<int, ColorVec>> colors{
      {1, {250, 20, 20}}, {2, {240, 30, 25}}, {3, {10, 10, 230}}, {4, {20, 25, 240}}};
  const TeamAssignment assignment = cluster_teams(colors);

  std::stringstream stream;
  write_team_assignment(stream, assignment);
  const TeamAssignment parsed = read_team_assignment(stream);
  CHECK(parsed.labels == assignment.labels);
  CHECK(parsed.inertia == assignment.inertia);
  CHECK(parsed.degenerate == assignment.degenerate);
  CHECK(parsed.centroids[0].r == assignment.centroids[0].r);
  CHECK(parsed.centroids[1].b == assignment.centroids[1].b);
}
