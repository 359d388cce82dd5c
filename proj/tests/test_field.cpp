#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "pitch2d/errors.hpp"
#include "pitch2d/field.hpp"

using namespace pitch2d;

namespace {

FieldConfig config(double length, double width) {
  FieldConfig cfg;
  cfg.length_m = length;
  cfg.width_m = width;
  return cfg;
}

}  // namespace

TEST_CASE("default template places the center mark at midfield") {
  const FieldTemplate tmpl = canonical_template(config(105.0, 68.0));
  const WorldPoint center = keypoint_world_position(tmpl, kCenterMark);
  CHECK(center.x == doctest::Approx(52.5));
  CHECK(center.y == doctest::Approx(34.0));
}

TEST_CASE("penalty-arc keypoints mirror about the halfway line") {
  for (const auto& [length, width] : std::vector<std::pair<double, double>>{
           {105.0, 68.0}, {100.0, 64.0}, {110.0, 75.0}, {90.0, 60.0}}) {
    const FieldTemplate tmpl = canonical_template(config(length, width));
    for (const auto& [left, right] : mirror_keypoint_pairs()) {
      const WorldPoint l = keypoint_world_position(tmpl, left);
      const WorldPoint r = keypoint_world_position(tmpl, right);
      CHECK(l.x == doctest::Approx(length - r.x).epsilon(1e-12));
      CHECK(l.y == doctest::Approx(r.y).epsilon(1e-12));
    }
  }
}

TEST_CASE("keypoint x-coordinates form a mirror-symmetric multiset") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> length_dist(95.0, 120.0);
  std::uniform_real_distribution<double> width_dist(60.0, 90.0);
  for (int i = 0; i < 20; ++i) {
    const double length = length_dist(rng);
    const double width = std::min(width_dist(rng), length);
    const FieldTemplate tmpl = canonical_template(config(length, width));

    std::vector<double> xs;
    std::vector<double> mirrored;
    for (const auto& kp : tmpl.keypoints) {
      xs.push_back(kp.x);
      mirrored.push_back(length - kp.x);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(mirrored.begin(), mirrored.end());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      CHECK(xs[k] == doctest::Approx(mirrored[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("overrides replace the canonical position") {
  FieldConfig cfg = config(105.0, 68.0);
  cfg.keypoint_overrides.push_back({3, {30.0, 34.0}});
  const FieldTemplate tmpl = canonical_template(cfg);
  const WorldPoint p = keypoint_world_position(tmpl, 3);
  CHECK(p.x == 30.0);
  CHECK(p.y == 34.0);
}

TEST_CASE("canonical_template is deterministic") {
  const FieldTemplate a = canonical_template(config(105.0, 68.0));
  const FieldTemplate b = canonical_template(config(105.0, 68.0));
  for (int id = 0; id < kKeypointCount; ++id) {
    CHECK(a.keypoints[static_cast<std::size_t>(id)].x == b.keypoints[static_cast<std::size_t>(id)].x);
    CHECK(a.keypoints[static_cast<std::size_t>(id)].y == b.keypoints[static_cast<std::size_t>(id)].y);
  }
  CHECK(a.markings.segments.size() == b.markings.segments.size());
  CHECK(a.markings.arcs.size() == b.markings.arcs.size());
}

TEST_CASE("keypoints and markings stay inside the field rectangle") {
  const FieldTemplate tmpl = canonical_template(config(105.0, 68.0));
  const auto inside = [&](const WorldPoint& p) {
    return p.x >= -1e-9 && p.x <= 105.0 + 1e-9 && p.y >= -1e-9 && p.y <= 68.0 + 1e-9;
  };
  for (const auto& kp : tmpl.keypoints) CHECK(inside(kp));
  for (const auto& seg : tmpl.markings.segments) {
    CHECK(inside(seg.a));
    CHECK(inside(seg.b));
  }
  for (const auto& arc : tmpl.markings.arcs) {
    CHECK(inside({arc.center.x + arc.radius, arc.center.y}) ==
          (arc.center.x + arc.radius <= 105.0 + 1e-9 && arc.center.x + arc.radius >= -1e-9));
    // Sampled sweep.
    for (int k = 0; k <= 16; ++k) {
      const double angle = arc.start_rad + (arc.end_rad - arc.start_rad) * k / 16.0;
      CHECK(inside({arc.center.x + arc.radius * std::cos(angle),
                    arc.center.y + arc.radius * std::sin(angle)}));
    }
  }
}

TEST_CASE("keypoint lookup rejects out-of-range ids") {
  const FieldTemplate tmpl = canonical_template(config(105.0, 68.0));
  CHECK_NOTHROW(keypoint_world_position(tmpl, 0));
  CHECK_NOTHROW(keypoint_world_position(tmpl, 11));
  CHECK_THROWS_AS(keypoint_world_position(tmpl, 12), ValidationError);
  CHECK_THROWS_AS(keypoint_world_position(tmpl, -1), ValidationError);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(canonical_template(config(0.0, 68.0)), ConfigError);
  CHECK_THROWS_AS(canonical_template(config(105.0, -1.0)), ConfigError);
  CHECK_THROWS_AS(canonical_template(config(60.0, 68.0)), ConfigError);  // length < width
  // Too narrow for the standard penalty box.
  CHECK_THROWS_AS(canonical_template(config(50.0, 38.0)), ConfigError);

  FieldConfig duplicate = config(105.0, 68.0);
  duplicate.keypoint_overrides.push_back({3, {30.0, 34.0}});
  duplicate.keypoint_overrides.push_back({3, {31.0, 34.0}});
  CHECK_THROWS_AS(canonical_template(duplicate), ConfigError);

  FieldConfig out_of_range = config(105.0, 68.0);
  out_of_range.keypoint_overrides.push_back({12, {30.0, 34.0}});
  CHECK_THROWS_AS(canonical_template(out_of_range), ConfigError);

  FieldConfig outside = config(105.0, 68.0);
  outside.keypoint_overrides.push_back({3, {120.0, 34.0}});
  CHECK_THROWS_AS(canonical_template(outside), ConfigError);
}

TEST_CASE("field config round-trips through its file form") {
  FieldConfig cfg = config(100.0, 64.0);
  cfg.keypoint_overrides.push_back({5, {16.5, 25.25}});

  std::stringstream stream;
  write_field_config(stream, cfg);
  const FieldConfig parsed = read_field_config(stream);

  CHECK(parsed.length_m == cfg.length_m);
  CHECK(parsed.width_m == cfg.width_m);
  REQUIRE(parsed.keypoint_overrides.size() == 1);
  CHECK(parsed.keypoint_overrides[0].keypoint_id == 5);
  CHECK(parsed.keypoint_overrides[0].world.x == 16.5);
  CHECK(parsed.keypoint_overrides[0].world.y == 25.25);
}

TEST_CASE("malformed config files raise ConfigError") {
  std::stringstream bad_json("{length_m:");
  CHECK_THROWS_AS(read_field_config(bad_json), ConfigError);
  std::stringstream missing("{\"length_m\": 105.0}");
  CHECK_THROWS_AS(read_field_config(missing), ConfigError);
}
