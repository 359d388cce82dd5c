#include "pitch2d/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "pitch2d/errors.hpp"
#include "pitch2d/field.hpp"
#include "json_util.hpp"

namespace pitch2d {

namespace {

using detail::Json;

Detection parse_detection(const Json& j, std::size_t line_no) {
  Detection d;
  d.track_id = static_cast<int>(detail::require_integer(j, "track_id", line_no));

  const Json& box = detail::require(j, "bbox", line_no);
  if (!box.is_array() || box.size() != 4) {
    throw ParseError("field 'bbox' must be an array of 4 numbers", line_no);
  }
  d.bbox = BBox{box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
                box[3].get<double>()};

  if (j.contains("mask") && !j.at("mask").is_null()) {
    MaskPolygon mask;
    for (const auto& v : j.at("mask")) {
      if (!v.is_array() || v.size() != 2) {
        throw ParseError("mask vertices must be [x, y] pairs", line_no);
      }
      mask.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    d.mask = std::move(mask);
  }
  if (j.contains("patch") && !j.at("patch").is_null()) {
    const Json& p = j.at("patch");
    if (!p.is_array() || p.size() != 75) {
      throw ParseError("field 'patch' must be an array of 75 bytes", line_no);
    }
    Patch patch{};
    for (std::size_t i = 0; i < 75; ++i) {
      const auto v = p[i].get<std::int64_t>();
      if (v < 0 || v > 255) throw ParseError("patch bytes must be in [0,255]", line_no);
      patch[i] = static_cast<std::uint8_t>(v);
    }
    d.patch = patch;
  }
  if (j.contains("mean_color") && !j.at("mean_color").is_null()) {
    const Json& c = j.at("mean_color");
    if (!c.is_array() || c.size() != 3) {
      throw ParseError("field 'mean_color' must be an array of 3 numbers", line_no);
    }
    d.mean_color = ColorVec{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
  }
  return d;
}

KeypointObservation parse_keypoint(const Json& j, std::size_t line_no) {
  KeypointObservation k;
  k.keypoint_id = static_cast<int>(detail::require_integer(j, "id", line_no));
  k.pos.x = detail::require_number(j, "x", line_no);
  k.pos.y = detail::require_number(j, "y", line_no);
  const Json& vis = detail::require(j, "visible", line_no);
  if (vis.is_boolean()) {
    k.visible = vis.get<bool>();
  } else if (vis.is_number_integer()) {
    const auto v = vis.get<std::int64_t>();
    if (v != 0 && v != 1) throw ParseError("field 'visible' must be 0 or 1", line_no);
    k.visible = v == 1;
  } else {
    throw ParseError("field 'visible' must be 0 or 1", line_no);
  }
  return k;
}

}  // namespace

void validate_record(const FrameRecord& record) {
  if (record.frame_idx < 0) throw ValidationError("frame_idx must be >= 0");
  if (!std::isfinite(record.timestamp_s) || record.timestamp_s < 0.0) {
    throw ValidationError("timestamp_s must be finite and >= 0");
  }
  if (record.image_w <= 0 || record.image_h <= 0) {
    throw ValidationError("image_w and image_h must be positive");
  }

  std::set<int> track_ids;
  for (const auto& d : record.detections) {
    if (d.track_id < 0) throw ValidationError("track_id must be >= 0");
    if (!track_ids.insert(d.track_id).second) {
      throw ValidationError("duplicate track_id " + std::to_string(d.track_id) + " within frame " +
                            std::to_string(record.frame_idx));
    }
    if (!valid(d.bbox)) {
      throw ValidationError("bbox must be finite with x1 < x2 and y1 < y2 (track " +
                            std::to_string(d.track_id) + ")");
    }
    if (d.mask) {
      if (d.mask->vertices.empty()) throw ValidationError("mask must have at least one vertex");
      for (const auto& v : d.mask->vertices) {
        if (!finite(v)) throw ValidationError("mask vertices must be finite");
      }
    }
    if (d.mean_color && !valid(*d.mean_color)) {
      throw ValidationError("mean_color channels must be in [0,255]");
    }
  }

  if (record.keypoints.size() > static_cast<std::size_t>(kKeypointCount)) {
    throw ValidationError("keypoints: more than 12 entries");
  }
  std::set<int> keypoint_ids;
  for (const auto& k : record.keypoints) {
    if (k.keypoint_id < 0 || k.keypoint_id >= kKeypointCount) {
      throw ValidationError("keypoints.id out of range [0,11]: " + std::to_string(k.keypoint_id));
    }
    if (!keypoint_ids.insert(k.keypoint_id).second) {
      throw ValidationError("duplicate keypoint id " + std::to_string(k.keypoint_id));
    }
    if (k.visible) {
      if (!k.pos.in_unit_square()) {
        throw ValidationError("keypoints.pos must be inside [0,1]^2 when visible=1 (id " +
                              std::to_string(k.keypoint_id) + ")");
      }
    } else if (!k.pos.is_sentinel()) {
      throw ValidationError("keypoints.pos must be (-1,-1) when visible=0 (id " +
                            std::to_string(k.keypoint_id) + ")");
    }
  }
}

FrameRecord parse_frame_line(const std::string& line, std::size_t line_no) {
  const Json j = detail::parse_document(line, line_no);

  FrameRecord record;
  record.frame_idx = detail::require_integer(j, "frame_idx", line_no);
  record.timestamp_s = detail::require_number(j, "timestamp_s", line_no);
  record.image_w = static_cast<int>(detail::require_integer(j, "image_w", line_no));
  record.image_h = static_cast<int>(detail::require_integer(j, "image_h", line_no));

  if (j.contains("detections")) {
    for (const auto& d : j.at("detections")) record.detections.push_back(parse_detection(d, line_no));
  }
  if (j.contains("keypoints")) {
    for (const auto& k : j.at("keypoints")) record.keypoints.push_back(parse_keypoint(k, line_no));
  }

  validate_record(record);
  return record;
}

std::vector<FrameRecord> parse_frames(std::istream& in) {
  std::vector<FrameRecord> records;
  std::string line;
  std::size_t line_no = 0;
  double last_timestamp = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    FrameRecord record = parse_frame_line(line, line_no);
    if (record.timestamp_s < last_timestamp) {
      throw ValidationError("timestamp_s decreases at line " + std::to_string(line_no));
    }
    last_timestamp = record.timestamp_s;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<FrameRecord> load_frames(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open frame records: " + path.string());
  return parse_frames(in);
}

std::string serialize_frame(const FrameRecord& record) {
  Json j;
  j["frame_idx"] = record.frame_idx;
  j["timestamp_s"] = record.timestamp_s;
  j["image_w"] = record.image_w;
  j["image_h"] = record.image_h;
  j["detections"] = Json::array();
  for (const auto& d : record.detections) {
    Json dj;
    dj["track_id"] = d.track_id;
    dj["bbox"] = {d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2};
    if (d.mask) {
      Json mj = Json::array();
      for (const auto& v : d.mask->vertices) mj.push_back({v.x, v.y});
      dj["mask"] = std::move(mj);
    }
    if (d.patch) {
      Json pj = Json::array();
      for (const auto b : *d.patch) pj.push_back(static_cast<int>(b));
      dj["patch"] = std::move(pj);
    }
    if (d.mean_color) {
      dj["mean_color"] = {d.mean_color->r, d.mean_color->g, d.mean_color->b};
    }
    j["detections"].push_back(std::move(dj));
  }
  j["keypoints"] = Json::array();
  for (const auto& k : record.keypoints) {
    j["keypoints"].push_back(
        {{"id", k.keypoint_id}, {"x", k.pos.x}, {"y", k.pos.y}, {"visible", k.visible ? 1 : 0}});
  }
  return j.dump();
}

void write_frames(std::ostream& out, std::span<const FrameRecord> records) {
  for (const auto& r : records) out << serialize_frame(r) << '\n';
}

void save_frames(const std::filesystem::path& path, std::span<const FrameRecord> records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write frame records: " + path.string());
  write_frames(out, records);
}

BBox mask_to_bbox(const MaskPolygon& mask) {
  if (mask.vertices.empty()) throw ValidationError("mask must have at least one vertex");
  double min_x = mask.vertices.front().x;
  double max_x = min_x;
  double min_y = mask.vertices.front().y;
  double max_y = min_y;
  for (const auto& v : mask.vertices) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  // Degenerate extents inflate to 0.5 px so bbox invariants survive.
  if (max_x == min_x) max_x = min_x + 0.5;
  if (max_y == min_y) max_y = min_y + 0.5;
  return BBox{min_x, min_y, max_x, max_y};
}

PixelPoint bbox_center(const BBox& bbox) {
  return {(bbox.x1 + bbox.x2) / 2.0, (bbox.y1 + bbox.y2) / 2.0};
}

PixelPoint bbox_ground_point(const BBox& bbox) {
  return {(bbox.x1 + bbox.x2) / 2.0, bbox.y2};
}

SwapMap default_swap_map() {
  SwapMap map;
  for (const auto& [a, b] : mirror_keypoint_pairs()) {
    map.to[static_cast<std::size_t>(a)] = b;
    map.to[static_cast<std::size_t>(b)] = a;
  }
  return map;
}

void validate_swap_map(const SwapMap& map) {
  for (int i = 0; i < kKeypointCount; ++i) {
    const int j = map.to[static_cast<std::size_t>(i)];
    if (j < 0 || j >= kKeypointCount) {
      throw ConfigError("swap map target out of range [0,11]: " + std::to_string(j));
    }
    if (map.to[static_cast<std::size_t>(j)] != i) {
      throw ConfigError("swap map is not an involution: " + std::to_string(i) + " -> " +
                        std::to_string(j) + " -> " +
                        std::to_string(map.to[static_cast<std::size_t>(j)]));
    }
  }
}

SwapMap parse_swap_map(const std::string& spec) {
  SwapMap map;
  std::array<bool, 12> assigned{};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("swap map entries must look like 'a:b', got '" + item + "'");
    }
    int a = 0;
    int b = 0;
    try {
      a = std::stoi(item.substr(0, colon));
      b = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("swap map entries must be integer pairs, got '" + item + "'");
    }
    if (a < 0 || a >= kKeypointCount || b < 0 || b >= kKeypointCount) {
      throw ConfigError("swap map ids must be in [0,11], got '" + item + "'");
    }
    if (assigned[static_cast<std::size_t>(a)] || assigned[static_cast<std::size_t>(b)]) {
      throw ConfigError("swap map assigns id " + std::to_string(a) + " or " + std::to_string(b) +
                        " more than once");
    }
    assigned[static_cast<std::size_t>(a)] = true;
    map.to[static_cast<std::size_t>(a)] = b;
    if (a != b) {
      assigned[static_cast<std::size_t>(b)] = true;
      map.to[static_cast<std::size_t>(b)] = a;
    }
  }
  validate_swap_map(map);
  return map;
}

FrameRecord flip_annotations(const FrameRecord& record, const SwapMap& swap_map) {
  validate_swap_map(swap_map);
  FrameRecord out = record;
  const double w = static_cast<double>(record.image_w);

  for (auto& k : out.keypoints) {
    k.keypoint_id = swap_map.to[static_cast<std::size_t>(k.keypoint_id)];
    if (k.visible) k.pos.x = 1.0 - k.pos.x;
  }
  for (auto& d : out.detections) {
    const BBox b = d.bbox;
    d.bbox = BBox{w - b.x2, b.y1, w - b.x1, b.y2};
    if (d.mask) {
      for (auto& v : d.mask->vertices) v.x = w - v.x;
    }
    if (d.patch) {
      // Mirror each 5-pixel row of the 5x5 RGB grid.
      Patch mirrored{};
      for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 5; ++col) {
          for (int ch = 0; ch < 3; ++ch) {
            mirrored[static_cast<std::size_t>(row * 15 + col * 3 + ch)] =
                (*d.patch)[static_cast<std::size_t>(row * 15 + (4 - col) * 3 + ch)];
          }
        }
      }
      d.patch = mirrored;
    }
  }
  return out;
}

}  // namespace pitch2d
