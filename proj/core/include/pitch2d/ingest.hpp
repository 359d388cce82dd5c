#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pitch2d/records.hpp"

namespace pitch2d {

// Involutive keypoint-id relabeling applied on horizontal flips.
struct SwapMap {
  std::array<int, 12> to{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
};

// Mirror pairs of the canonical keypoint layout.
[[nodiscard]] SwapMap default_swap_map();

// Parses "a:b,c:d,..." pair syntax; unlisted ids map to themselves.
// Throws ConfigError on bad syntax, out-of-range ids, or a map that is
// not an involution.
[[nodiscard]] SwapMap parse_swap_map(const std::string& spec);

void validate_swap_map(const SwapMap& map);

// Validates one record against the documented invariants (positive image
// dims, bbox ordering, keypoint sentinel/visibility consistency, distinct
// keypoint and track ids, patch/channel ranges). Throws ValidationError
// naming the offending field.
void validate_record(const FrameRecord& record);

// --- line-delimited frame-record streams (one JSON object per line) ---

// Parses a whole stream; enforces per-record invariants and non-decreasing
// timestamps across the stream. ParseError carries the 1-based line number.
[[nodiscard]] std::vector<FrameRecord> parse_frames(std::istream& in);
[[nodiscard]] std::vector<FrameRecord> load_frames(const std::filesystem::path& path);

// Parses a single line (blank lines are the caller's concern).
[[nodiscard]] FrameRecord parse_frame_line(const std::string& line, std::size_t line_no = 0);

[[nodiscard]] std::string serialize_frame(const FrameRecord& record);
void write_frames(std::ostream& out, std::span<const FrameRecord> records);
void save_frames(const std::filesystem::path& path, std::span<const FrameRecord> records);

// --- annotation-space geometry ---

// Minimum axis-aligned rectangle over the mask vertices. Degenerate
// extents (zero width or height) are inflated to 0.5 px so the bbox
// invariants hold. Throws ValidationError on an empty vertex list.
[[nodiscard]] BBox mask_to_bbox(const MaskPolygon& mask);

[[nodiscard]] PixelPoint bbox_center(const BBox& bbox);

// Bottom-center of the box; the ground-contact anchor used when projecting
// players onto the field plane (image y grows downward).
[[nodiscard]] PixelPoint bbox_ground_point(const BBox& bbox);

// Horizontal flip of a whole record: visible keypoints (x,y) -> (1-x,y)
// with ids remapped through swap_map, sentinels untouched, detection boxes
// and mask vertices mirrored about the image's vertical axis, patch rows
// reversed. Exactly involutive for coordinates representable as binary
// fractions; see docs/formats.md for the rounding caveat.
[[nodiscard]] FrameRecord flip_annotations(const FrameRecord& record, const SwapMap& swap_map);

}  // namespace pitch2d
