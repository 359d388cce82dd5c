#include "pitch2d/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pitch2d/errors.hpp"
#include "pitch2d/ingest.hpp"
#include "json_util.hpp"

namespace pitch2d {

namespace {

PixelPoint anchor_point(const BBox& bbox, ProjectionAnchor anchor) {
  return anchor == ProjectionAnchor::kBottomCenter ? bbox_ground_point(bbox) : bbox_center(bbox);
}

struct TrackAccumulator {
  int players = 0;
  double distance = 0.0;
  double duration = 0.0;
};

TeamStats finish(const TrackAccumulator& acc) {
  TeamStats stats;
  stats.players = acc.players;
  stats.total_distance_m = acc.distance;
  stats.mean_speed_mps = acc.duration > 0.0 ? acc.distance / acc.duration : 0.0;
  return stats;
}

detail::Json stats_to_json(const TeamStats& stats) {
  detail::Json j;
  j["players"] = stats.players;
  j["total_distance_m"] = stats.total_distance_m;
  j["mean_speed_mps"] = stats.mean_speed_mps;
  return j;
}

}  // namespace

std::vector<Track> build_tracks(std::span<const FrameRecord> frames,
                                std::span<const FrameCalibration> calibrations,
                                ProjectionAnchor anchor,
                                BuildDiagnostics* diagnostics) {
  std::map<std::int64_t, const FrameCalibration*> by_idx;
  for (const auto& cal : calibrations) by_idx[cal.frame_idx] = &cal;

  BuildDiagnostics local;
  std::map<int, Track> tracks;
  for (const auto& frame : frames) {
    const auto it = by_idx.find(frame.frame_idx);
    if (it == by_idx.end() || !it->second->h) {
      ++local.gap_frames;
      continue;
    }
    const Homography& h = *it->second->h;
    for (const auto& detection : frame.detections) {
      const auto world = try_apply(h, anchor_point(detection.bbox, anchor));
      if (!world) {
        ++local.dropped_at_infinity;
        continue;
      }
      Track& track = tracks.try_emplace(detection.track_id, Track{detection.track_id, {}, {}}).first->second;
      if (!track.samples.empty() && frame.timestamp_s <= track.samples.back().timestamp_s) {
        ++local.dropped_duplicate_timestamps;
        continue;
      }
      track.samples.push_back({frame.frame_idx, frame.timestamp_s, *world});
    }
  }

  if (diagnostics != nullptr) *diagnostics = local;
  std::vector<Track> result;
  result.reserve(tracks.size());
  for (auto& [id, track] : tracks) result.push_back(std::move(track));
  return result;
}

double distance_covered(const Track& track) {
  if (track.samples.empty()) throw ValidationError("track has no samples");
  double total = 0.0;
  for (std::size_t i = 1; i < track.samples.size(); ++i) {
    total += distance(track.samples[i - 1].pos, track.samples[i].pos);
  }
  return total;
}

std::vector<SpeedSample> speed_series(const Track& track, double window_s) {
  if (track.samples.size() < 2) throw ValidationError("speed needs at least 2 samples");
  if (!(window_s > 0.0)) throw ConfigError("speed window must be positive");

  const auto& samples = track.samples;
  const std::size_t n = samples.size();
  std::vector<double> path(n, 0.0);  // cumulative path length
  for (std::size_t i = 1; i < n; ++i) {
    path[i] = path[i - 1] + distance(samples[i - 1].pos, samples[i].pos);
  }

  const double half = window_s / 2.0;
  std::vector<SpeedSample> result(n);
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = samples[i].timestamp_s;
    while (samples[lo].timestamp_s < t - half) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < n && samples[hi + 1].timestamp_s <= t + half) ++hi;

    SpeedSample& s = result[i];
    s.timestamp_s = t;
    if (hi > lo) {
      const double elapsed = samples[hi].timestamp_s - samples[lo].timestamp_s;
      s.speed_mps = (path[hi] - path[lo]) / elapsed;
      s.valid = true;
    }
  }
  return result;
}

Track smooth_track(const Track& track, int window_samples) {
  if (window_samples <= 1) return track;
  Track out = track;
  const auto n = static_cast<std::ptrdiff_t>(track.samples.size());
  const std::ptrdiff_t halfw = window_samples / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t m = std::min({halfw, i, n - 1 - i});
    WorldPoint sum{0.0, 0.0};
    for (std::ptrdiff_t k = i - m; k <= i + m; ++k) {
      sum.x += track.samples[static_cast<std::size_t>(k)].pos.x;
      sum.y += track.samples[static_cast<std::size_t>(k)].pos.y;
    }
    const auto count = static_cast<double>(2 * m + 1);
    out.samples[static_cast<std::size_t>(i)].pos = {sum.x / count, sum.y / count};
  }
  return out;
}

HeatmapGrid heatmap(std::span<const Track> tracks,
                    const FieldTemplate& field,
                    double cell_size_m,
                    bool normalized) {
  if (!(cell_size_m > 0.0)) throw ConfigError("heatmap cell size must be positive");
  const double length = field.config.length_m;
  const double width = field.config.width_m;

  HeatmapGrid grid;
  grid.cell_size_m = cell_size_m;
  grid.nx = static_cast<int>(std::ceil(length / cell_size_m - 1e-12));
  grid.ny = static_cast<int>(std::ceil(width / cell_size_m - 1e-12));
  grid.nx = std::max(grid.nx, 1);
  grid.ny = std::max(grid.ny, 1);
  grid.counts.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);

  for (const auto& track : tracks) {
    for (const auto& sample : track.samples) {
      const bool in_field = sample.pos.x >= 0.0 && sample.pos.x <= length && sample.pos.y >= 0.0 &&
                            sample.pos.y <= width;
      if (!in_field) ++grid.clamped_samples;
      const int ix = std::clamp(static_cast<int>(std::floor(sample.pos.x / cell_size_m)), 0,
                                grid.nx - 1);
      const int iy = std::clamp(static_cast<int>(std::floor(sample.pos.y / cell_size_m)), 0,
                                grid.ny - 1);
      grid.counts[static_cast<std::size_t>(iy) * grid.nx + ix] += 1.0;
      ++grid.total_samples;
    }
  }

  if (normalized && grid.total_samples > 0) {
    for (auto& c : grid.counts) c /= static_cast<double>(grid.total_samples);
    grid.normalized = true;
  } else {
    grid.normalized = normalized;
  }
  return grid;
}

TeamSummary team_summary(std::span<const Track> tracks,
                         const TeamAssignment& assignment,
                         const FieldTemplate& field,
                         double cell_size_m,
                         double speed_window_s) {
  TeamSummary summary;
  std::array<TrackAccumulator, 2> team_acc;
  TrackAccumulator unlabeled_acc;
  std::array<std::vector<Track>, 2> team_tracks;

  for (const auto& track : tracks) {
    std::optional<int> team;
    const auto it = assignment.labels.find(track.track_id);
    if (it != assignment.labels.end()) {
      team = it->second;
    } else {
      team = track.team;
    }

    PlayerStats stats;
    stats.track_id = track.track_id;
    stats.team = team;
    stats.samples = static_cast<long>(track.samples.size());
    if (!track.samples.empty()) {
      stats.duration_s = track.samples.back().timestamp_s - track.samples.front().timestamp_s;
      stats.distance_m = distance_covered(track);
      stats.mean_speed_mps = stats.duration_s > 0.0 ? stats.distance_m / stats.duration_s : 0.0;
    }
    if (track.samples.size() >= 2) {
      for (const auto& s : speed_series(track, speed_window_s)) {
        if (s.valid) stats.max_speed_mps = std::max(stats.max_speed_mps, s.speed_mps);
      }
    }
    summary.players.push_back(stats);

    TrackAccumulator& acc = team ? team_acc[static_cast<std::size_t>(*team)] : unlabeled_acc;
    ++acc.players;
    acc.distance += stats.distance_m;
    acc.duration += stats.duration_s;
    if (team) team_tracks[static_cast<std::size_t>(*team)].push_back(track);
  }

  summary.teams[0] = finish(team_acc[0]);
  summary.teams[1] = finish(team_acc[1]);
  summary.unlabeled = finish(unlabeled_acc);
  summary.team_heatmaps[0] = heatmap(team_tracks[0], field, cell_size_m);
  summary.team_heatmaps[1] = heatmap(team_tracks[1], field, cell_size_m);
  summary.combined_heatmap = heatmap(tracks, field, cell_size_m);
  return summary;
}

void write_tracks(std::ostream& out, std::span<const Track> tracks) {
  for (const auto& track : tracks) {
    for (const auto& sample : track.samples) {
      detail::Json j;
      j["track_id"] = track.track_id;
      j["frame_idx"] = sample.frame_idx;
      j["timestamp_s"] = sample.timestamp_s;
      j["x_m"] = sample.pos.x;
      j["y_m"] = sample.pos.y;
      if (track.team) {
        j["team"] = *track.team;
      } else {
        j["team"] = nullptr;
      }
      out << j.dump() << '\n';
    }
  }
}

std::vector<Track> read_tracks(std::istream& in) {
  std::map<int, Track> tracks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const detail::Json j = detail::parse_document(line, line_no);
    const int track_id = static_cast<int>(detail::require_integer(j, "track_id", line_no));

    Track& track = tracks.try_emplace(track_id, Track{track_id, {}, {}}).first->second;
    TrackSample sample;
    sample.frame_idx = detail::require_integer(j, "frame_idx", line_no);
    sample.timestamp_s = detail::require_number(j, "timestamp_s", line_no);
    sample.pos.x = detail::require_number(j, "x_m", line_no);
    sample.pos.y = detail::require_number(j, "y_m", line_no);
    if (!track.samples.empty() && sample.timestamp_s <= track.samples.back().timestamp_s) {
      throw ValidationError("track " + std::to_string(track_id) +
                            " timestamps must strictly increase (line " + std::to_string(line_no) +
                            ")");
    }
    if (j.contains("team") && !j.at("team").is_null()) {
      const int team = static_cast<int>(j.at("team").get<std::int64_t>());
      if (team != 0 && team != 1) {
        throw ValidationError("team labels must be 0 or 1 (line " + std::to_string(line_no) + ")");
      }
      if (track.team && *track.team != team) {
        throw ValidationError("track " + std::to_string(track_id) + " has conflicting team labels");
      }
      track.team = team;
    }
    track.samples.push_back(sample);
  }

  std::vector<Track> result;
  result.reserve(tracks.size());
  for (auto& [id, track] : tracks) result.push_back(std::move(track));
  return result;
}

void save_tracks(const std::filesystem::path& path, std::span<const Track> tracks) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write tracks: " + path.string());
  write_tracks(out, tracks);
}

std::vector<Track> load_tracks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tracks: " + path.string());
  return read_tracks(in);
}

std::string heatmap_json(const HeatmapGrid& grid) {
  detail::Json j;
  j["nx"] = grid.nx;
  j["ny"] = grid.ny;
  j["cell_size_m"] = grid.cell_size_m;
  j["normalized"] = grid.normalized;
  j["total_samples"] = grid.total_samples;
  j["clamped_samples"] = grid.clamped_samples;
  j["counts"] = grid.counts;
  return j.dump();
}

HeatmapGrid parse_heatmap_json(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const detail::Json j = detail::parse_document(buffer.str());
  HeatmapGrid grid;
  grid.nx = static_cast<int>(detail::require_integer(j, "nx"));
  grid.ny = static_cast<int>(detail::require_integer(j, "ny"));
  grid.cell_size_m = detail::require_number(j, "cell_size_m");
  grid.normalized = detail::require(j, "normalized").get<bool>();
  grid.total_samples = detail::require_integer(j, "total_samples");
  grid.clamped_samples = detail::require_integer(j, "clamped_samples");
  grid.counts = detail::require(j, "counts").get<std::vector<double>>();
  if (grid.counts.size() != static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny)) {
    throw ValidationError("heatmap counts length does not match nx * ny");
  }
  return grid;
}

std::string stats_json(const TeamSummary& summary) {
  detail::Json j;
  j["players"] = detail::Json::array();
  for (const auto& p : summary.players) {
    detail::Json pj;
    pj["track_id"] = p.track_id;
    if (p.team) {
      pj["team"] = *p.team;
    } else {
      pj["team"] = nullptr;
    }
    pj["samples"] = p.samples;
    pj["duration_s"] = p.duration_s;
    pj["distance_m"] = p.distance_m;
    pj["mean_speed_mps"] = p.mean_speed_mps;
    pj["max_speed_mps"] = p.max_speed_mps;
    j["players"].push_back(std::move(pj));
  }
  j["teams"] = {stats_to_json(summary.teams[0]), stats_to_json(summary.teams[1])};
  j["unlabeled"] = stats_to_json(summary.unlabeled);
  return j.dump(2);
}

std::string format_stats(const TeamSummary& summary) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "track  team  samples  duration_s  distance_m  mean_speed_mps  max_speed_mps\n";
  for (const auto& p : summary.players) {
    out.width(5);
    out << p.track_id << "  ";
    out.width(4);
    if (p.team) {
      out << *p.team;
    } else {
      out << "-";
    }
    out << "  ";
    out.width(7);
    out << p.samples << "  ";
    out.width(10);
    out << p.duration_s << "  ";
    out.width(10);
    out << p.distance_m << "  ";
    out.width(14);
    out << p.mean_speed_mps << "  ";
    out.width(13);
    out << p.max_speed_mps << "\n";
  }
  out << "\nteam  players  total_distance_m  mean_speed_mps\n";
  for (int team = 0; team < 2; ++team) {
    const TeamStats& t = summary.teams[static_cast<std::size_t>(team)];
    out << "   " << team << "  ";
    out.width(7);
    out << t.players << "  ";
    out.width(16);
    out << t.total_distance_m << "  ";
    out.width(14);
    out << t.mean_speed_mps << "\n";
  }
  if (summary.unlabeled.players > 0) {
    out << "   -  ";
    out.width(7);
    out << summary.unlabeled.players << "  ";
    out.width(16);
    out << summary.unlabeled.total_distance_m << "  ";
    out.width(14);
    out << summary.unlabeled.mean_speed_mps << "\n";
  }
  return out.str();
}

}  // namespace pitch2d
