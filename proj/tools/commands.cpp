#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <vector>

#include "pitch2d/analytics.hpp"
#include "pitch2d/detection_metrics.hpp"
#include "pitch2d/errors.hpp"
#include "pitch2d/field.hpp"
#include "pitch2d/homography.hpp"
#include "pitch2d/ingest.hpp"
#include "pitch2d/keypoint_metrics.hpp"
#include "pitch2d/render.hpp"
#include "pitch2d/team_clustering.hpp"

namespace fs = std::filesystem;

namespace pitch2d::cli {

namespace {

FieldTemplate resolve_template(const CommonOptions& common) {
  if (common.field_config_path.empty()) {
    return canonical_template(FieldConfig{});
  }
  return canonical_template(load_field_config(common.field_config_path));
}

ProjectionAnchor parse_anchor(const std::string& name) {
  if (name == "bottom-center") return ProjectionAnchor::kBottomCenter;
  if (name == "center") return ProjectionAnchor::kCenter;
  throw ConfigError("anchor must be 'bottom-center' or 'center', got '" + name + "'");
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

std::string frame_file_name(std::int64_t frame_idx) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06lld.svg", static_cast<long long>(frame_idx));
  return buf;
}

// Track samples regrouped per frame for rendering.
std::map<std::int64_t, std::vector<FramePosition>> positions_by_frame(
    std::span<const Track> tracks) {
  std::map<std::int64_t, std::vector<FramePosition>> frames;
  for (const auto& track : tracks) {
    for (const auto& sample : track.samples) {
      frames[sample.frame_idx].push_back({sample.pos, track.team});
    }
  }
  return frames;
}

void render_track_frames(std::span<const Track> tracks,
                         const FieldTemplate& tmpl,
                         const fs::path& out_dir) {
  const auto frames = positions_by_frame(tracks);
  for (const auto& [frame_idx, positions] : frames) {
    write_text_file(out_dir / frame_file_name(frame_idx), render_frame(tmpl, positions));
  }
  std::cout << "rendered " << frames.size() << " frame documents to " << out_dir.string() << "\n";
}

void render_summary_heatmaps(const TeamSummary& summary,
                             const FieldTemplate& tmpl,
                             const fs::path& out_dir) {
  write_text_file(out_dir / "heatmap_team0.svg", render_heatmap(tmpl, summary.team_heatmaps[0]));
  write_text_file(out_dir / "heatmap_team1.svg", render_heatmap(tmpl, summary.team_heatmaps[1]));
  write_text_file(out_dir / "heatmap_combined.svg", render_heatmap(tmpl, summary.combined_heatmap));
}

void write_analysis_files(const TeamSummary& summary, const fs::path& out_dir) {
  write_text_file(out_dir / "stats.json", stats_json(summary));
  write_text_file(out_dir / "stats.txt", format_stats(summary));
  write_text_file(out_dir / "heatmap_team0.json", heatmap_json(summary.team_heatmaps[0]) + "\n");
  write_text_file(out_dir / "heatmap_team1.json", heatmap_json(summary.team_heatmaps[1]) + "\n");
  write_text_file(out_dir / "heatmap_combined.json", heatmap_json(summary.combined_heatmap) + "\n");
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
}

}  // namespace

int cmd_calibrate(const CommonOptions& common, const CalibrateOptions& opt) {
  const FieldTemplate tmpl = resolve_template(common);
  const auto frames = load_frames(opt.frames_path);

  CalibrationPolicy policy;
  policy.max_reuse_frames = opt.max_gap;
  const auto calibrations = calibrate_sequence(frames, tmpl, policy);

  long fit = 0;
  long reused = 0;
  long gap = 0;
  for (const auto& cal : calibrations) {
    switch (cal.status) {
      case CalibrationStatus::kFit:
        ++fit;
        break;
      case CalibrationStatus::kReused:
        ++reused;
        break;
      case CalibrationStatus::kGap:
        ++gap;
        break;
    }
  }

  save_calibrations(opt.out_path, calibrations);
  std::cout << "calibrated " << fit << " frames (" << reused << " reused, " << gap << " gaps) of "
            << calibrations.size() << "\n";
  if (fit + reused == 0) {
    std::cerr << "error: no frame could be calibrated (need >= 4 visible keypoints in a "
                 "non-degenerate configuration)\n";
    return 3;
  }
  return 0;
}

int cmd_project(const CommonOptions& common, const ProjectOptions& opt) {
  const auto frames = load_frames(opt.frames_path);
  const auto calibrations = load_calibrations(opt.homographies_path);

  BuildDiagnostics diag;
  auto tracks = build_tracks(frames, calibrations, parse_anchor(opt.anchor), &diag);

  if (!opt.teams_path.empty()) {
    std::ifstream in(opt.teams_path);
    if (!in) throw ConfigError("cannot open teams file: " + opt.teams_path);
    const TeamAssignment assignment = read_team_assignment(in);
    for (auto& track : tracks) {
      const auto it = assignment.labels.find(track.track_id);
      if (it != assignment.labels.end()) track.team = it->second;
    }
  }
  if (opt.smooth > 1) {
    for (auto& track : tracks) track = smooth_track(track, opt.smooth);
  }

  save_tracks(opt.out_path, tracks);
  long samples = 0;
  for (const auto& t : tracks) samples += static_cast<long>(t.samples.size());
  std::cout << "projected " << samples << " samples over " << tracks.size() << " tracks ("
            << diag.gap_frames << " gap frames, " << diag.dropped_duplicate_timestamps
            << " duplicate timestamps dropped, " << diag.dropped_at_infinity
            << " points at infinity)\n";
  return 0;
}

int cmd_eval_detections(const CommonOptions& common, const EvalDetectionsOptions& opt) {
  const auto preds = load_frames(opt.pred_path);
  const auto truths = load_frames(opt.truth_path);
  const Averaging averaging = opt.averaging == "macro" ? Averaging::kMacro : Averaging::kMicro;
  const DetectionReport report =
      evaluate_sequence(preds, truths, opt.iou_threshold, averaging, common.threads);

  std::cout << format_detection_report(report);
  if (!opt.out_path.empty()) write_text_file(opt.out_path, detection_report_json(report) + "\n");
  return 0;
}

int cmd_eval_keypoints(const CommonOptions& common, const EvalKeypointsOptions& opt) {
  const auto truths = load_frames(opt.truth_path);
  const auto preds = load_predictions(opt.pred_path);
  const KeypointEvalBatch batch = align_batch(truths, preds);

  int image_w = opt.image_w;
  int image_h = opt.image_h;
  if (image_w <= 0 || image_h <= 0) {
    if (truths.empty()) throw ValidationError("no truth frames to take image dimensions from");
    image_w = truths.front().image_w;
    image_h = truths.front().image_h;
  }

  const KeypointReport report = evaluate_keypoints(batch, image_w, image_h);
  std::cout << format_keypoint_report(report);
  if (!opt.out_path.empty()) write_text_file(opt.out_path, keypoint_report_json(report) + "\n");
  return 0;
}

int cmd_teams(const CommonOptions& common, const TeamsOptions& opt) {
  const auto frames = load_frames(opt.frames_path);

  SequenceTeamOptions options;
  options.cluster.seed = opt.seed;
  options.cluster.restarts = opt.restarts;
  options.reestimate_every = opt.reestimate_every;
  const TeamAssignment assignment = assign_teams(frames, options);

  std::ofstream out(opt.out_path);
  if (!out) throw ConfigError("cannot write teams file: " + opt.out_path);
  write_team_assignment(out, assignment);

  std::array<int, 2> counts{0, 0};
  for (const auto& [track, team] : assignment.labels) ++counts[static_cast<std::size_t>(team)];
  std::cout << "assigned " << counts[0] << " tracks to team 0 and " << counts[1]
            << " to team 1\n";
  if (assignment.degenerate) {
    std::cerr << "warning: all colors identical; every track assigned to team 0\n";
  }
  return 0;
}

int cmd_analyze(const CommonOptions& common, const AnalyzeOptions& opt) {
  const FieldTemplate tmpl = resolve_template(common);
  const auto tracks = load_tracks(opt.tracks_path);

  ensure_out_dir(opt.out_dir);
  const TeamSummary summary =
      team_summary(tracks, TeamAssignment{}, tmpl, opt.cell_size_m, opt.speed_window_s);
  write_analysis_files(summary, opt.out_dir);
  std::cout << format_stats(summary);
  return 0;
}

int cmd_render(const CommonOptions& common, const RenderOptions& opt) {
  const FieldTemplate tmpl = resolve_template(common);
  const auto tracks = load_tracks(opt.tracks_path);

  ensure_out_dir(opt.out_dir);
  render_track_frames(tracks, tmpl, opt.out_dir);
  if (opt.heatmaps) {
    const TeamSummary summary = team_summary(tracks, TeamAssignment{}, tmpl, opt.cell_size_m);
    render_summary_heatmaps(summary, tmpl, opt.out_dir);
  }
  return 0;
}

int cmd_augment(const CommonOptions& common, const AugmentOptions& opt) {
  const SwapMap swap_map = parse_swap_map(opt.swap_map);
  const auto frames = load_frames(opt.input_path);

  std::vector<FrameRecord> flipped;
  flipped.reserve(frames.size());
  for (const auto& record : frames) flipped.push_back(flip_annotations(record, swap_map));

  save_frames(opt.out_path, flipped);
  std::cout << "flipped " << flipped.size() << " records\n";
  return 0;
}

int cmd_pipeline(const CommonOptions& common, const PipelineOptions& opt) {
  const FieldTemplate tmpl = resolve_template(common);
  ensure_out_dir(opt.out_dir);
  const fs::path out_dir(opt.out_dir);

  std::string stage = "ingest";
  try {
    const auto frames = load_frames(opt.frames_path);

    stage = "calibrate";
    CalibrationPolicy policy;
    policy.max_reuse_frames = opt.max_gap;
    const auto calibrations = calibrate_sequence(frames, tmpl, policy);
    save_calibrations(out_dir / "homographies.jsonl", calibrations);
    if (std::none_of(calibrations.begin(), calibrations.end(), [](const FrameCalibration& c) {
          return c.status != CalibrationStatus::kGap;
        })) {
      throw NumericalError("no frame could be calibrated");
    }

    stage = "teams";
    std::optional<TeamAssignment> assignment;
    try {
      SequenceTeamOptions team_options;
      team_options.cluster.seed = opt.seed;
      team_options.cluster.restarts = opt.restarts;
      team_options.reestimate_every = opt.reestimate_every;
      assignment = assign_teams(frames, team_options);
      std::ofstream teams_out(out_dir / "teams.json");
      if (!teams_out) throw ConfigError("cannot write teams.json");
      write_team_assignment(teams_out, *assignment);
      if (assignment->degenerate) {
        std::cerr << "warning: teams: all colors identical; every track assigned to team 0\n";
      }
    } catch (const ValidationError& e) {
      std::cerr << "warning: teams: " << e.what() << "; continuing without team labels\n";
    }

    stage = "project";
    BuildDiagnostics diag;
    auto tracks = build_tracks(frames, calibrations, parse_anchor(opt.anchor), &diag);
    if (assignment) {
      for (auto& track : tracks) {
        const auto it = assignment->labels.find(track.track_id);
        if (it != assignment->labels.end()) track.team = it->second;
      }
    }
    if (opt.smooth > 1) {
      for (auto& track : tracks) track = smooth_track(track, opt.smooth);
    }
    save_tracks(out_dir / "tracks.jsonl", tracks);

    stage = "analyze";
    const TeamSummary summary =
        team_summary(tracks, TeamAssignment{}, tmpl, opt.cell_size_m, opt.speed_window_s);
    write_analysis_files(summary, out_dir);

    stage = "render";
    const fs::path renders = out_dir / "renders";
    ensure_out_dir(renders);
    render_track_frames(tracks, tmpl, renders);
    render_summary_heatmaps(summary, tmpl, renders);
  } catch (const Error&) {
    std::cerr << "error: pipeline stage '" << stage << "' failed\n";
    throw;
  }
  return 0;
}

}  // namespace pitch2d::cli
