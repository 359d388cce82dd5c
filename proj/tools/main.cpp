#include <CLI11.hpp>

#include <exception>
#include <functional>
#include <iostream>

#include "pitch2d/errors.hpp"
#include "commands.hpp"

namespace {

using pitch2d::cli::CommonOptions;

// Stable exit codes: 0 success, 1 usage/config, 2 data validation,
// 3 numerical failure.
int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const pitch2d::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pitch2d::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pitch2d::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pitch2d::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void add_field_config_option(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--field-config", common.field_config_path,
                  "Field configuration JSON (defaults to a 105x68 m pitch)")
      ->envname("PITCH2D_FIELD_CONFIG");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field registration and tactical analytics for soccer video detections"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--threads", common.threads, "Worker threads for frame-parallel stages")
      ->capture_default_str();

  pitch2d::cli::CalibrateOptions calibrate_opt;
  auto* calibrate = app.add_subcommand("calibrate", "Fit per-frame image-to-field homographies");
  calibrate->add_option("--frames", calibrate_opt.frames_path, "Frame records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate->add_option("--out", calibrate_opt.out_path, "Output homography file")->required();
  calibrate->add_option("--max-gap", calibrate_opt.max_gap,
                        "Frames a stale homography may be reused for")
      ->capture_default_str();
  add_field_config_option(calibrate, common);

  pitch2d::cli::ProjectOptions project_opt;
  auto* project = app.add_subcommand("project", "Project detections into field coordinates");
  project->add_option("--frames", project_opt.frames_path, "Frame records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  project->add_option("--homographies", project_opt.homographies_path, "Calibration file")
      ->required()
      ->check(CLI::ExistingFile);
  project->add_option("--out", project_opt.out_path, "Output track file")->required();
  project->add_option("--teams", project_opt.teams_path, "Team assignment to stamp onto tracks")
      ->check(CLI::ExistingFile);
  project->add_option("--anchor", project_opt.anchor, "bbox anchor: bottom-center or center")
      ->capture_default_str();
  project->add_option("--smooth", project_opt.smooth, "Moving-average window (samples, 0 = off)")
      ->capture_default_str();

  pitch2d::cli::EvalDetectionsOptions eval_det_opt;
  auto* eval_det = app.add_subcommand("eval-detections", "Score predicted boxes against truth");
  eval_det->add_option("--pred", eval_det_opt.pred_path, "Predicted frame records")
      ->required()
      ->check(CLI::ExistingFile);
  eval_det->add_option("--truth", eval_det_opt.truth_path, "Ground-truth frame records")
      ->required()
      ->check(CLI::ExistingFile);
  eval_det->add_option("--iou-threshold", eval_det_opt.iou_threshold, "Match threshold")
      ->capture_default_str();
  eval_det->add_option("--averaging", eval_det_opt.averaging, "micro or macro")
      ->check(CLI::IsMember({"micro", "macro"}))
      ->capture_default_str();
  eval_det->add_option("--out", eval_det_opt.out_path, "Write the JSON report here");

  pitch2d::cli::EvalKeypointsOptions eval_kp_opt;
  auto* eval_kp = app.add_subcommand("eval-keypoints", "Score keypoint predictions against truth");
  eval_kp->add_option("--pred", eval_kp_opt.pred_path, "Keypoint predictions (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval_kp->add_option("--truth", eval_kp_opt.truth_path, "Ground-truth frame records")
      ->required()
      ->check(CLI::ExistingFile);
  eval_kp->add_option("--image-width", eval_kp_opt.image_w,
                      "Pixel conversion width (0: from truth frames)")
      ->capture_default_str();
  eval_kp->add_option("--image-height", eval_kp_opt.image_h,
                      "Pixel conversion height (0: from truth frames)")
      ->capture_default_str();
  eval_kp->add_option("--out", eval_kp_opt.out_path, "Write the JSON report here");

  pitch2d::cli::TeamsOptions teams_opt;
  auto* teams = app.add_subcommand("teams", "Cluster tracks into two teams by jersey color");
  teams->add_option("--frames", teams_opt.frames_path, "Frame records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  teams->add_option("--out", teams_opt.out_path, "Output team assignment JSON")->required();
  teams->add_option("--seed", teams_opt.seed, "Seed for randomized restarts")->capture_default_str();
  teams->add_option("--restarts", teams_opt.restarts, "Clustering restarts (1 = deterministic)")
      ->capture_default_str();
  teams->add_option("--reestimate-every", teams_opt.reestimate_every,
                    "Also fit on every Nth frame (0 = first colored frame only)")
      ->capture_default_str();

  pitch2d::cli::AnalyzeOptions analyze_opt;
  auto* analyze = app.add_subcommand("analyze", "Compute per-player and per-team statistics");
  analyze->add_option("--tracks", analyze_opt.tracks_path, "Track file (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--out-dir", analyze_opt.out_dir, "Directory for stats and heatmaps")
      ->required();
  analyze->add_option("--cell-size", analyze_opt.cell_size_m, "Heatmap cell size (m)")
      ->capture_default_str();
  analyze->add_option("--speed-window", analyze_opt.speed_window_s, "Speed window (s)")
      ->capture_default_str();
  add_field_config_option(analyze, common);

  pitch2d::cli::RenderOptions render_opt;
  auto* render = app.add_subcommand("render", "Render tracks as 2D field documents");
  render->add_option("--tracks", render_opt.tracks_path, "Track file (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--out-dir", render_opt.out_dir, "Directory for SVG documents")->required();
  render->add_flag("--heatmaps", render_opt.heatmaps, "Also render per-team and combined heatmaps");
  render->add_option("--cell-size", render_opt.cell_size_m, "Heatmap cell size (m)")
      ->capture_default_str();
  add_field_config_option(render, common);

  pitch2d::cli::AugmentOptions augment_opt;
  auto* augment = app.add_subcommand("augment", "Horizontally flip an annotation dataset");
  augment->add_option("--input", augment_opt.input_path, "Frame records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  augment->add_option("--out", augment_opt.out_path, "Output records (JSONL)")->required();
  augment->add_option("--swap-map", augment_opt.swap_map, "Left/right id pairs, e.g. 5:8,6:9")
      ->capture_default_str();

  pitch2d::cli::PipelineOptions pipeline_opt;
  auto* pipeline = app.add_subcommand(
      "pipeline", "calibrate -> teams -> project -> analyze -> render in one run");
  pipeline->add_option("--frames", pipeline_opt.frames_path, "Frame records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  pipeline->add_option("--out-dir", pipeline_opt.out_dir, "Directory for all artifacts")
      ->required();
  pipeline->add_option("--max-gap", pipeline_opt.max_gap, "Homography reuse budget (frames)")
      ->capture_default_str();
  pipeline->add_option("--anchor", pipeline_opt.anchor, "bbox anchor: bottom-center or center")
      ->capture_default_str();
  pipeline->add_option("--smooth", pipeline_opt.smooth, "Moving-average window (samples, 0 = off)")
      ->capture_default_str();
  pipeline->add_option("--seed", pipeline_opt.seed, "Clustering seed")->capture_default_str();
  pipeline->add_option("--restarts", pipeline_opt.restarts, "Clustering restarts")
      ->capture_default_str();
  pipeline->add_option("--reestimate-every", pipeline_opt.reestimate_every,
                       "Refit team centroids every Nth frame (0 = off)")
      ->capture_default_str();
  pipeline->add_option("--cell-size", pipeline_opt.cell_size_m, "Heatmap cell size (m)")
      ->capture_default_str();
  pipeline->add_option("--speed-window", pipeline_opt.speed_window_s, "Speed window (s)")
      ->capture_default_str();
  add_field_config_option(pipeline, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (common.threads < 1) {
    std::cerr << "error: --threads must be >= 1\n";
    return 1;
  }

  using pitch2d::cli::cmd_analyze;
  using pitch2d::cli::cmd_augment;
  using pitch2d::cli::cmd_calibrate;
  using pitch2d::cli::cmd_eval_detections;
  using pitch2d::cli::cmd_eval_keypoints;
  using pitch2d::cli::cmd_pipeline;
  using pitch2d::cli::cmd_project;
  using pitch2d::cli::cmd_render;
  using pitch2d::cli::cmd_teams;

  if (calibrate->parsed()) return run_guarded([&] { return cmd_calibrate(common, calibrate_opt); });
  if (project->parsed()) return run_guarded([&] { return cmd_project(common, project_opt); });
  if (eval_det->parsed()) {
    return run_guarded([&] { return cmd_eval_detections(common, eval_det_opt); });
  }
  if (eval_kp->parsed()) return run_guarded([&] { return cmd_eval_keypoints(common, eval_kp_opt); });
  if (teams->parsed()) return run_guarded([&] { return cmd_teams(common, teams_opt); });
  if (analyze->parsed()) return run_guarded([&] { return cmd_analyze(common, analyze_opt); });
  if (render->parsed()) return run_guarded([&] { return cmd_render(common, render_opt); });
  if (augment->parsed()) return run_guarded([&] { return cmd_augment(common, augment_opt); });
  if (pipeline->parsed()) return run_guarded([&] { return cmd_pipeline(common, pipeline_opt); });

  std::cerr << app.help();
  return 1;
}
