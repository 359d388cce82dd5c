#pragma once

#include <cstdint>
#include <string>

namespace pitch2d::cli {

struct CommonOptions {
  std::string field_config_path;  // empty: built-in 105x68 defaults
  int threads = 1;
};

struct CalibrateOptions {
  std::string frames_path;
  std::string out_path;
  int max_gap = 30;
};

struct ProjectOptions {
  std::string frames_path;
  std::string homographies_path;
  std::string out_path;
  std::string teams_path;  // optional
  std::string anchor = "bottom-center";
  int smooth = 0;
};

struct EvalDetectionsOptions {
  std::string pred_path;
  std::string truth_path;
  std::string out_path;  // optional JSON report
  double iou_threshold = 0.5;
  std::string averaging = "micro";
};

struct EvalKeypointsOptions {
  std::string pred_path;
  std::string truth_path;
  std::string out_path;  // optional JSON report
  int image_w = 0;       // 0: take from the first truth frame
  int image_h = 0;
};

struct TeamsOptions {
  std::string frames_path;
  std::string out_path;
  std::uint64_t seed = 17;
  int restarts = 1;
  int reestimate_every = 0;
};

struct AnalyzeOptions {
  std::string tracks_path;
  std::string out_dir;
  double cell_size_m = 2.0;
  double speed_window_s = 0.5;
};

struct RenderOptions {
  std::string tracks_path;
  std::string out_dir;
  double cell_size_m = 2.0;
  bool heatmaps = false;
};

struct AugmentOptions {
  std::string input_path;
  std::string out_path;
  std::string swap_map = "5:8,6:9,7:10";
};

struct PipelineOptions {
  std::string frames_path;
  std::string out_dir;
  int max_gap = 30;
  std::string anchor = "bottom-center";
  int smooth = 0;
  std::uint64_t seed = 17;
  int restarts = 1;
  int reestimate_every = 0;
  double cell_size_m = 2.0;
  double speed_window_s = 0.5;
};

int cmd_calibrate(const CommonOptions& common, const CalibrateOptions& opt);
int cmd_project(const CommonOptions& common, const ProjectOptions& opt);
int cmd_eval_detections(const CommonOptions& common, const EvalDetectionsOptions& opt);
int cmd_eval_keypoints(const CommonOptions& common, const EvalKeypointsOptions& opt);
int cmd_teams(const CommonOptions& common, const TeamsOptions& opt);
int cmd_analyze(const CommonOptions& common, const AnalyzeOptions& opt);
int cmd_render(const CommonOptions& common, const RenderOptions& opt);
int cmd_augment(const CommonOptions& common, const AugmentOptions& opt);
int cmd_pipeline(const CommonOptions& common, const PipelineOptions& opt);

}  // namespace pitch2d::cli
