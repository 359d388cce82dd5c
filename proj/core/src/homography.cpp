#include "pitch2d/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "pitch2d/errors.hpp"
#include "json_util.hpp"

namespace pitch2d {

namespace {

constexpr double kInfinityTol = 1e-9;
constexpr double kSingularTol = 1e-12;
constexpr double kRankTol = 1e-8;

using Mat3 = Eigen::Matrix3d;

Mat3 to_eigen(const Homography& h) {
  Mat3 m;
  m << h.h[0], h.h[1], h.h[2], h.h[3], h.h[4], h.h[5], h.h[6], h.h[7], h.h[8];
  return m;
}

Homography from_eigen(const Mat3& m) {
  Homography h;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) h.at(r, c) = m(r, c);
  }
  return h;
}

// Isotropic conditioning transform: centroid to the origin, mean distance
// scaled to sqrt(2). Coincident point sets keep unit scale; the rank check
// rejects them later.
Mat3 conditioning_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());

  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());

  const double scale = mean_dist > kSingularTol ? std::numbers::sqrt2 / mean_dist : 1.0;
  Mat3 t;
  t << scale, 0.0, -scale * centroid.x(), 0.0, scale, -scale * centroid.y(), 0.0, 0.0, 1.0;
  return t;
}

}  // namespace

Homography normalize(const Homography& h) {
  Homography out = h;
  if (std::abs(out.h[8]) > kInfinityTol) {
    const double s = out.h[8];
    for (auto& e : out.h) e /= s;
    return out;
  }
  double frob = 0.0;
  for (const auto e : out.h) frob += e * e;
  frob = std::sqrt(frob);
  if (frob <= 0.0 || !std::isfinite(frob)) {
    throw NumericalError("cannot normalize an all-zero homography");
  }
  double lead = 0.0;
  for (const auto e : out.h) {
    if (e != 0.0) {
      lead = e;
      break;
    }
  }
  const double s = lead < 0.0 ? -frob : frob;
  for (auto& e : out.h) e /= s;
  return out;
}

double determinant(const Homography& h) {
  return to_eigen(h).determinant();
}

Homography estimate_dlt(std::span<const Correspondence> correspondences) {
  const std::size_t n = correspondences.size();
  if (n < 4) {
    throw NumericalError("insufficient correspondences: need at least 4, got " + std::to_string(n));
  }
  for (const auto& c : correspondences) {
    if (!finite(c.image) || !finite(c.world)) {
      throw ValidationError("correspondences must be finite");
    }
  }

  std::vector<Eigen::Vector2d> image_pts;
  std::vector<Eigen::Vector2d> world_pts;
  image_pts.reserve(n);
  world_pts.reserve(n);
  for (const auto& c : correspondences) {
    image_pts.emplace_back(c.image.x, c.image.y);
    world_pts.emplace_back(c.world.x, c.world.y);
  }

  const Mat3 t_image = conditioning_transform(image_pts);
  const Mat3 t_world = conditioning_transform(world_pts);

  Eigen::MatrixXd a(2 * static_cast<Eigen::Index>(n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d src = t_image * Eigen::Vector3d(image_pts[i].x(), image_pts[i].y(), 1.0);
    const Eigen::Vector3d dst = t_world * Eigen::Vector3d(world_pts[i].x(), world_pts[i].y(), 1.0);
    const double x = src.x() / src.z();
    const double y = src.y() / src.z();
    const double u = dst.x() / dst.z();
    const double v = dst.y() / dst.z();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u;
    a.row(r + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v;
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Uniqueness of the null vector needs rank 8: the eighth singular value
  // of the (padded) spectrum must be well away from zero.
  const double largest = sv(0);
  const double eighth = sv.size() >= 8 ? sv(7) : 0.0;
  if (!(largest > 0.0) || eighth <= kRankTol * largest) {
    throw NumericalError("degenerate configuration: correspondences are collinear or coincident");
  }

  const Eigen::VectorXd hvec = svd.matrixV().col(8);
  Mat3 hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);
  const Mat3 h = t_world.inverse() * hn * t_image;

  const Homography result = normalize(from_eigen(h));
  if (std::abs(determinant(result)) <= kSingularTol) {
    throw NumericalError("homography estimate is singular");
  }
  return result;
}

std::optional<WorldPoint> try_apply(const Homography& h, const PixelPoint& p) {
  const double w = h.h[6] * p.x + h.h[7] * p.y + h.h[8];
  if (std::abs(w) <= kInfinityTol) return std::nullopt;
  return WorldPoint{(h.h[0] * p.x + h.h[1] * p.y + h.h[2]) / w,
                    (h.h[3] * p.x + h.h[4] * p.y + h.h[5]) / w};
}

WorldPoint apply(const Homography& h, const PixelPoint& p) {
  const auto mapped = try_apply(h, p);
  if (!mapped) {
    throw NumericalError("point maps to infinity under the homography");
  }
  return *mapped;
}

Homography invert(const Homography& h) {
  const Mat3 m = to_eigen(h);
  if (std::abs(m.determinant()) <= kSingularTol) {
    throw NumericalError("homography is singular and cannot be inverted");
  }
  return normalize(from_eigen(Mat3(m.inverse())));
}

double reprojection_error(const Homography& h, std::span<const Correspondence> correspondences) {
  if (correspondences.empty()) {
    throw ValidationError("reprojection error needs at least one correspondence");
  }
  double sum = 0.0;
  for (const auto& c : correspondences) {
    sum += distance(apply(h, c.image), c.world);
  }
  return sum / static_cast<double>(correspondences.size());
}

double keypoint_world_mae(const Homography& h,
                          std::span<const KeypointObservation> observations,
                          const FieldTemplate& tmpl,
                          int image_w,
                          int image_h) {
  if (image_w <= 0 || image_h <= 0) throw ConfigError("image dimensions must be positive");
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& obs : observations) {
    if (!obs.visible) continue;
    const WorldPoint expected = keypoint_world_position(tmpl, obs.keypoint_id);
    const PixelPoint pixel{obs.pos.x * image_w, obs.pos.y * image_h};
    sum += distance(apply(h, pixel), expected);
    ++used;
  }
  if (used == 0) throw ValidationError("no visible keypoints to evaluate");
  return sum / static_cast<double>(used);
}

ProjectionErrorResult projection_error_between(const Homography& a,
                                               const Homography& b,
                                               std::span<const PixelPoint> points) {
  if (points.empty()) throw ValidationError("projection error needs at least one point");
  ProjectionErrorResult result;
  double sum = 0.0;
  for (const auto& p : points) {
    const auto pa = try_apply(a, p);
    const auto pb = try_apply(b, p);
    if (!pa || !pb) {
      ++result.points_excluded;
      continue;
    }
    sum += distance(*pa, *pb);
    ++result.points_used;
  }
  if (result.points_used == 0) {
    throw ValidationError("every point maps to infinity under one of the homographies");
  }
  result.mean_m = sum / static_cast<double>(result.points_used);
  return result;
}

std::string to_string(CalibrationStatus status) {
  switch (status) {
    case CalibrationStatus::kFit:
      return "fit";
    case CalibrationStatus::kReused:
      return "reused";
    case CalibrationStatus::kGap:
      return "gap";
  }
  return "gap";
}

std::vector<FrameCalibration> calibrate_sequence(std::span<const FrameRecord> frames,
                                                 const FieldTemplate& tmpl,
                                                 const CalibrationPolicy& policy) {
  if (policy.min_keypoints < 4) {
    throw ConfigError("calibration needs at least 4 keypoints per fit");
  }
  if (policy.max_reuse_frames < 0) {
    throw ConfigError("max_reuse_frames must be >= 0");
  }

  std::vector<FrameCalibration> result;
  result.reserve(frames.size());

  std::optional<Homography> last_valid;
  long frames_since_fit = std::numeric_limits<long>::max();

  for (const auto& frame : frames) {
    std::vector<Correspondence> correspondences;
    for (const auto& obs : frame.keypoints) {
      if (!obs.visible) continue;
      correspondences.push_back(
          {PixelPoint{obs.pos.x * frame.image_w, obs.pos.y * frame.image_h},
           keypoint_world_position(tmpl, obs.keypoint_id)});
    }

    std::optional<Homography> fitted;
    if (correspondences.size() >= static_cast<std::size_t>(policy.min_keypoints)) {
      try {
        fitted = estimate_dlt(correspondences);
      } catch (const NumericalError&) {
        // Degenerate frame; fall through to the reuse/gap policy.
      }
    }

    FrameCalibration cal;
    cal.frame_idx = frame.frame_idx;
    if (fitted) {
      frames_since_fit = 0;
      last_valid = fitted;
      cal.status = CalibrationStatus::kFit;
      cal.h = fitted;
    } else {
      if (frames_since_fit < std::numeric_limits<long>::max()) ++frames_since_fit;
      if (last_valid && frames_since_fit <= policy.max_reuse_frames) {
        cal.status = CalibrationStatus::kReused;
        cal.h = last_valid;
      } else {
        cal.status = CalibrationStatus::kGap;
      }
    }

    if (cal.h && !correspondences.empty()) {
      try {
        cal.reprojection_error_m = reprojection_error(*cal.h, correspondences);
      } catch (const NumericalError&) {
        cal.reprojection_error_m = std::nullopt;
      }
    }
    result.push_back(std::move(cal));
  }
  return result;
}

void write_calibrations(std::ostream& out, std::span<const FrameCalibration> calibrations) {
  for (const auto& cal : calibrations) {
    detail::Json j;
    j["frame_idx"] = cal.frame_idx;
    j["status"] = to_string(cal.status);
    if (cal.h) {
      detail::Json hj = detail::Json::array();
      for (const auto e : cal.h->h) hj.push_back(e);
      j["h"] = std::move(hj);
    } else {
      j["h"] = nullptr;
    }
    if (cal.reprojection_error_m) {
      j["reprojection_error_m"] = *cal.reprojection_error_m;
    } else {
      j["reprojection_error_m"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

std::vector<FrameCalibration> read_calibrations(std::istream& in) {
  std::vector<FrameCalibration> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const detail::Json j = detail::parse_document(line, line_no);

    FrameCalibration cal;
    cal.frame_idx = detail::require_integer(j, "frame_idx", line_no);
    const std::string status = detail::require(j, "status", line_no).get<std::string>();
    if (status == "fit") {
      cal.status = CalibrationStatus::kFit;
    } else if (status == "reused") {
      cal.status = CalibrationStatus::kReused;
    } else if (status == "gap") {
      cal.status = CalibrationStatus::kGap;
    } else {
      throw ParseError("unknown calibration status '" + status + "'", line_no);
    }

    if (j.contains("h") && !j.at("h").is_null()) {
      const auto& hj = j.at("h");
      if (!hj.is_array() || hj.size() != 9) {
        throw ParseError("field 'h' must be an array of 9 numbers", line_no);
      }
      Homography h;
      for (std::size_t i = 0; i < 9; ++i) h.h[i] = hj[i].get<double>();
      cal.h = h;
    } else if (cal.status != CalibrationStatus::kGap) {
      throw ParseError("calibrated frame is missing its homography", line_no);
    }
    if (j.contains("reprojection_error_m") && !j.at("reprojection_error_m").is_null()) {
      cal.reprojection_error_m = j.at("reprojection_error_m").get<double>();
    }
    result.push_back(std::move(cal));
  }
  return result;
}

void save_calibrations(const std::filesystem::path& path,
                       std::span<const FrameCalibration> calibrations) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write calibrations: " + path.string());
  write_calibrations(out, calibrations);
}

std::vector<FrameCalibration> load_calibrations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open calibrations: " + path.string());
  return read_calibrations(in);
}

}  // namespace pitch2d
