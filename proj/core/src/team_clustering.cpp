#include "pitch2d/team_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "pitch2d/errors.hpp"
#include "json_util.hpp"

namespace pitch2d {

namespace {

std::tuple<double, double, double> color_key(const ColorVec& c) {
  return {c.r, c.g, c.b};
}

struct KMeansFit {
  std::array<ColorVec, 2> centroids{};
  std::vector<int> labels;  // cluster membership per input position
  double inertia = 0.0;
};

struct ClusterSums {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  int count = 0;

  void add(const ColorVec& c) {
    r += c.r;
    g += c.g;
    b += c.b;
    ++count;
  }
  void remove(const ColorVec& c) {
    r -= c.r;
    g -= c.g;
    b -= c.b;
    --count;
  }
  [[nodiscard]] ColorVec mean() const {
    return ColorVec{r / count, g / count, b / count};
  }
};

double partition_inertia(std::span<const ColorVec> colors, std::span<const int> labels,
                         const std::array<ColorVec, 2>& means) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    inertia += squared_distance(colors[i], means[static_cast<std::size_t>(labels[i])]);
  }
  return inertia;
}

std::vector<int> nearest_labels(std::span<const ColorVec> colors,
                                const std::array<ColorVec, 2>& centroids) {
  std::vector<int> labels(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    labels[i] =
        squared_distance(colors[i], centroids[0]) <= squared_distance(colors[i], centroids[1]) ? 0
                                                                                               : 1;
  }
  return labels;
}

// One Lloyd run from the given seeds, then single-move refinement: a Lloyd
// fixed point can still leave a profitable one-point transfer (the moved
// point drags both means with it), and the output contract promises none
// remains.
KMeansFit lloyd(std::span<const ColorVec> colors,
                std::array<ColorVec, 2> centroids,
                const ClusterOptions& options) {
  std::vector<int> labels;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    labels = nearest_labels(colors, centroids);

    std::array<ClusterSums, 2> sums;
    for (std::size_t i = 0; i < colors.size(); ++i) {
      sums[static_cast<std::size_t>(labels[i])].add(colors[i]);
    }
    // An emptied cluster restarts from the point farthest from the other
    // centroid.
    for (int k = 0; k < 2; ++k) {
      if (sums[static_cast<std::size_t>(k)].count > 0) continue;
      const ColorVec& other = centroids[static_cast<std::size_t>(1 - k)];
      std::size_t farthest = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < colors.size(); ++i) {
        const double d = squared_distance(colors[i], other);
        if (d > best ||
            (d == best && color_key(colors[i]) < color_key(colors[farthest]))) {
          best = d;
          farthest = i;
        }
      }
      sums[static_cast<std::size_t>(1 - k)].remove(colors[farthest]);
      sums[static_cast<std::size_t>(k)].add(colors[farthest]);
      labels[farthest] = k;
    }

    const std::array<ColorVec, 2> next{sums[0].mean(), sums[1].mean()};
    const double movement =
        std::max(distance(next[0], centroids[0]), distance(next[1], centroids[1]));
    centroids = next;
    if (movement < options.tolerance) break;
  }

  // Best-improvement single-point transfers until none helps. Picking the
  // globally best move keeps the result independent of input order.
  std::array<ClusterSums, 2> sums;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    sums[static_cast<std::size_t>(labels[i])].add(colors[i]);
  }
  const long max_moves = 100 + 10 * static_cast<long>(colors.size());
  for (long move = 0; move < max_moves; ++move) {
    const std::array<ColorVec, 2> means{sums[0].count > 0 ? sums[0].mean() : centroids[0],
                                        sums[1].count > 0 ? sums[1].mean() : centroids[1]};
    double best_delta = -1e-12;
    std::ptrdiff_t best_index = -1;
    for (std::size_t i = 0; i < colors.size(); ++i) {
      const auto from = static_cast<std::size_t>(labels[i]);
      const auto to = 1 - from;
      const int n_from = sums[from].count;
      const int n_to = sums[to].count;
      if (n_from <= 1) continue;
      const double d_from = squared_distance(colors[i], means[from]);
      const double d_to = squared_distance(colors[i], means[to]);
      const double delta =
          (static_cast<double>(n_to) / (n_to + 1)) * d_to -
          (static_cast<double>(n_from) / (n_from - 1)) * d_from;
      if (delta < best_delta ||
          (delta == best_delta && best_index >= 0 &&
           color_key(colors[i]) < color_key(colors[static_cast<std::size_t>(best_index)]))) {
        best_delta = delta;
        best_index = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (best_index < 0) break;
    const auto idx = static_cast<std::size_t>(best_index);
    const auto from = static_cast<std::size_t>(labels[idx]);
    sums[from].remove(colors[idx]);
    sums[1 - from].add(colors[idx]);
    labels[idx] = static_cast<int>(1 - from);
  }

  KMeansFit fit;
  fit.labels = std::move(labels);
  fit.centroids = {sums[0].count > 0 ? sums[0].mean() : centroids[0],
                   sums[1].count > 0 ? sums[1].mean() : centroids[1]};
  fit.inertia = partition_inertia(colors, fit.labels, fit.centroids);
  return fit;
}

// Order-independent seeding: the coordinate-smallest color plus the color
// farthest from it.
std::array<ColorVec, 2> deterministic_seeds(std::span<const ColorVec> colors) {
  const ColorVec* first = &colors[0];
  for (const auto& c : colors) {
    if (color_key(c) < color_key(*first)) first = &c;
  }
  const ColorVec* second = nullptr;
  double best = -1.0;
  for (const auto& c : colors) {
    const double d = squared_distance(c, *first);
    if (d > best || (d == best && second && color_key(c) < color_key(*second))) {
      best = d;
      second = &c;
    }
  }
  return {*first, *second};
}

std::array<ColorVec, 2> sampled_seeds(std::span<const ColorVec> colors, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, colors.size() - 1);
  const ColorVec first = colors[pick(rng)];

  std::vector<double> weights(colors.size());
  double total = 0.0;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    weights[i] = squared_distance(colors[i], first);
    total += weights[i];
  }
  if (total <= 0.0) return {first, first};
  std::uniform_real_distribution<double> u(0.0, total);
  double r = u(rng);
  std::size_t chosen = colors.size() - 1;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if (r < weights[i]) {
      chosen = i;
      break;
    }
    r -= weights[i];
  }
  return {first, colors[chosen]};
}

KMeansFit kmeans2(std::span<const ColorVec> colors, const ClusterOptions& options) {
  KMeansFit best = lloyd(colors, deterministic_seeds(colors), options);
  for (int run = 1; run < options.restarts; ++run) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(run));
    const KMeansFit fit = lloyd(colors, sampled_seeds(colors, rng), options);
    if (fit.inertia < best.inertia) best = fit;
  }
  return best;
}

// Label 0 belongs to the lower-luminance centroid; exact luminance ties
// fall back to coordinate order.
void canonicalize(std::array<ColorVec, 2>& centroids, bool& swapped) {
  const double l0 = luminance(centroids[0]);
  const double l1 = luminance(centroids[1]);
  swapped = l0 > l1 || (l0 == l1 && color_key(centroids[1]) < color_key(centroids[0]));
  if (swapped) std::swap(centroids[0], centroids[1]);
}

std::optional<ColorVec> detection_color(const Detection& d) {
  if (d.mean_color) return d.mean_color;
  if (d.patch) return patch_mean_color(*d.patch);
  return std::nullopt;
}

double channel_median(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

ColorVec patch_mean_color(const Patch& patch) {
  ColorVec sum;
  for (std::size_t i = 0; i < kPatchPixels; ++i) {
    sum.r += patch[3 * i];
    sum.g += patch[3 * i + 1];
    sum.b += patch[3 * i + 2];
  }
  return ColorVec{sum.r / kPatchPixels, sum.g / kPatchPixels, sum.b / kPatchPixels};
}

TeamAssignment cluster_teams(std::span<const std::pair<int, ColorVec>> colors,
                             const ClusterOptions& options) {
  if (colors.size() < 2) {
    throw ValidationError("team clustering needs at least 2 colored tracks, got " +
                          std::to_string(colors.size()));
  }
  if (options.restarts < 1) throw ConfigError("restarts must be >= 1");
  std::set<int> ids;
  for (const auto& [track_id, color] : colors) {
    if (!ids.insert(track_id).second) {
      throw ValidationError("duplicate track id in clustering input: " + std::to_string(track_id));
    }
    if (!valid(color)) throw ValidationError("color channels must be finite and in [0,255]");
  }

  std::vector<ColorVec> values;
  values.reserve(colors.size());
  for (const auto& [track_id, color] : colors) values.push_back(color);

  const bool all_identical = std::all_of(values.begin(), values.end(), [&](const ColorVec& c) {
    return color_key(c) == color_key(values.front());
  });

  TeamAssignment assignment;
  if (all_identical) {
    assignment.centroids = {values.front(), values.front()};
    assignment.inertia = 0.0;
    assignment.degenerate = true;
    for (const auto& [track_id, color] : colors) assignment.labels[track_id] = 0;
    return assignment;
  }

  KMeansFit fit = kmeans2(values, options);
  bool swapped = false;
  canonicalize(fit.centroids, swapped);
  assignment.centroids = fit.centroids;
  assignment.inertia = fit.inertia;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    const int label = swapped ? 1 - fit.labels[i] : fit.labels[i];
    assignment.labels[colors[i].first] = label;
    assignment.track_colors[colors[i].first] = colors[i].second;
  }
  return assignment;
}

int assign_color(const TeamAssignment& assignment, const ColorVec& color) {
  const double d0 = squared_distance(color, assignment.centroids[0]);
  const double d1 = squared_distance(color, assignment.centroids[1]);
  return d0 <= d1 ? 0 : 1;
}

TeamAssignment assign_teams(std::span<const FrameRecord> frames,
                            const SequenceTeamOptions& options) {
  // Colors to fit the centroids on: the first frame with two or more
  // colored detections, optionally topped up every Nth frame.
  std::vector<ColorVec> fit_colors;
  bool have_fit_frame = false;
  std::map<int, std::array<std::vector<double>, 3>> per_track_channels;

  std::size_t frame_pos = 0;
  for (const auto& frame : frames) {
    std::vector<ColorVec> frame_colors;
    for (const auto& d : frame.detections) {
      const auto color = detection_color(d);
      if (!color) continue;
      frame_colors.push_back(*color);
      auto& channels = per_track_channels[d.track_id];
      channels[0].push_back(color->r);
      channels[1].push_back(color->g);
      channels[2].push_back(color->b);
    }
    const bool reestimate = options.reestimate_every > 0 &&
                            frame_pos % static_cast<std::size_t>(options.reestimate_every) == 0;
    if (frame_colors.size() >= 2 && (!have_fit_frame || reestimate)) {
      fit_colors.insert(fit_colors.end(), frame_colors.begin(), frame_colors.end());
      have_fit_frame = true;
    }
    ++frame_pos;
  }

  if (fit_colors.size() < 2) {
    throw ValidationError("no frame carries two or more colored detections");
  }

  const bool all_identical = std::all_of(fit_colors.begin(), fit_colors.end(), [&](const ColorVec& c) {
    return color_key(c) == color_key(fit_colors.front());
  });

  TeamAssignment assignment;
  if (all_identical) {
    assignment.centroids = {fit_colors.front(), fit_colors.front()};
    assignment.degenerate = true;
  } else {
    KMeansFit fit = kmeans2(fit_colors, options.cluster);
    bool swapped = false;
    canonicalize(fit.centroids, swapped);
    assignment.centroids = fit.centroids;
    assignment.inertia = fit.inertia;
  }

  // Median-aggregated color per track resists single-frame glare.
  for (auto& [track_id, channels] : per_track_channels) {
    const ColorVec median{channel_median(channels[0]), channel_median(channels[1]),
                          channel_median(channels[2])};
    assignment.labels[track_id] = assignment.degenerate ? 0 : assign_color(assignment, median);
    assignment.track_colors[track_id] = median;
  }
  return assignment;
}

void write_team_assignment(std::ostream& out, const TeamAssignment& assignment) {
  detail::Json j;
  j["centroids"] = {{assignment.centroids[0].r, assignment.centroids[0].g, assignment.centroids[0].b},
                    {assignment.centroids[1].r, assignment.centroids[1].g, assignment.centroids[1].b}};
  j["inertia"] = assignment.inertia;
  j["degenerate"] = assignment.degenerate;
  j["tracks"] = detail::Json::array();
  for (const auto& [track_id, label] : assignment.labels) {
    detail::Json t;
    t["track_id"] = track_id;
    t["team"] = label;
    const auto cit = assignment.track_colors.find(track_id);
    if (cit != assignment.track_colors.end()) {
      t["dist_centroid0"] = distance(cit->second, assignment.centroids[0]);
      t["dist_centroid1"] = distance(cit->second, assignment.centroids[1]);
    }
    j["tracks"].push_back(std::move(t));
  }
  out << j.dump(2) << '\n';
}

TeamAssignment read_team_assignment(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const detail::Json j = detail::parse_document(buffer.str());
  TeamAssignment assignment;
  const auto& cents = detail::require(j, "centroids");
  if (!cents.is_array() || cents.size() != 2) {
    throw ParseError("field 'centroids' must hold exactly 2 colors");
  }
  for (std::size_t k = 0; k < 2; ++k) {
    assignment.centroids[k] =
        ColorVec{cents[k][0].get<double>(), cents[k][1].get<double>(), cents[k][2].get<double>()};
  }
  assignment.inertia = detail::require_number(j, "inertia");
  assignment.degenerate = detail::require(j, "degenerate").get<bool>();
  for (const auto& t : detail::require(j, "tracks")) {
    const int track_id = static_cast<int>(detail::require_integer(t, "track_id"));
    const int team = static_cast<int>(detail::require_integer(t, "team"));
    if (team != 0 && team != 1) throw ValidationError("team labels must be 0 or 1");
    assignment.labels[track_id] = team;
  }
  return assignment;
}

}  // namespace pitch2d
