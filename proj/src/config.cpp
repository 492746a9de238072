#include "dynavo/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dynavo/errors.hpp"

namespace dynavo {

void CameraIntrinsics::validate() const {
  if (fx <= 0.0 || fy <= 0.0) throw DataError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw DataError("intrinsics: image size must be positive");
  if (cx <= 0.0 || cx >= width || cy <= 0.0 || cy >= height)
    throw DataError("intrinsics: principal point outside image");
  if (depth_scale <= 0.0) throw DataError("intrinsics: depth_scale must be positive");
}

void PipelineConfig::validate() const {
  intrinsics.validate();
  if (superpixel.grid_spacing < 2) throw DataError("config: superpixel_r must be >= 2");
  if (superpixel.iterations < 1) throw DataError("config: superpixel_iterations must be >= 1");
  if (superpixel.color_norm <= 0.0 || superpixel.depth_norm <= 0.0 ||
      superpixel.effective_space_norm() <= 0.0)
    throw DataError("config: superpixel norms must be positive");
  if (m_clusters < 1) throw DataError("config: m_clusters must be >= 1");
  if (score_threshold <= 0.0 || epipolar_threshold <= 0.0)
    throw DataError("config: thresholds must be positive");
  if (k_min_votes < 1) throw DataError("config: k_min_votes must be >= 1");
  if (dilation_radius < 0 || border_margin < 0)
    throw DataError("config: radii must be non-negative");
  if (cauchy_scale <= 0.0) throw DataError("config: cauchy_scale must be positive");
  if (f_inlier_threshold <= 0.0 || pnp_inlier_threshold <= 0.0 ||
      model_inlier_threshold <= 0.0)
    throw DataError("config: RANSAC thresholds must be positive");
  if (keyframe_interval < 1) throw DataError("config: keyframe_interval must be >= 1");
  if (max_time_diff <= 0.0) throw DataError("config: max_time_diff must be positive");
}

namespace {

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DataError("config: expected boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_entry(PipelineConfig& c, const std::string& key,
                        const std::string& value) {
  const auto as_double = [&] {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw DataError("config: key '" + key + "' expects a number, got '" + value + "'");
    }
  };
  const auto as_int = [&] {
    try {
      return std::stoi(value);
    } catch (const std::exception&) {
      throw DataError("config: key '" + key + "' expects an integer, got '" + value + "'");
    }
  };

  static const std::map<std::string, std::function<void(PipelineConfig&, double)>> doubles = {
      {"fx", [](PipelineConfig& c, double v) { c.intrinsics.fx = v; }},
      {"fy", [](PipelineConfig& c, double v) { c.intrinsics.fy = v; }},
      {"cx", [](PipelineConfig& c, double v) { c.intrinsics.cx = v; }},
      {"cy", [](PipelineConfig& c, double v) { c.intrinsics.cy = v; }},
      {"depth_scale", [](PipelineConfig& c, double v) { c.intrinsics.depth_scale = v; }},
      {"color_norm", [](PipelineConfig& c, double v) { c.superpixel.color_norm = v; }},
      {"space_norm", [](PipelineConfig& c, double v) { c.superpixel.space_norm = v; }},
      {"depth_norm", [](PipelineConfig& c, double v) { c.superpixel.depth_norm = v; }},
      {"min_valid_depth_fraction",
       [](PipelineConfig& c, double v) { c.superpixel.min_valid_depth_fraction = v; }},
      {"kmeans_depth_weight", [](PipelineConfig& c, double v) { c.kmeans_depth_weight = v; }},
      {"quality_level", [](PipelineConfig& c, double v) { c.tracking.quality_level = v; }},
      {"min_distance", [](PipelineConfig& c, double v) { c.tracking.min_distance = v; }},
      {"lk_epsilon", [](PipelineConfig& c, double v) { c.tracking.epsilon = v; }},
      {"fb_threshold", [](PipelineConfig& c, double v) { c.tracking.fb_threshold = v; }},
      {"lk_max_residual", [](PipelineConfig& c, double v) { c.tracking.max_residual = v; }},
      {"score_threshold", [](PipelineConfig& c, double v) { c.score_threshold = v; }},
      {"epipolar_threshold", [](PipelineConfig& c, double v) { c.epipolar_threshold = v; }},
      {"cauchy_scale", [](PipelineConfig& c, double v) { c.cauchy_scale = v; }},
      {"f_inlier_threshold", [](PipelineConfig& c, double v) { c.f_inlier_threshold = v; }},
      {"pnp_inlier_threshold", [](PipelineConfig& c, double v) { c.pnp_inlier_threshold = v; }},
      {"model_inlier_threshold",
       [](PipelineConfig& c, double v) { c.model_inlier_threshold = v; }},
      {"max_time_diff", [](PipelineConfig& c, double v) { c.max_time_diff = v; }},
  };
  static const std::map<std::string, std::function<void(PipelineConfig&, int)>> ints = {
      {"width", [](PipelineConfig& c, int v) { c.intrinsics.width = v; }},
      {"height", [](PipelineConfig& c, int v) { c.intrinsics.height = v; }},
      {"superpixel_r", [](PipelineConfig& c, int v) { c.superpixel.grid_spacing = v; }},
      {"superpixel_iterations", [](PipelineConfig& c, int v) { c.superpixel.iterations = v; }},
      {"m_clusters", [](PipelineConfig& c, int v) { c.m_clusters = v; }},
      {"kmeans_max_iterations", [](PipelineConfig& c, int v) { c.kmeans_max_iterations = v; }},
      {"max_corners", [](PipelineConfig& c, int v) { c.tracking.max_corners = v; }},
      {"pyramid_levels", [](PipelineConfig& c, int v) { c.tracking.pyramid_levels = v; }},
      {"window_size", [](PipelineConfig& c, int v) { c.tracking.window_size = v; }},
      {"lk_max_iterations", [](PipelineConfig& c, int v) { c.tracking.max_iterations = v; }},
      {"k_min_votes", [](PipelineConfig& c, int v) { c.k_min_votes = v; }},
      {"dilation_radius", [](PipelineConfig& c, int v) { c.dilation_radius = v; }},
      {"border_margin", [](PipelineConfig& c, int v) { c.border_margin = v; }},
      {"min_geometry_matches", [](PipelineConfig& c, int v) { c.min_geometry_matches = v; }},
      {"f_ransac_iterations", [](PipelineConfig& c, int v) { c.f_ransac_iterations = v; }},
      {"pnp_ransac_iterations", [](PipelineConfig& c, int v) { c.pnp_ransac_iterations = v; }},
      {"keyframe_interval", [](PipelineConfig& c, int v) { c.keyframe_interval = v; }},
  };

  if (auto it = doubles.find(key); it != doubles.end()) {
    it->second(c, as_double());
  } else if (auto it2 = ints.find(key); it2 != ints.end()) {
    it2->second(c, as_int());
  } else if (key == "eq4_literal") {
    c.superpixel.eq4_literal = parse_bool(value);
  } else if (key == "kmeans_use_depth") {
    c.kmeans_use_depth = parse_bool(value);
  } else if (key == "prefetch") {
    c.prefetch = parse_bool(value);
  } else if (key == "overlap_superpixels") {
    c.overlap_superpixels = parse_bool(value);
  } else if (key == "seed") {
    try {
      c.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw DataError("config: seed expects an unsigned integer, got '" + value + "'");
    }
  } else if (key == "strategy") {
    if (value == "all_frames")
      c.strategy = Strategy::AllFrames;
    else if (value == "only_keyframes")
      c.strategy = Strategy::OnlyKeyframes;
    else
      throw DataError("config: strategy must be all_frames or only_keyframes, got '" + value + "'");
  } else {
    throw DataError("config: unknown key '" + key + "'");
  }
}

PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("config: cannot open " + file.string());

  PipelineConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config: " + file.string() + ":" + std::to_string(line_no) +
                      ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(config, key, value);
    } catch (const DataError& e) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

}  // namespace dynavo
