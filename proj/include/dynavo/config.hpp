#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dynavo/types.hpp"

namespace dynavo {

struct SuperPixelParams {
  int grid_spacing = 15;  // seed spacing r in pixels
  int iterations = 5;
  double color_norm = 40.0;  // Lab units
  double space_norm = 0.0;   // 0 -> use grid_spacing
  double depth_norm = 0.3;   // meters
  bool eq4_literal = false;  // sqrt(d_i^2 + d_c^2) instead of |d_i - d_c|
  double min_valid_depth_fraction = 0.2;

  double effective_space_norm() const {
    return space_norm > 0.0 ? space_norm : static_cast<double>(grid_spacing);
  }
};

struct TrackingParams {
  int max_corners = 300;
  double quality_level = 0.01;
  double min_distance = 10.0;
  int pyramid_levels = 3;
  int window_size = 21;
  int max_iterations = 30;
  double epsilon = 0.01;      // px
  double fb_threshold = 1.0;  // px round-trip
  // Mean per-pixel photometric residual above which a track is treated as
  // non-converged (the brightness-constancy assumption no longer holds).
  double max_residual = 20.0;
};

enum class Strategy { AllFrames, OnlyKeyframes };

struct PipelineConfig {
  CameraIntrinsics intrinsics;
  SuperPixelParams superpixel;

  int m_clusters = 12;
  int kmeans_max_iterations = 50;
  bool kmeans_use_depth = true;
  double kmeans_depth_weight = 100.0;  // px per meter in the feature space

  TrackingParams tracking;

  double score_threshold = 1.5;     // robustified px^2 units
  double epipolar_threshold = 1.0;  // px
  int k_min_votes = 3;
  int dilation_radius = 10;  // px
  int border_margin = 10;    // px
  int min_geometry_matches = 20;
  double cauchy_scale = 2.0;  // px

  int f_ransac_iterations = 200;
  double f_inlier_threshold = 1.0;  // px
  int pnp_ransac_iterations = 100;
  double pnp_inlier_threshold = 3.0;    // px
  double model_inlier_threshold = 3.0;  // px
  std::uint64_t seed = 42;

  Strategy strategy = Strategy::AllFrames;
  int keyframe_interval = 10;

  double max_time_diff = 0.02;  // s, timestamp association tolerance
  bool prefetch = true;
  bool overlap_superpixels = true;

  void validate() const;  // throws DataError
};

// Parses a flat "key = value" file ('#' starts a comment). Unknown keys and
// unparseable values raise DataError with the offending line number.
PipelineConfig load_config(const std::filesystem::path& file);

// Applies a single key/value pair onto an existing config.
void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace dynavo
