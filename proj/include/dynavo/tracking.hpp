#pragma once

#include <Eigen/Core>
#include <opencv2/core.hpp>
#include <optional>
#include <vector>

#include "dynavo/config.hpp"

namespace dynavo {

enum class MatchStatus { Tracked, FbFailed, DepthInvalid, PriorMasked };

// A corner correspondence between consecutive frames.
struct TrackedMatch {
  Eigen::Vector2d prev_px{0.0, 0.0};
  Eigen::Vector2d cur_px{0.0, 0.0};
  double depth_prev = 0.0;  // meters at prev_px, 0 = invalid
  std::optional<Eigen::Vector3d> world_point;
  int superpixel_id = -1;  // region labels at cur_px
  int cluster_id = -1;
  MatchStatus status = MatchStatus::Tracked;
};

// Shi-Tomasi corners, strongest first, at most max_count.
std::vector<Eigen::Vector2d> detect_corners(const cv::Mat& gray, int max_count,
                                            double quality_level, double min_distance);

struct TrackResult {
  Eigen::Vector2d position{0.0, 0.0};
  bool converged = false;
};

// Pyramidal LK from prev to cur. A track counts as converged only when the
// solver succeeded, the point stayed in bounds and the photometric residual
// is below params.max_residual.
std::vector<TrackResult> track_lk(const cv::Mat& prev_gray, const cv::Mat& cur_gray,
                                  const std::vector<Eigen::Vector2d>& points,
                                  const TrackingParams& params);

// Re-tracks cur -> prev and keeps matches whose round-trip error is within
// threshold; the rest are marked FbFailed.
std::vector<TrackedMatch> forward_backward_filter(const cv::Mat& prev_gray,
                                                  const cv::Mat& cur_gray,
                                                  std::vector<TrackedMatch> matches,
                                                  const TrackingParams& params);

}  // namespace dynavo
