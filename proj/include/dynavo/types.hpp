#pragma once

#include <Eigen/Core>
#include <opencv2/core.hpp>
#include <optional>

namespace dynavo {

struct CameraIntrinsics {
  double fx = 535.4;
  double fy = 539.2;
  double cx = 320.1;
  double cy = 247.6;
  double depth_scale = 5000.0;  // depth ticks per meter
  int width = 640;
  int height = 480;

  Eigen::Matrix3d K() const {
    Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
    k(0, 0) = fx;
    k(1, 1) = fy;
    k(0, 2) = cx;
    k(1, 2) = cy;
    return k;
  }

  // Throws DataError when an invariant is violated.
  void validate() const;
};

// One associated RGB-D observation. Immutable once built by the loader.
struct Frame {
  double timestamp = 0.0;
  cv::Mat color;  // 8UC3 BGR
  cv::Mat gray;   // 8UC1, derived from color
  cv::Mat depth;  // 32FC1 meters, 0 = invalid
  std::optional<cv::Mat> prior_mask;  // 8UC1, nonzero = prior-dynamic instance
};

}  // namespace dynavo
