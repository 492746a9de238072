#pragma once

#include <opencv2/core.hpp>
#include <vector>

#include "dynavo/config.hpp"
#include "dynavo/types.hpp"

namespace dynavo {

// One pixel or cluster center in the joint color/space/depth metric.
struct PixelFeature {
  double x = 0.0;
  double y = 0.0;
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;           // meters
  bool depth_valid = false;
};

struct DistanceNorms {
  double color = 40.0;  // Lab units
  double space = 15.0;  // px
  double depth = 0.3;   // meters
};

// Joint clustering metric: normalized color distance + normalized spatial
// distance + normalized depth term. The depth term is |d_i - d_c| by default;
// eq4_literal switches to sqrt(d_i^2 + d_c^2). It contributes 0 when either
// depth is invalid.
double cluster_distance(const PixelFeature& pixel, const PixelFeature& center,
                        const DistanceNorms& norms, bool eq4_literal = false);

struct SuperPixel {
  double x = 0.0;  // centroid, px
  double y = 0.0;
  double l = 0.0;  // mean Lab color
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;            // mean valid depth, meters
  bool depth_valid = false;  // true when any member pixel has valid depth
  double valid_depth_fraction = 0.0;
  int cluster = -1;  // k-means label, -1 until assigned
  int pixel_count = 0;
  int border_distance = 0;  // min distance of any member pixel to the image edge
};

struct SuperPixelMap {
  cv::Mat labels;  // 32SC1, every pixel labeled with a contiguous id
  std::vector<SuperPixel> superpixels;
  int grid_spacing = 0;

  int label_at(int x, int y) const { return labels.at<std::int32_t>(y, x); }
};

// BGR 8-bit to CIELAB (D65), float planes with L in [0,100].
cv::Mat bgr_to_lab(const cv::Mat& bgr);

// Depth-aware SLIC: seeds on a regular r-grid (perturbed to the lowest
// color-gradient pixel in a 3x3 neighborhood), iterative assignment within a
// 2r x 2r window per center, connectivity enforced afterwards. Deterministic.
// Throws std::invalid_argument when the image is smaller than one grid cell.
SuperPixelMap extract_superpixels(const Frame& frame, const SuperPixelParams& params);

}  // namespace dynavo
