#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynavo/se3.hpp"
#include "dynavo/types.hpp"

namespace dynavo {

// Rank-2 two-view matrix, stored with unit Frobenius norm and a fixed sign so
// estimates are comparable across runs.
struct FundamentalMatrix {
  Eigen::Matrix3d f = Eigen::Matrix3d::Zero();

  static FundamentalMatrix normalized(const Eigen::Matrix3d& m);
};

struct EpipolarLine {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Analytic F = K^-T [t]x R K^-1 from the relative pose x2 = R x1 + t.
// Throws std::invalid_argument when the translation is zero (F undefined).
FundamentalMatrix fundamental_from_pose(const CameraIntrinsics& intr, const PoseSE3& t_21);

// L = F * p1 for homogeneous pixel p1 of the last frame. Empty when the line
// direction vanishes (p1 at the epipole).
std::optional<EpipolarLine> epipolar_line(const FundamentalMatrix& f,
                                          const Eigen::Vector3d& p1);

// Point-to-line distance of p2 from L = F * p1, in pixels.
std::optional<double> epipolar_distance(const FundamentalMatrix& f,
                                        const Eigen::Vector3d& p1,
                                        const Eigen::Vector3d& p2);

struct FundamentalRansacParams {
  int iterations = 200;
  double inlier_threshold = 1.0;  // px epipolar distance
  std::uint64_t seed = 42;
};

struct FundamentalEstimate {
  FundamentalMatrix f;
  std::vector<char> inliers;  // per input match, against the final F
  int inlier_count = 0;
};

// Seeded RANSAC over normalized 8-point samples followed by a second
// least-squares estimation on the first pass's inliers. Throws
// std::invalid_argument with < 8 matches and std::runtime_error when every
// sample is degenerate.
FundamentalEstimate estimate_fundamental_ransac(std::span<const Eigen::Vector2d> prev_pts,
                                                std::span<const Eigen::Vector2d> cur_pts,
                                                const FundamentalRansacParams& params);

}  // namespace dynavo
