#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynavo/se3.hpp"
#include "dynavo/types.hpp"

namespace dynavo {

struct PnPRansacParams {
  int iterations = 100;
  double reproj_threshold = 3.0;  // px
  std::uint64_t seed = 42;
};

struct PnPResult {
  PoseSE3 world_to_camera;
  std::vector<char> inliers;
  int inlier_count = 0;
};

// EPnP minimal solves inside seeded RANSAC, scored by reprojection error;
// the winner is refined on its inliers by damped Gauss-Newton (the refinement
// never increases the inlier cost). Throws std::invalid_argument with < 4
// correspondences; returns empty when no model reaches 4 inliers.
std::optional<PnPResult> pnp_ransac(std::span<const Eigen::Vector3d> world_points,
                                    std::span<const Eigen::Vector2d> image_points,
                                    const CameraIntrinsics& intr,
                                    const PnPRansacParams& params);

// Gauss-Newton on the reprojection objective over the flagged points,
// starting from the given pose. Exposed for reuse by the pose refinement
// stage; cost is guaranteed non-increasing.
PoseSE3 refine_pose_gauss_newton(std::span<const Eigen::Vector3d> world_points,
                                 std::span<const Eigen::Vector2d> image_points,
                                 std::span<const char> use_point,
                                 const CameraIntrinsics& intr, const PoseSE3& initial,
                                 int max_iterations = 10);

}  // namespace dynavo
