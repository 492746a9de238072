#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "dynavo/se3.hpp"
#include "dynavo/tracking.hpp"
#include "dynavo/types.hpp"

namespace dynavo {

// Pinhole projection of a world point. Empty when the point lands behind the
// camera (z <= 0 after the transform).
std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p_world,
                                       const PoseSE3& world_to_camera,
                                       const CameraIntrinsics& intr);

// 2D-3D inverse projection: lifts pixel (u, v) with depth z through the
// pinhole model and maps the camera-frame point into the world frame.
std::optional<Eigen::Vector3d> back_project(double u, double v, double z,
                                            const CameraIntrinsics& intr,
                                            const PoseSE3& camera_to_world);

// Cauchy robust cost of a squared pixel error: c^2 * ln(1 + s / c^2).
double cauchy(double squared_error, double scale);

struct ClusterScore {
  int cluster_id = -1;
  double mean_error = 0.0;  // robustified px^2
  int match_count = 0;
};

// Mean robustified squared reprojection residual over the cluster's matches.
// Matches without a world point are skipped; empty when none remain.
std::optional<ClusterScore> cluster_reprojection_error(
    std::span<const TrackedMatch> matches, const PoseSE3& world_to_camera,
    const CameraIntrinsics& intr, double cauchy_scale);

}  // namespace dynavo
