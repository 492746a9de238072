#include "dynavo/geometry.hpp"

#include <cmath>

namespace dynavo {

std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p_world,
                                       const PoseSE3& world_to_camera,
                                       const CameraIntrinsics& intr) {
  const Eigen::Vector3d pc = world_to_camera * p_world;
  if (pc.z() <= 0.0) return std::nullopt;
  return Eigen::Vector2d(intr.fx * pc.x() / pc.z() + intr.cx,
                         intr.fy * pc.y() / pc.z() + intr.cy);
}

std::optional<Eigen::Vector3d> back_project(double u, double v, double z,
                                            const CameraIntrinsics& intr,
                                            const PoseSE3& camera_to_world) {
  if (z <= 0.0) return std::nullopt;
  const Eigen::Vector3d pc(z * (u - intr.cx) / intr.fx, z * (v - intr.cy) / intr.fy, z);
  return camera_to_world * pc;
}

double cauchy(double squared_error, double scale) {
  const double c2 = scale * scale;
  return c2 * std::log1p(squared_error / c2);
}

std::optional<ClusterScore> cluster_reprojection_error(
    std::span<const TrackedMatch> matches, const PoseSE3& world_to_camera,
    const CameraIntrinsics& intr, double cauchy_scale) {
  double sum = 0.0;
  int count = 0;
  int cluster_id = -1;
  for (const TrackedMatch& m : matches) {
    if (!m.world_point) continue;
    const auto uv = project(*m.world_point, world_to_camera, intr);
    if (!uv) continue;  // behind the candidate camera, unscorable
    sum += cauchy((m.cur_px - *uv).squaredNorm(), cauchy_scale);
    ++count;
    cluster_id = m.cluster_id;
  }
  if (count == 0) return std::nullopt;
  return ClusterScore{cluster_id, sum / count, count};
}

}  // namespace dynavo
