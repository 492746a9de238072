#include "dynavo/pnp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <opencv2/calib3d.hpp>
#include <random>
#include <stdexcept>

#include "dynavo/geometry.hpp"

namespace dynavo {

namespace {

std::optional<PoseSE3> epnp_minimal(std::span<const Eigen::Vector3d> world,
                                    std::span<const Eigen::Vector2d> image,
                                    std::span<const int> idx, const CameraIntrinsics& intr) {
  std::vector<cv::Point3d> obj;
  std::vector<cv::Point2d> img;
  obj.reserve(idx.size());
  img.reserve(idx.size());
  for (int i : idx) {
    obj.emplace_back(world[i].x(), world[i].y(), world[i].z());
    img.emplace_back(image[i].x(), image[i].y());
  }
  cv::Matx33d k(intr.fx, 0.0, intr.cx, 0.0, intr.fy, intr.cy, 0.0, 0.0, 1.0);
  cv::Vec3d rvec, tvec;
  if (!cv::solvePnP(obj, img, k, cv::noArray(), rvec, tvec, false, cv::SOLVEPNP_EPNP))
    return std::nullopt;
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(rvec[i]) || !std::isfinite(tvec[i])) return std::nullopt;

  cv::Matx33d r;
  cv::Rodrigues(rvec, r);
  Eigen::Matrix3d rot;
  for (int rr = 0; rr < 3; ++rr)
    for (int cc = 0; cc < 3; ++cc) rot(rr, cc) = r(rr, cc);
  return PoseSE3(Eigen::Quaterniond(rot), Eigen::Vector3d(tvec[0], tvec[1], tvec[2]));
}

double reprojection_cost(std::span<const Eigen::Vector3d> world,
                         std::span<const Eigen::Vector2d> image,
                         std::span<const char> use_point, const CameraIntrinsics& intr,
                         const PoseSE3& pose) {
  double cost = 0.0;
  for (size_t i = 0; i < world.size(); ++i) {
    if (!use_point[i]) continue;
    const auto uv = project(world[i], pose, intr);
    if (!uv) {
      cost += 1e12;  // behind the camera: keep the damping away from here
      continue;
    }
    cost += (image[i] - *uv).squaredNorm();
  }
  return cost;
}

int count_inliers(std::span<const Eigen::Vector3d> world,
                  std::span<const Eigen::Vector2d> image, const CameraIntrinsics& intr,
                  const PoseSE3& pose, double threshold, std::vector<char>* flags) {
  int count = 0;
  for (size_t i = 0; i < world.size(); ++i) {
    const auto uv = project(world[i], pose, intr);
    const bool in = uv && (image[i] - *uv).norm() <= threshold;
    if (flags) (*flags)[i] = in ? 1 : 0;
    if (in) ++count;
  }
  return count;
}

}  // namespace

PoseSE3 refine_pose_gauss_newton(std::span<const Eigen::Vector3d> world,
                                 std::span<const Eigen::Vector2d> image,
                                 std::span<const char> use_point,
                                 const CameraIntrinsics& intr, const PoseSE3& initial,
                                 int max_iterations) {
  PoseSE3 pose = initial;
  double cost = reprojection_cost(world, image, use_point, intr, pose);

  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (size_t i = 0; i < world.size(); ++i) {
      if (!use_point[i]) continue;
      const Eigen::Vector3d pc = pose * world[i];
      if (pc.z() <= 0.0) continue;
      const double iz = 1.0 / pc.z();
      const Eigen::Vector2d res =
          image[i] - Eigen::Vector2d(intr.fx * pc.x() * iz + intr.cx,
                                     intr.fy * pc.y() * iz + intr.cy);
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << intr.fx * iz, 0.0, -intr.fx * pc.x() * iz * iz, 0.0, intr.fy * iz,
          -intr.fy * pc.y() * iz * iz;
      Eigen::Matrix<double, 3, 6> dpoint;
      dpoint.leftCols<3>() = Eigen::Matrix3d::Identity();
      dpoint.rightCols<3>() = -skew(pc);
      const Eigen::Matrix<double, 2, 6> j = -dproj * dpoint;
      h += j.transpose() * j;
      g += j.transpose() * res;
    }

    Eigen::Matrix<double, 6, 1> step = h.ldlt().solve(-g);
    if (!step.allFinite()) break;

    // Backtrack until the cost does not increase.
    bool accepted = false;
    for (int halving = 0; halving < 6; ++halving) {
      const PoseSE3 candidate = PoseSE3::exp(step) * pose;
      const double new_cost = reprojection_cost(world, image, use_point, intr, candidate);
      if (new_cost < cost) {
        pose = candidate;
        cost = new_cost;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || step.norm() < 1e-12) break;
  }
  return pose;
}

std::optional<PnPResult> pnp_ransac(std::span<const Eigen::Vector3d> world,
                                    std::span<const Eigen::Vector2d> image,
                                    const CameraIntrinsics& intr,
                                    const PnPRansacParams& params) {
  const auto n = world.size();
  if (n != image.size()) throw std::invalid_argument("pnp_ransac: size mismatch");
  if (n < 4) throw std::invalid_argument("pnp_ransac: need at least 4 correspondences");

  std::mt19937_64 rng(params.seed);
  std::vector<int> indices(n);
  for (size_t i = 0; i < n; ++i) indices[i] = static_cast<int>(i);

  std::optional<PoseSE3> best;
  int best_count = -1;
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (int k = 0; k < 4; ++k) {
      std::uniform_int_distribution<size_t> pick(k, n - 1);
      std::swap(indices[k], indices[pick(rng)]);
    }
    const auto pose = epnp_minimal(world, image, std::span<const int>(indices.data(), 4), intr);
    if (!pose) continue;
    const int count = count_inliers(world, image, intr, *pose, params.reproj_threshold, nullptr);
    if (count > best_count) {
      best_count = count;
      best = *pose;
    }
  }
  if (!best || best_count < 4) return std::nullopt;

  std::vector<char> flags(n, 0);
  count_inliers(world, image, intr, *best, params.reproj_threshold, &flags);
  const PoseSE3 refined = refine_pose_gauss_newton(world, image, flags, intr, *best);

  PnPResult out;
  out.world_to_camera = refined;
  out.inliers.assign(n, 0);
  out.inlier_count =
      count_inliers(world, image, intr, refined, params.reproj_threshold, &out.inliers);
  if (out.inlier_count < 4) return std::nullopt;
  return out;
}

}  // namespace dynavo
