#include "dynavo/epipolar.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dynavo {

FundamentalMatrix FundamentalMatrix::normalized(const Eigen::Matrix3d& m) {
  const double n = m.norm();
  if (n < 1e-15) return FundamentalMatrix{Eigen::Matrix3d::Zero()};
  Eigen::Matrix3d out = m / n;
  // Sign fix: make the largest-magnitude coefficient positive.
  int r = 0, c = 0;
  out.cwiseAbs().maxCoeff(&r, &c);
  if (out(r, c) < 0.0) out = -out;
  return FundamentalMatrix{out};
}

FundamentalMatrix fundamental_from_pose(const CameraIntrinsics& intr, const PoseSE3& t_21) {
  if (t_21.t.norm() < 1e-12)
    throw std::invalid_argument("fundamental_from_pose: zero translation, F undefined");
  const Eigen::Matrix3d k_inv = intr.K().inverse();
  const Eigen::Matrix3d e = skew(t_21.t) * t_21.rotation();
  return FundamentalMatrix::normalized(k_inv.transpose() * e * k_inv);
}

std::optional<EpipolarLine> epipolar_line(const FundamentalMatrix& f,
                                          const Eigen::Vector3d& p1) {
  const Eigen::Vector3d l = f.f * p1;
  if (std::hypot(l.x(), l.y()) <= 1e-12 * std::max(1.0, p1.norm())) return std::nullopt;
  return EpipolarLine{l.x(), l.y(), l.z()};
}

std::optional<double> epipolar_distance(const FundamentalMatrix& f,
                                        const Eigen::Vector3d& p1,
                                        const Eigen::Vector3d& p2) {
  const auto line = epipolar_line(f, p1);
  if (!line) return std::nullopt;
  return std::abs(line->a * p2.x() + line->b * p2.y() + line->c * p2.z()) /
         std::hypot(line->a, line->b);
}

namespace {

struct Normalization {
  Eigen::Matrix3d t;  // maps raw pixels to conditioned coordinates
};

// Hartley conditioning: zero mean, sqrt(2) mean distance.
std::optional<Normalization> condition(std::span<const Eigen::Vector2d> pts,
                                       std::span<const int> idx) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int i : idx) mean += pts[i];
  mean /= static_cast<double>(idx.size());
  double dist = 0.0;
  for (int i : idx) dist += (pts[i] - mean).norm();
  dist /= static_cast<double>(idx.size());
  if (dist < 1e-9) return std::nullopt;  // all points coincide
  const double s = std::sqrt(2.0) / dist;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * mean.x();
  t(1, 2) = -s * mean.y();
  return Normalization{t};
}

// Normalized 8-point (least squares for > 8 correspondences). Returns empty
// for degenerate configurations.
std::optional<FundamentalMatrix> eight_point(std::span<const Eigen::Vector2d> pts1,
                                             std::span<const Eigen::Vector2d> pts2,
                                             std::span<const int> idx) {
  const auto n1 = condition(pts1, idx);
  const auto n2 = condition(pts2, idx);
  if (!n1 || !n2) return std::nullopt;

  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd a(n, 9);
  for (Eigen::Index row = 0; row < n; ++row) {
    const Eigen::Vector3d p1 = n1->t * pts1[idx[row]].homogeneous();
    const Eigen::Vector3d p2 = n2->t * pts2[idx[row]].homogeneous();
    a.row(row) << p2.x() * p1.x(), p2.x() * p1.y(), p2.x(), p2.y() * p1.x(),
        p2.y() * p1.y(), p2.y(), p1.x(), p1.y(), 1.0;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A minimal sample needs a one-dimensional null space; a second vanishing
  // singular value means the sample is degenerate (e.g. collinear points).
  if (n == 8 && sv(7) < 1e-10 * sv(0)) return std::nullopt;

  const Eigen::Matrix<double, 9, 1> fvec = svd.matrixV().col(8);
  Eigen::Matrix3d fn;
  fn << fvec(0), fvec(1), fvec(2), fvec(3), fvec(4), fvec(5), fvec(6), fvec(7), fvec(8);

  // Enforce rank 2.
  Eigen::JacobiSVD<Eigen::Matrix3d> fsvd(fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d s = fsvd.singularValues();
  s(2) = 0.0;
  fn = fsvd.matrixU() * s.asDiagonal() * fsvd.matrixV().transpose();

  return FundamentalMatrix::normalized(n2->t.transpose() * fn * n1->t);
}

int count_inliers(const FundamentalMatrix& f, std::span<const Eigen::Vector2d> pts1,
                  std::span<const Eigen::Vector2d> pts2, double threshold,
                  std::vector<char>* flags) {
  int count = 0;
  for (size_t i = 0; i < pts1.size(); ++i) {
    const auto d = epipolar_distance(f, pts1[i].homogeneous(), pts2[i].homogeneous());
    const bool in = d && *d <= threshold;
    if (flags) (*flags)[i] = in ? 1 : 0;
    if (in) ++count;
  }
  return count;
}

}  // namespace

FundamentalEstimate estimate_fundamental_ransac(std::span<const Eigen::Vector2d> prev_pts,
                                                std::span<const Eigen::Vector2d> cur_pts,
                                                const FundamentalRansacParams& params) {
  const auto n = prev_pts.size();
  if (n != cur_pts.size())
    throw std::invalid_argument("estimate_fundamental_ransac: size mismatch");
  if (n < 8)
    throw std::invalid_argument("estimate_fundamental_ransac: need at least 8 matches");

  std::mt19937_64 rng(params.seed);
  std::vector<int> indices(n);
  for (size_t i = 0; i < n; ++i) indices[i] = static_cast<int>(i);

  std::optional<FundamentalMatrix> best;
  int best_count = -1;
  for (int iter = 0; iter < params.iterations; ++iter) {
    // Partial Fisher-Yates for 8 distinct indices.
    for (int k = 0; k < 8; ++k) {
      std::uniform_int_distribution<size_t> pick(k, n - 1);
      std::swap(indices[k], indices[pick(rng)]);
    }
    const auto f = eight_point(prev_pts, cur_pts, std::span<const int>(indices.data(), 8));
    if (!f) continue;
    const int count = count_inliers(*f, prev_pts, cur_pts, params.inlier_threshold, nullptr);
    if (count > best_count) {
      best_count = count;
      best = *f;
    }
  }
  if (!best)
    throw std::runtime_error("estimate_fundamental_ransac: all samples degenerate");

  // Second computation on the first pass's inliers only.
  std::vector<char> flags(n, 0);
  count_inliers(*best, prev_pts, cur_pts, params.inlier_threshold, &flags);
  std::vector<int> inlier_idx;
  for (size_t i = 0; i < n; ++i)
    if (flags[i]) inlier_idx.push_back(static_cast<int>(i));

  FundamentalMatrix final_f = *best;
  if (inlier_idx.size() >= 8) {
    if (const auto refined = eight_point(prev_pts, cur_pts, inlier_idx)) final_f = *refined;
  }

  FundamentalEstimate out;
  out.f = final_f;
  out.inliers.assign(n, 0);
  out.inlier_count =
      count_inliers(final_f, prev_pts, cur_pts, params.inlier_threshold, &out.inliers);
  return out;
}

}  // namespace dynavo
