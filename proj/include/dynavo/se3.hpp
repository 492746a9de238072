#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dynavo {

// Rigid transform y = q * x + t. The quaternion is renormalized on
// construction so composition chains stay on SO(3).
struct PoseSE3 {
  Eigen::Quaterniond q{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d t{0.0, 0.0, 0.0};

  PoseSE3() = default;
  PoseSE3(const Eigen::Quaterniond& q_in, const Eigen::Vector3d& t_in)
      : q(q_in.normalized()), t(t_in) {}

  static PoseSE3 identity() { return PoseSE3(); }
  static PoseSE3 from_matrix(const Eigen::Matrix4d& m);
  // Twist exponential, xi = (translation xyz, rotation-vector xyz).
  static PoseSE3 exp(const Eigen::Matrix<double, 6, 1>& xi);

  Eigen::Matrix3d rotation() const { return q.toRotationMatrix(); }
  Eigen::Matrix4d matrix() const;

  PoseSE3 inverse() const {
    const Eigen::Quaterniond qi = q.conjugate();
    return PoseSE3(qi, -(qi * t));
  }

  PoseSE3 operator*(const PoseSE3& rhs) const {
    return PoseSE3(q * rhs.q, q * rhs.t + t);
  }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return q * p + t; }

  // Rotation angle in [0, pi].
  double rotation_angle() const {
    return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
  }
};

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

}  // namespace dynavo
