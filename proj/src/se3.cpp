#include "dynavo/se3.hpp"

namespace dynavo {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

PoseSE3 PoseSE3::from_matrix(const Eigen::Matrix4d& m) {
  return PoseSE3(Eigen::Quaterniond(Eigen::Matrix3d(m.block<3, 3>(0, 0))),
                 m.block<3, 1>(0, 3));
}

Eigen::Matrix4d PoseSE3::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = q.toRotationMatrix();
  m.block<3, 1>(0, 3) = t;
  return m;
}

PoseSE3 PoseSE3::exp(const Eigen::Matrix<double, 6, 1>& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d omega = xi.tail<3>();
  const double theta = omega.norm();

  Eigen::Quaterniond q;
  Eigen::Matrix3d v;
  if (theta < 1e-10) {
    q = Eigen::Quaterniond::Identity();
    v = Eigen::Matrix3d::Identity() + 0.5 * skew(omega);
  } else {
    q = Eigen::Quaterniond(Eigen::AngleAxisd(theta, omega / theta));
    const Eigen::Matrix3d w = skew(omega);
    v = Eigen::Matrix3d::Identity() +
        ((1.0 - std::cos(theta)) / (theta * theta)) * w +
        ((theta - std::sin(theta)) / (theta * theta * theta)) * (w * w);
  }
  return PoseSE3(q, v * rho);
}

}  // namespace dynavo
