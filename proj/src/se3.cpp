#include "bilts/se3.hpp"

#include <cmath>

#include "bilts/errors.hpp"

namespace bilts {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Vector3d unskew(const Eigen::Matrix3d& m) {
  return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0));
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

Pose Pose::inverse() const {
  return Pose(rotation.transpose(), -(rotation.transpose() * position));
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = position;
  return m;
}

Eigen::Vector3d Pose::apply(const Eigen::Vector3d& x) const {
  return rotation * x + position;
}

Vector6d ScrewTwist::vec() const {
  Vector6d x;
  x << omega, vel;
  return x;
}

ScrewTwist ScrewTwist::from_vec(const Vector6d& x) {
  return ScrewTwist(x.head<3>(), x.tail<3>());
}

Pose compose(const Pose& a, const Pose& b) {
  Pose c(a.rotation * b.rotation, a.rotation * b.position + a.position);
  const double drift = (c.rotation.transpose() * c.rotation -
                        Eigen::Matrix3d::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  if (drift > kOrthonormalDriftTol) c.rotation = orthonormalized(c.rotation);
  return c;
}

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const double theta2 = theta * theta;
  double a, b;  // sin(t)/t and (1-cos(t))/t^2
  if (theta < kSmallAngleTol) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Eigen::Matrix3d wx = skew(w);
  return Eigen::Matrix3d::Identity() + a * wx + b * wx * wx;
}

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  if (M_PI - theta < kNearPiTol)
    throw RotationNearPi("rotation angle within tolerance of pi; log is not unique");
  const Eigen::Vector3d axis2 = unskew(r - r.transpose());  // 2 sin(theta) n
  double f;  // theta / (2 sin(theta))
  if (theta < kSmallAngleTol) {
    const double t2 = theta * theta;
    f = 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
  } else {
    f = theta / (2.0 * std::sin(theta));
  }
  return f * axis2;
}

namespace {

// V(w) from the closed-form se(3) exponential: p = V(w) u.
Eigen::Matrix3d exp_v_matrix(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const double theta2 = theta * theta;
  double b, c;  // (1-cos(t))/t^2 and (t-sin(t))/t^3
  if (theta < kSmallAngleTol) {
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    c = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Eigen::Matrix3d wx = skew(w);
  return Eigen::Matrix3d::Identity() + b * wx + c * wx * wx;
}

// V(w)^-1 in closed form.
Eigen::Matrix3d log_v_inverse(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const double theta2 = theta * theta;
  double c;  // (1 - (t/2) cot(t/2)) / t^2
  if (theta < kSmallAngleTol) {
    c = 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0;
  } else {
    c = (1.0 - theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)))) /
        theta2;
  }
  const Eigen::Matrix3d wx = skew(w);
  return Eigen::Matrix3d::Identity() - 0.5 * wx + c * wx * wx;
}

}  // namespace

ScrewTwist se3_log(const Pose& a, const Pose& b, double ds) {
  const Pose d = compose(b, a.inverse());
  const Eigen::Vector3d w = rotation_log(d.rotation);
  const Eigen::Vector3d u = log_v_inverse(w) * d.position;
  return ScrewTwist(w / ds, u / ds);
}

Pose se3_exp(const ScrewTwist& t, double ds) {
  const Eigen::Vector3d w = t.omega * ds;
  const Eigen::Vector3d u = t.vel * ds;
  return Pose(rotation_exp(w), exp_v_matrix(w) * u);
}

ScrewTransform adjoint(const Pose& t) {
  ScrewTransform s = ScrewTransform::Zero();
  s.topLeftCorner<3, 3>() = t.rotation;
  s.bottomRightCorner<3, 3>() = t.rotation;
  s.bottomLeftCorner<3, 3>() = skew(t.position) * t.rotation;
  return s;
}

Matrix6d twist_cross(const ScrewTwist& t) {
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = skew(t.omega);
  m.bottomRightCorner<3, 3>() = skew(t.omega);
  m.bottomLeftCorner<3, 3>() = skew(t.vel);
  return m;
}

ScrewTwist change_twist_frame(const ScrewTwist& t, const Pose& frame) {
  return ScrewTwist::from_vec(adjoint(frame) * t.vec());
}

ScrewAxis screw_axis(const ScrewTwist& t, double tol) {
  const double wn = t.omega.norm();
  if (wn <= tol)
    throw PureTranslation("rotational velocity below tolerance; screw axis undefined");
  ScrewAxis axis;
  axis.direction = t.omega / wn;
  axis.pitch_velocity = t.omega.dot(t.vel) / wn;
  axis.point_on_axis = t.omega.cross(t.vel) / (wn * wn);
  return axis;
}

Pose sclerp(const Pose& a, const Pose& b, double u) {
  const ScrewTwist rel = se3_log(a, b, 1.0);
  return compose(se3_exp(rel, u), a);
}

}  // namespace bilts
