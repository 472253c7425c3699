#pragma once

#include <Eigen/Dense>

namespace bilts {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix63d = Eigen::Matrix<double, 6, 3>;

// Screw transforms are 6x6 matrices [[Q, 0], [skew(p)Q, Q]].
using ScrewTransform = Matrix6d;

// Rotational velocity below this is treated as a pure translation.
inline constexpr double kPureTranslationTol = 1e-8;
// The rotation log refuses angles within this margin of pi.
inline constexpr double kNearPiTol = 1e-6;
// Below this angle the exp/log coefficients switch to series expansions.
inline constexpr double kSmallAngleTol = 1e-4;
// Composition re-orthonormalizes when the rotation drifts beyond this.
inline constexpr double kOrthonormalDriftTol = 1e-9;

Eigen::Matrix3d skew(const Eigen::Vector3d& v);
Eigen::Vector3d unskew(const Eigen::Matrix3d& m);

bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-10);
// Nearest orthonormal matrix with determinant +1.
Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& r);

// Rigid-body pose: rotation Q and position p of a 4x4 homogeneous transform.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();

  Pose() = default;
  Pose(const Eigen::Matrix3d& q, const Eigen::Vector3d& p)
      : rotation(q), position(p) {}

  static Pose identity() { return Pose(); }
  Pose inverse() const;
  Eigen::Matrix4d matrix() const;
  // Action on a point: Q x + p.
  Eigen::Vector3d apply(const Eigen::Vector3d& x) const;
};

// Screw twist (omega; v): rotational velocity and the translational velocity
// of the point of the moving body instantaneously at the frame's origin.
struct ScrewTwist {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  Eigen::Vector3d vel = Eigen::Vector3d::Zero();

  ScrewTwist() = default;
  ScrewTwist(const Eigen::Vector3d& w, const Eigen::Vector3d& v)
      : omega(w), vel(v) {}

  Vector6d vec() const;
  static ScrewTwist from_vec(const Vector6d& x);
};

// Instantaneous screw axis in Chasles form.
struct ScrewAxis {
  Eigen::Vector3d direction;      // unit vector along the ISA
  Eigen::Vector3d point_on_axis;  // axis point closest to the frame origin
  double pitch_velocity;          // signed translational velocity along the ISA
};

// Homogeneous composition a then b applied on the left: result = a * b.
// Re-orthonormalizes the rotation when drift exceeds kOrthonormalDriftTol.
Pose compose(const Pose& a, const Pose& b);
inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

// Rotation-vector log/exp with closed-form Rodrigues coefficients and series
// expansions below kSmallAngleTol. rotation_log throws RotationNearPi when
// the angle is within kNearPiTol of pi.
Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& w);
Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r);

// Displacement twist t with exp(ds * [t]) = b * a^-1, divided by ds.
// This is the finite-difference spatial twist over a progress step ds.
ScrewTwist se3_log(const Pose& a, const Pose& b, double ds);

// Exponential of a twist scaled by a progress step: exp(ds * [t]).
Pose se3_exp(const ScrewTwist& t, double ds);

// Screw transform S(T) = [[Q, 0], [skew(p)Q, Q]] mapping twists between
// frames; adjoint representation of the pose.
ScrewTransform adjoint(const Pose& t);

// Twist cross-product matrix [[skew(omega), 0], [skew(v), skew(omega)]];
// the derivative of a screw transform along its body twist.
Matrix6d twist_cross(const ScrewTwist& t);

// Express a twist given in frame {a} in the frame that sees {a} at `frame`.
ScrewTwist change_twist_frame(const ScrewTwist& t, const Pose& frame);

// Chasles decomposition. Throws PureTranslation if |omega| <= tol.
ScrewAxis screw_axis(const ScrewTwist& t, double tol = kPureTranslationTol);

// Screw linear interpolation between poses: exp(u log(b a^-1)) a.
// u = 0 gives a, u = 1 gives b.
Pose sclerp(const Pose& a, const Pose& b, double u);

}  // namespace bilts
