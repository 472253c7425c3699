#pragma once

// Shared test helpers: seeded random SE(3) data and an analytic trajectory
// family with closed-form twists and twist derivatives.

#include <random>

#include "bilts/reparam.hpp"
#include "bilts/se3.hpp"

namespace testutil {

using bilts::GeometricTrajectory;
using bilts::Pose;
using bilts::ScrewTwist;
using bilts::Vector6d;

inline Eigen::Vector3d random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {g(rng), g(rng), g(rng)};
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng));
  } while (q.norm() < 1e-6);
  q.normalize();
  return q.toRotationMatrix();
}

inline Pose random_pose(std::mt19937_64& rng, double box = 1.0) {
  return Pose(random_rotation(rng), random_vec(rng, box));
}

inline ScrewTwist random_twist(std::mt19937_64& rng, double omega_scale = 1.0,
                               double vel_scale = 1.0) {
  ScrewTwist tw;
  tw.omega = random_vec(rng, omega_scale);
  tw.vel = random_vec(rng, vel_scale);
  return tw;
}

// T(s) = exp(s [tw1]) exp(s [tw2]) base. Smooth, and generically regular for
// the local shape decomposition. Spatial twist and its first two derivatives
// have closed forms, making this the reference oracle for anything built on
// finite differences of the pose stream.
struct TwoExpCurve {
  ScrewTwist tw1;
  ScrewTwist tw2;
  Pose base = Pose::identity();

  Pose at(double s) const {
    using bilts::compose;
    using bilts::se3_exp;
    return compose(se3_exp(tw1, s), compose(se3_exp(tw2, s), base));
  }

  ScrewTwist twist(double s) const {
    const bilts::ScrewTransform ad = bilts::adjoint(bilts::se3_exp(tw1, s));
    return ScrewTwist::from_vec(tw1.vec() + ad * tw2.vec());
  }

  ScrewTwist dtwist(double s) const {
    const bilts::ScrewTransform ad = bilts::adjoint(bilts::se3_exp(tw1, s));
    return ScrewTwist::from_vec(ad * bilts::twist_cross(tw1) * tw2.vec());
  }

  ScrewTwist ddtwist(double s) const {
    const bilts::ScrewTransform ad = bilts::adjoint(bilts::se3_exp(tw1, s));
    const bilts::ScrewTransform cr = bilts::twist_cross(tw1);
    return ScrewTwist::from_vec(ad * cr * cr * tw2.vec());
  }

  GeometricTrajectory sample(double s0, double s1, int n) const {
    GeometricTrajectory traj;
    traj.ds = (s1 - s0) / (n - 1);
    traj.samples.reserve(n);
    for (int i = 0; i < n; ++i) traj.samples.push_back(at(s0 + i * traj.ds));
    return traj;
  }
};

inline TwoExpCurve random_curve(std::mt19937_64& rng) {
  TwoExpCurve c;
  // Angular parts with solid magnitude and distinct directions keep the
  // sampled stretch away from the decomposition's singular cases.
  c.tw1.omega = random_unit(rng) * 1.0;
  c.tw2.omega = random_unit(rng);
  while (c.tw2.omega.cross(c.tw1.omega).norm() < 0.3)
    c.tw2.omega = random_unit(rng);
  c.tw1.vel = random_vec(rng, 0.5);
  c.tw2.vel = random_vec(rng, 0.5);
  c.base = random_pose(rng);
  return c;
}

// Same path with every pose T replaced by a * T * b.
inline GeometricTrajectory transformed(const GeometricTrajectory& traj,
                                       const Pose& a, const Pose& b) {
  GeometricTrajectory out = traj;
  for (auto& s : out.samples) s = bilts::compose(a, bilts::compose(s, b));
  return out;
}

}  // namespace testutil
