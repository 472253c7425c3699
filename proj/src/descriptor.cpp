#include "bilts/descriptor.hpp"

#include <cmath>

#include "bilts/errors.hpp"

namespace bilts {

namespace {

// Minimal rotation mapping unit vector a onto unit vector b.
Eigen::Matrix3d rotation_between(const Eigen::Vector3d& a,
                                 const Eigen::Vector3d& b) {
  const Eigen::Vector3d v = a.cross(b);
  const double s2 = v.squaredNorm();
  const double c = a.dot(b);
  if (s2 < 1e-24) {
    if (c > 0.0) return Eigen::Matrix3d::Identity();
    // Antipodal: rotate pi about an axis perpendicular to a.
    int j = 0;
    a.cwiseAbs().minCoeff(&j);
    const Eigen::Vector3d p =
        (Eigen::Vector3d::Unit(j) - a(j) * a).normalized();
    return rotation_exp(M_PI * p);
  }
  const Eigen::Matrix3d vx = skew(v);
  return Eigen::Matrix3d::Identity() + vx + vx * vx * ((1.0 - c) / s2);
}

// Unit vector orthogonal to q1, as close as possible to the previous frame's
// y-axis carried over by the minimal rotation aligning the x-axes; falls back
// to the body frame's axes when no usable predecessor exists.
Eigen::Vector3d completion_axis(const Eigen::Vector3d& q1,
                                const EqrOptions& opts) {
  if (opts.previous) {
    const Eigen::Matrix3d& prev = opts.previous->pose.rotation;
    const Eigen::Vector3d cand = rotation_between(prev.col(0), q1) * prev.col(1);
    const Eigen::Vector3d w = cand - q1.dot(cand) * q1;
    if (w.norm() > 1e-12) return w.normalized();
  }
  int best = 0;
  double best_dot = 2.0;
  for (int j = 0; j < 3; ++j) {
    const double d = std::abs(q1.dot(opts.body_rotation.col(j)));
    if (d < best_dot) {
      best_dot = d;
      best = j;
    }
  }
  const Eigen::Vector3d col = opts.body_rotation.col(best);
  return (col - q1.dot(col) * q1).normalized();
}

}  // namespace

TriangularDecomposition eqr_decompose(const Matrix63d& x,
                                      const EqrOptions& opts) {
  if (opts.regularize && opts.L < 0.0)
    throw std::invalid_argument("regularization radius L must be >= 0");

  const Eigen::Matrix3d x1 = x.topRows<3>();
  const Eigen::Matrix3d x2 = x.bottomRows<3>();
  const double tol = kEqrRelTol * x.norm();

  // Gram-Schmidt on the first two rotational columns; the norm-based
  // diagonal entries are non-negative by construction.
  const double r11 = x1.col(0).norm();
  const bool regular1 = r11 > tol && tol > 0.0;
  Eigen::Vector3d q1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d q2 = Eigen::Vector3d::UnitY();
  bool regular2 = false;
  if (regular1) {
    q1 = x1.col(0) / r11;
    const Eigen::Vector3d w = x1.col(1) - q1.dot(x1.col(1)) * q1;
    regular2 = w.norm() > tol;
    if (regular2) q2 = w / w.norm();
  }

  if (!(regular1 && regular2) && !opts.regularize)
    throw SingularDecomposition(
        regular1 ? "second rotational column is parallel to the first"
                 : "rotational velocity column is (near) zero");

  bool origin_pinned = false;
  if (!regular1) {
    // (Near) pure translation: take the x-axis along the translational
    // velocity and, when the stack still determines it, the y-axis along the
    // perpendicular component of the translational derivative column.
    if (x2.col(0).norm() > tol && tol > 0.0) {
      q1 = x2.col(0).normalized();
      const Eigen::Vector3d w2 = x2.col(1) - q1.dot(x2.col(1)) * q1;
      q2 = w2.norm() > tol ? Eigen::Vector3d(w2.normalized())
                           : completion_axis(q1, opts);
    } else if (opts.previous) {
      q1 = opts.previous->pose.rotation.col(0);
      q2 = opts.previous->pose.rotation.col(1);
    } else {
      const Eigen::Matrix3d b = orthonormalized(opts.body_rotation);
      q1 = b.col(0);
      q2 = b.col(1);
    }
    origin_pinned = true;
  } else if (!regular2) {
    // Fixed screw axis: keep the x-axis from the decomposition and complete
    // the frame from the previous sample (or the body frame) for continuity.
    q2 = completion_axis(q1, opts);
    origin_pinned = true;
  }

  const Eigen::Vector3d q3 = q1.cross(q2);
  Eigen::Matrix3d q;
  q << q1, q2, q3;

  Eigen::Matrix3d rtop = q.transpose() * x1;
  if (regular1 && regular2) {
    rtop(1, 0) = rtop(2, 0) = rtop(2, 1) = 0.0;  // structural zeros
    rtop(0, 0) = r11;
  }

  const Eigen::Matrix3d b = q.transpose() * x2;
  const Eigen::Vector3d body_f = q.transpose() * opts.body_origin;
  Eigen::Vector3d p_star;
  if (!regular1) {
    p_star = body_f;
  } else {
    // The origin's offsets perpendicular to the screw axis follow from the
    // structural zeros of the translational rows; the offset along the axis
    // needs the regular second column and is otherwise pinned to the body.
    const double z = b(1, 0) / r11;
    const double y = -b(2, 0) / r11;
    const double xx = regular2 ? (b(2, 1) + rtop(0, 1) * y) / rtop(1, 1)
                               : body_f.x();
    p_star = Eigen::Vector3d(xx, y, z);
  }

  bool clamped = false;
  if (opts.regularize) {
    Eigen::Vector3d dp = p_star - body_f;
    const double dist = dp.norm();
    if (dist > opts.L) {
      dp *= dist > 0.0 ? opts.L / dist : 0.0;
      p_star = body_f + dp;
      clamped = true;
    }
  }

  Eigen::Matrix3d rbot = b - skew(p_star) * rtop;
  if (regular1 && regular2 && !clamped && !origin_pinned)
    rbot(1, 0) = rbot(2, 0) = rbot(2, 1) = 0.0;  // exact by the origin solve

  TriangularDecomposition dec;
  dec.frame.pose = Pose(q, q * p_star);
  dec.frame.regularized = opts.regularize;
  dec.frame.distance_clamped = clamped || origin_pinned;
  dec.r.topRows<3>() = rtop;
  dec.r.bottomRows<3>() = rbot;
  return dec;
}

bool is_twice_upper_triangular(const Matrix63d& r, double tol) {
  return std::abs(r(1, 0)) <= tol && std::abs(r(2, 0)) <= tol &&
         std::abs(r(2, 1)) <= tol && std::abs(r(4, 0)) <= tol &&
         std::abs(r(5, 0)) <= tol && std::abs(r(5, 1)) <= tol;
}

Eigen::Matrix3d stack_to_decomposition_basis() {
  Eigen::Matrix3d a;
  a << 0, -1, 1,
       1, 0, 0,
       0, 1, 0;
  return a;
}

Eigen::Matrix3d decomposition_to_stack_basis() {
  Eigen::Matrix3d inv;
  inv << 0, 1, 0,
         0, 0, 1,
         1, 0, 1;
  return inv;
}

Eigen::Matrix3d taylor_coefficients(double delta_s) {
  Eigen::Matrix3d c;
  c << 1.0, 1.0, 1.0,
       -delta_s, 0.0, delta_s,
       0.5 * delta_s * delta_s, 0.0, 0.5 * delta_s * delta_s;
  return c;
}

Matrix63d stack_twists(const std::vector<ScrewTwist>& twists, int k, int m) {
  const int n = static_cast<int>(twists.size());
  if (m < 1) throw std::invalid_argument("progress scale m must be >= 1");
  if (k - m < 0 || k + m >= n)
    throw IndexOutOfRange("twist stack needs indices k - m and k + m in range");
  Matrix63d y;
  y.col(0) = twists[k - m].vec();
  y.col(1) = twists[k].vec();
  y.col(2) = twists[k + m].vec();
  return y;
}

ShapeDescriptor descriptor_from_twists(const ScrewTwist& tw_minus,
                                       const ScrewTwist& tw_center,
                                       const ScrewTwist& tw_plus, double ds,
                                       int m, const EqrOptions& eqr) {
  Matrix63d y;
  y.col(0) = tw_minus.vec();
  y.col(1) = tw_center.vec();
  y.col(2) = tw_plus.vec();
  const TriangularDecomposition dec =
      eqr_decompose(y * stack_to_decomposition_basis(), eqr);
  ShapeDescriptor d;
  d.y = dec.r * decomposition_to_stack_basis();
  d.m = m;
  d.ds = ds;
  d.frame = dec.frame;
  return d;
}

namespace {

ScrewTwist central_twist(const GeometricTrajectory& traj, int i) {
  return se3_log(traj.samples[i - 1], traj.samples[i + 1], 2.0 * traj.ds);
}

EqrOptions eqr_options_at(const GeometricTrajectory& traj, int k,
                          const DescriptorOptions& opts,
                          const FunctionalFrame* previous) {
  EqrOptions eqr;
  eqr.regularize = opts.regularize;
  eqr.L = opts.L;
  eqr.body_origin = traj.samples[k].position;
  eqr.body_rotation = traj.samples[k].rotation;
  eqr.previous = previous;
  return eqr;
}

}  // namespace

ShapeDescriptor descriptor_at(const GeometricTrajectory& traj, int k, int m,
                              const DescriptorOptions& opts) {
  const int n = static_cast<int>(traj.samples.size());
  if (m < 1) throw std::invalid_argument("progress scale m must be >= 1");
  if (k - m - 1 < 0 || k + m + 1 >= n)
    throw IndexOutOfRange("descriptor needs poses at k - m - 1 ... k + m + 1");
  return descriptor_from_twists(central_twist(traj, k - m),
                                central_twist(traj, k),
                                central_twist(traj, k + m), traj.ds, m,
                                eqr_options_at(traj, k, opts, nullptr));
}

std::vector<ShapeDescriptor> descriptor_sequence(
    const GeometricTrajectory& traj, int m, const DescriptorOptions& opts) {
  const int n = static_cast<int>(traj.samples.size());
  if (m < 1) throw std::invalid_argument("progress scale m must be >= 1");
  std::vector<ShapeDescriptor> out;
  if (n < 2 * m + 3) return out;

  std::vector<ScrewTwist> twists(n);  // valid at 1 .. n-2
  for (int i = 1; i + 1 < n; ++i) twists[i] = central_twist(traj, i);

  FunctionalFrame prev;
  bool have_prev = false;
  out.reserve(n - 2 * m - 2);
  for (int k = m + 1; k <= n - 2 - m; ++k) {
    Matrix63d y;
    y.col(0) = twists[k - m].vec();
    y.col(1) = twists[k].vec();
    y.col(2) = twists[k + m].vec();
    const EqrOptions eqr =
        eqr_options_at(traj, k, opts, have_prev ? &prev : nullptr);
    const TriangularDecomposition dec =
        eqr_decompose(y * stack_to_decomposition_basis(), eqr);
    ShapeDescriptor d;
    d.y = dec.r * decomposition_to_stack_basis();
    d.m = m;
    d.ds = traj.ds;
    d.frame = dec.frame;
    out.push_back(d);
    prev = dec.frame;
    have_prev = true;
  }
  return out;
}

ShapeDescriptor continuous_descriptor(const ScrewTwist& tw,
                                      const ScrewTwist& dtw,
                                      const ScrewTwist& ddtw, double delta_s,
                                      const EqrOptions& eqr) {
  Matrix63d x;
  x.col(0) = tw.vec();
  x.col(1) = dtw.vec();
  x.col(2) = ddtw.vec();
  const TriangularDecomposition dec = eqr_decompose(x, eqr);
  ShapeDescriptor d;
  d.y = dec.r * taylor_coefficients(delta_s);
  d.m = 1;
  d.ds = delta_s;
  d.frame = dec.frame;
  return d;
}

Matrix63d triangular_from_isa_invariants(const Vector6d& isa,
                                         const IsaFirstDerivatives& d1,
                                         const IsaSecondDerivatives& d2) {
  const double w1 = isa(0), w2 = isa(1), w3 = isa(2);
  const double v1 = isa(3), v2 = isa(4), v3 = isa(5);
  Matrix63d r = Matrix63d::Zero();
  r(0, 0) = w1;
  r(0, 1) = d1.domega1;
  r(0, 2) = -w1 * w2 * w2 + d2.ddomega1;
  r(1, 1) = w1 * w2;
  r(1, 2) = w1 * d1.domega2 + 2.0 * d1.domega1 * w2;
  r(2, 2) = w1 * w2 * w3;
  r(3, 0) = v1;
  r(3, 1) = d1.dv1;
  r(3, 2) = -2.0 * w1 * w2 * v2 - v1 * w2 * w2 + d2.ddv1;
  r(4, 1) = w1 * v2 + v1 * w2;
  r(4, 2) = w1 * d1.dv2 + v1 * d1.domega2 + 2.0 * d1.dv1 * w2 +
            2.0 * d1.domega1 * v2;
  r(5, 2) = v1 * w2 * w3 + w1 * v2 * w3 + w1 * w2 * v3;
  return r;
}

Vector6d isa_invariants_from_triangular(const Matrix63d& r, double tol) {
  const double scale = r.norm();
  const double r11 = r(0, 0), r22 = r(1, 1);
  if (r11 <= tol * scale || r22 <= tol * scale || scale == 0.0)
    throw SingularInvariants("r11 or r22 below tolerance; invariants unbounded");
  Vector6d isa;
  isa(0) = r11;
  isa(1) = r22 / r11;
  isa(2) = r(2, 2) / r22;
  isa(3) = r(3, 0);
  isa(4) = r(4, 1) / r11 - r22 * r(3, 0) / (r11 * r11);
  isa(5) = r(5, 2) / r22 - r(2, 2) * r(4, 1) / (r22 * r22);
  return isa;
}

std::vector<Vector6d> isa_invariant_sequence(const GeometricTrajectory& traj,
                                             int m) {
  const int n = static_cast<int>(traj.samples.size());
  if (m < 1) throw std::invalid_argument("progress scale m must be >= 1");
  std::vector<Vector6d> out;
  if (n < 2 * m + 3) return out;

  std::vector<ScrewTwist> twists(n);  // valid at 1 .. n-2
  for (int i = 1; i + 1 < n; ++i) twists[i] = central_twist(traj, i);

  // Central differences over the window turn the three stacked twist samples
  // into derivative estimates [tw, tw', tw''].
  const double h = m * traj.ds;
  out.reserve(n - 2 * m - 2);
  for (int k = m + 1; k <= n - 2 - m; ++k) {
    Matrix63d x;
    const Vector6d lo = twists[k - m].vec();
    const Vector6d mid = twists[k].vec();
    const Vector6d hi = twists[k + m].vec();
    x.col(0) = mid;
    x.col(1) = (hi - lo) / (2.0 * h);
    x.col(2) = (hi - 2.0 * mid + lo) / (h * h);
    EqrOptions eqr;
    eqr.regularize = false;
    eqr.body_origin = traj.samples[k].position;
    eqr.body_rotation = traj.samples[k].rotation;
    out.push_back(isa_invariants_from_triangular(eqr_decompose(x, eqr).r));
  }
  return out;
}

}  // namespace bilts
