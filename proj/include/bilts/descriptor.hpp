#pragma once

#include <vector>

#include "bilts/reparam.hpp"
#include "bilts/se3.hpp"

namespace bilts {

// eQR diagonal entries below this fraction of the stack norm are singular.
inline constexpr double kEqrRelTol = 1e-7;

// Moving frame produced by the eQR decomposition: the functional frame {f}
// with its x-axis along the instantaneous screw axis.
struct FunctionalFrame {
  Pose pose;
  bool regularized = false;       // decomposition ran with regularization on
  bool distance_clamped = false;  // the origin was pinned by the L-ball rule
};

// eQR output: frame {f} and the 6x3 matrix R with X = S(frame) * R.
// In the regular, unregularized case R is twice upper-triangular
// (r21 = r31 = r32 = r51 = r61 = r62 = 0) with r11 > 0 and r22 > 0.
struct TriangularDecomposition {
  FunctionalFrame frame;
  Matrix63d r;
};

struct EqrOptions {
  bool regularize = false;
  double L = 0.0;  // radius of the ball around the body origin for {f}'s origin
  Eigen::Vector3d body_origin = Eigen::Vector3d::Zero();
  Eigen::Matrix3d body_rotation = Eigen::Matrix3d::Identity();
  // Previous sample's frame for temporal continuity at singular samples.
  const FunctionalFrame* previous = nullptr;
};

// Extended QR decomposition X = S(T) * R of a 6x3 twist stack. Throws
// SingularDecomposition when a diagonal entry is below tolerance and
// regularization is off; otherwise falls back to a deterministic frame
// completion and pins the undetermined origin coordinates to the body origin.
TriangularDecomposition eqr_decompose(const Matrix63d& x,
                                      const EqrOptions& opts = {});

bool is_twice_upper_triangular(const Matrix63d& r, double tol = 0.0);

// Local trajectory-shape descriptor: three twist samples at progress
// s - m*ds, s, s + m*ds expressed in the functional frame.
struct ShapeDescriptor {
  Matrix63d y;  // columns: twist at s - m*ds, s, s + m*ds in {f}
  int m = 1;
  double ds = 0.0;
  FunctionalFrame frame;
};

struct DescriptorOptions {
  double L = 0.0;
  bool regularize = false;
};

// Column change of basis between the twist-sample stack Y = [tw-, tw0, tw+]
// and the decomposition input X = [tw0, tw+ - tw-, tw-]; det = 1.
Eigen::Matrix3d stack_to_decomposition_basis();
Eigen::Matrix3d decomposition_to_stack_basis();

// Taylor coefficient matrix C(delta_s) relating [tw, tw', tw''] to the twist
// samples at s - delta_s, s, s + delta_s; det = delta_s^3.
Eigen::Matrix3d taylor_coefficients(double delta_s);

// Stack three twists from a list as columns (k - m, k, k + m).
Matrix63d stack_twists(const std::vector<ScrewTwist>& twists, int k, int m);

// Descriptor from explicit twist samples spaced m*ds apart.
ShapeDescriptor descriptor_from_twists(const ScrewTwist& tw_minus,
                                       const ScrewTwist& tw_center,
                                       const ScrewTwist& tw_plus, double ds,
                                       int m, const EqrOptions& eqr);

// Descriptor at sample k of a geometric trajectory, with twists estimated by
// the central-difference log; needs poses at k - m - 1 ... k + m + 1.
ShapeDescriptor descriptor_at(const GeometricTrajectory& traj, int k, int m,
                              const DescriptorOptions& opts = {});

// Descriptors at every admissible sample, threading each sample's frame into
// the next call for continuity at singular samples. Order-dependent; callers
// must not split one trajectory across threads.
std::vector<ShapeDescriptor> descriptor_sequence(
    const GeometricTrajectory& traj, int m, const DescriptorOptions& opts = {});

// Second-order descriptor prediction from a twist and its first two progress
// derivatives: Y = R * C(delta_s) with R from the eQR of [tw, tw', tw''].
ShapeDescriptor continuous_descriptor(const ScrewTwist& tw,
                                      const ScrewTwist& dtw,
                                      const ScrewTwist& ddtw, double delta_s,
                                      const EqrOptions& eqr = {});

// ISA invariant representation (omega1, omega2, omega3, v1, v2, v3) of a
// regular decomposition, and the closed-form R built from the invariants and
// their progress derivatives.
struct IsaFirstDerivatives {
  double domega1 = 0.0, domega2 = 0.0, dv1 = 0.0, dv2 = 0.0;
};
struct IsaSecondDerivatives {
  double ddomega1 = 0.0, ddv1 = 0.0;
};

Matrix63d triangular_from_isa_invariants(const Vector6d& isa,
                                         const IsaFirstDerivatives& d1,
                                         const IsaSecondDerivatives& d2);

// Throws SingularInvariants when r11 or r22 is below tol.
Vector6d isa_invariants_from_triangular(const Matrix63d& r,
                                        double tol = kEqrRelTol);

// ISA invariants at every admissible sample, from the unregularized eQR of
// finite-difference twist derivatives over a window of m samples. Throws on
// singular samples (the invariants are unbounded there).
std::vector<Vector6d> isa_invariant_sequence(const GeometricTrajectory& traj,
                                             int m = 1);

}  // namespace bilts
