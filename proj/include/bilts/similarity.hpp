#pragma once

#include <utility>
#include <vector>

#include "bilts/descriptor.hpp"

namespace bilts {

// Diagonal weight diag(L^2, L^2, L^2, 1, 1, 1) balancing rotational rows
// (weighted by the characteristic length L) against translational rows.
struct WeightMatrix {
  double L = 1.0;
};

// Weighted Frobenius norm of a 6x3 difference under a WeightMatrix.
double weighted_norm(const Matrix63d& diff, const WeightMatrix& w);

// Distance between two descriptors at the same progress scale.
// Throws MismatchedScale when the scales m*ds are incommensurate.
double bilts_distance(const ShapeDescriptor& y1, const ShapeDescriptor& y2,
                      const WeightMatrix& w);

// Regularized distance: minimum over block-diagonal rotations
// P = blkdiag(R, R), R in SO(3), of |P y1 - y2|_W, solved in closed form by
// weighted orthogonal Procrustes with determinant correction.
double bilts_plus_distance(const ShapeDescriptor& y1, const ShapeDescriptor& y2,
                           const WeightMatrix& w);

// Rotation-invariant summary: singular values of the rotational and
// translational 3x3 blocks, each sorted in descending order.
struct SvSummary {
  Eigen::Vector3d upper;
  Eigen::Vector3d lower;
};

SvSummary sv_summary(const ShapeDescriptor& y);

// Monotone alignment path from dynamic time warping over summary sequences.
struct AlignmentPath {
  std::vector<std::pair<int, int>> pairs;
};

// DTW with weighted Euclidean local cost between summaries. band > 0 applies
// a Sakoe-Chiba band of that radius; ties prefer the diagonal step, then
// advancing the first sequence, then the second.
AlignmentPath dtw_align(const std::vector<SvSummary>& s1,
                        const std::vector<SvSummary>& s2,
                        const WeightMatrix& w, int band = 0);

struct MeasureParams {
  double L = 0.5;        // characteristic length [m]
  double xi = 0.06;      // progress window for the descriptor scale
  bool regularize = false;
  bool plus = false;     // minimize over frame rotations per aligned pair
  int band = 0;          // DTW band radius; 0 disables the band
};

// Progress scale in samples for a descriptor window xi at progress step ds.
int progress_scale(double xi, double ds);

// Average descriptor distance over the DTW-aligned pairs of two trajectories
// (path-length normalized). Throws TooShort when either trajectory yields
// fewer than 3 descriptors.
double trajectory_distance(const GeometricTrajectory& t1,
                           const GeometricTrajectory& t2,
                           const MeasureParams& params);

// Baseline distance between ISA invariant sequences: weighted per-sample
// Euclidean norm with weights (L, L*lambda, L*lambda, 1, lambda, lambda) on
// (omega1..3, v1..3), averaged over the DTW path aligned under the same cost.
double isa_distance(const std::vector<Vector6d>& inv1,
                    const std::vector<Vector6d>& inv2, double L, double lambda,
                    int band = 0);

}  // namespace bilts
