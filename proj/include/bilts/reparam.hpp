#pragma once

#include <map>
#include <string>
#include <vector>

#include "bilts/se3.hpp"

namespace bilts {

// Total progress below this is rejected as degenerate.
inline constexpr double kDegenerateProgressTol = 1e-9;

// Geometric progress definitions. Arclength follows the body origin's path,
// angle the traversed rotation, and screw path a weighted combination of the
// traversed rotation and the translation along the instantaneous screw axis.
enum class ProgressType { Arclength, Angle, ScrewPath };

const char* to_string(ProgressType p);
ProgressType progress_from_string(const std::string& s);

// Time-sampled pose stream with a fixed sample period.
struct TemporalTrajectory {
  std::vector<Pose> samples;
  double dt = 0.0;
  std::map<std::string, std::string> metadata;
};

// Progress-sampled pose stream with a fixed progress step.
struct GeometricTrajectory {
  std::vector<Pose> samples;
  double ds = 0.0;
  ProgressType progress_type = ProgressType::ScrewPath;
  double L_screw = 0.0;  // rotation/translation weight used by ScrewPath
};

// Forward-difference spatial twists: twist[j] between samples j and j+1,
// so the result has one entry less than the trajectory.
std::vector<ScrewTwist> temporal_twists(const TemporalTrajectory& traj);

// Translational velocity along the instantaneous screw axis, regulated so the
// evaluation point stays within L_screw of the body origin. Falls back to the
// twist's translational velocity for (near) pure translations.
Eigen::Vector3d regulated_isa_velocity(const ScrewTwist& tw,
                                       const Eigen::Vector3d& body_position,
                                       double L_screw);

// Instantaneous progress rate per twist sample for the chosen definition.
std::vector<double> progress_rates(const std::vector<ScrewTwist>& twists,
                                   const TemporalTrajectory& traj,
                                   ProgressType type, double L_screw);

// Cumulative progress s(t_k); one entry per trajectory sample, starting at 0.
// Throws DegenerateProgress if the total is below kDegenerateProgressTol.
std::vector<double> cumulative_progress(const std::vector<double>& rates,
                                        double dt);

// Resample to n_out poses at equal progress increments via sclerp. Stalled
// progress (repeated values) is deduplicated keeping the first sample.
GeometricTrajectory resample_equidistant(const TemporalTrajectory& traj,
                                         const std::vector<double>& progress,
                                         int n_out, ProgressType type,
                                         double L_screw);

// Gaussian smoothing of positions and of sign-continuous quaternion
// components (renormalized), with a truncated, renormalized kernel at the
// boundaries. sigma = 0 returns the input unchanged.
GeometricTrajectory gaussian_smooth(const GeometricTrajectory& traj,
                                    double sigma);

// Full pipeline: twists, rates, cumulative progress, resampling, smoothing.
GeometricTrajectory reparameterize(const TemporalTrajectory& traj,
                                   ProgressType type, double L_screw,
                                   int n_out = 50, double smooth_sigma = 0.0);

}  // namespace bilts
