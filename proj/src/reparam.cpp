#include "bilts/reparam.hpp"

#include <algorithm>
#include <cmath>

#include "bilts/errors.hpp"

namespace bilts {

const char* to_string(ProgressType p) {
  switch (p) {
    case ProgressType::Arclength: return "arclength";
    case ProgressType::Angle: return "angle";
    case ProgressType::ScrewPath: return "screw_path";
  }
  return "unknown";
}

ProgressType progress_from_string(const std::string& s) {
  if (s == "arclength") return ProgressType::Arclength;
  if (s == "angle") return ProgressType::Angle;
  if (s == "screw_path" || s == "screw") return ProgressType::ScrewPath;
  throw Error("unknown progress type: " + s);
}

std::vector<ScrewTwist> temporal_twists(const TemporalTrajectory& traj) {
  if (traj.samples.size() < 3)
    throw std::invalid_argument("temporal trajectory needs at least 3 samples");
  if (!(traj.dt > 0.0))
    throw std::invalid_argument("temporal trajectory needs dt > 0");
  std::vector<ScrewTwist> twists;
  twists.reserve(traj.samples.size() - 1);
  for (size_t j = 0; j + 1 < traj.samples.size(); ++j)
    twists.push_back(se3_log(traj.samples[j], traj.samples[j + 1], traj.dt));
  return twists;
}

Eigen::Vector3d regulated_isa_velocity(const ScrewTwist& tw,
                                       const Eigen::Vector3d& body_position,
                                       double L_screw) {
  const double wn = tw.omega.norm();
  if (wn <= kPureTranslationTol) return tw.vel;
  const Eigen::Vector3d dir = tw.omega / wn;
  // Point of the screw axis closest to the body origin.
  const Eigen::Vector3d foot = tw.omega.cross(tw.vel) / (wn * wn);
  const Eigen::Vector3d perp =
      (foot - body_position) -
      dir * dir.dot(foot - body_position);  // body origin -> axis
  Eigen::Vector3d offset = perp;
  const double dist = perp.norm();
  if (dist > L_screw && dist > 0.0) offset *= L_screw / dist;
  // Velocity of the point at the (regulated) axis location. On the axis this
  // is exactly the translational velocity along the ISA; when the axis is far
  // away it degrades gracefully toward the body origin's velocity.
  return tw.vel + tw.omega.cross(body_position + offset);
}

std::vector<double> progress_rates(const std::vector<ScrewTwist>& twists,
                                   const TemporalTrajectory& traj,
                                   ProgressType type, double L_screw) {
  if (twists.size() + 1 != traj.samples.size())
    throw std::invalid_argument("twist count must be sample count - 1");
  std::vector<double> rates(twists.size());
  for (size_t j = 0; j < twists.size(); ++j) {
    switch (type) {
      case ProgressType::Arclength:
        rates[j] = (traj.samples[j + 1].position - traj.samples[j].position)
                       .norm() /
                   traj.dt;
        break;
      case ProgressType::Angle:
        rates[j] = twists[j].omega.norm();
        break;
      case ProgressType::ScrewPath: {
        if (!(L_screw > 0.0))
          throw std::invalid_argument("screw path progress needs L_screw > 0");
        const Eigen::Vector3d v_isa = regulated_isa_velocity(
            twists[j], traj.samples[j].position, L_screw);
        rates[j] = twists[j].omega.norm() + v_isa.norm() / L_screw;
        break;
      }
    }
  }
  return rates;
}

std::vector<double> cumulative_progress(const std::vector<double>& rates,
                                        double dt) {
  std::vector<double> s(rates.size() + 1);
  s[0] = 0.0;
  for (size_t k = 0; k < rates.size(); ++k) s[k + 1] = s[k] + rates[k] * dt;
  if (s.back() < kDegenerateProgressTol)
    throw DegenerateProgress("total progress below tolerance");
  return s;
}

GeometricTrajectory resample_equidistant(const TemporalTrajectory& traj,
                                         const std::vector<double>& progress,
                                         int n_out, ProgressType type,
                                         double L_screw) {
  if (n_out < 3) throw std::invalid_argument("n_out must be at least 3");
  if (progress.size() != traj.samples.size())
    throw std::invalid_argument("progress values must match sample count");

  // Drop stalled samples so progress is strictly increasing.
  std::vector<size_t> kept;
  kept.reserve(progress.size());
  for (size_t i = 0; i < progress.size(); ++i)
    if (kept.empty() || progress[i] > progress[kept.back()]) kept.push_back(i);
  if (kept.size() < 2)
    throw DegenerateProgress("progress does not advance");

  const double total = progress[kept.back()];
  if (total < kDegenerateProgressTol)
    throw DegenerateProgress("total progress below tolerance");

  GeometricTrajectory out;
  out.ds = total / (n_out - 1);
  out.progress_type = type;
  out.L_screw = L_screw;
  out.samples.reserve(n_out);

  size_t j = 0;  // bracket index into kept
  for (int i = 0; i < n_out; ++i) {
    if (i == 0) {
      out.samples.push_back(traj.samples[kept.front()]);
      continue;
    }
    if (i == n_out - 1) {
      out.samples.push_back(traj.samples[kept.back()]);
      continue;
    }
    const double target = total * i / (n_out - 1);
    while (j + 2 < kept.size() && progress[kept[j + 1]] < target) ++j;
    const double s0 = progress[kept[j]];
    const double s1 = progress[kept[j + 1]];
    const double u = (target - s0) / (s1 - s0);
    out.samples.push_back(
        sclerp(traj.samples[kept[j]], traj.samples[kept[j + 1]], u));
  }
  return out;
}

GeometricTrajectory gaussian_smooth(const GeometricTrajectory& traj,
                                    double sigma) {
  if (sigma <= 0.0) return traj;
  const int n = static_cast<int>(traj.samples.size());
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * half + 1);
  for (int i = -half; i <= half; ++i)
    kernel[i + half] = std::exp(-0.5 * i * i / (sigma * sigma));

  // Sign-continuous quaternion components (w, x, y, z).
  std::vector<Eigen::Vector4d> quats(n);
  Eigen::Quaterniond prev_q;
  for (int k = 0; k < n; ++k) {
    Eigen::Quaterniond q(traj.samples[k].rotation);
    if (k > 0 && q.dot(prev_q) < 0.0) q.coeffs() *= -1.0;
    prev_q = q;
    quats[k] = Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
  }

  GeometricTrajectory out = traj;
  for (int k = 0; k < n; ++k) {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Vector4d q = Eigen::Vector4d::Zero();
    double wsum = 0.0;
    for (int i = -half; i <= half; ++i) {
      const int idx = k + i;
      if (idx < 0 || idx >= n) continue;  // truncate at the boundaries
      const double w = kernel[i + half];
      wsum += w;
      p += w * traj.samples[idx].position;
      q += w * quats[idx];
    }
    p /= wsum;
    q /= q.norm();
    out.samples[k].position = p;
    out.samples[k].rotation =
        Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
  }
  return out;
}

GeometricTrajectory reparameterize(const TemporalTrajectory& traj,
                                   ProgressType type, double L_screw,
                                   int n_out, double smooth_sigma) {
  const std::vector<ScrewTwist> twists = temporal_twists(traj);
  const std::vector<double> rates = progress_rates(twists, traj, type, L_screw);
  const std::vector<double> s = cumulative_progress(rates, traj.dt);
  GeometricTrajectory geo = resample_equidistant(traj, s, n_out, type, L_screw);
  return gaussian_smooth(geo, smooth_sigma);
}

}  // namespace bilts
