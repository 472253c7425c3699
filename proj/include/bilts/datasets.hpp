#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bilts/reparam.hpp"

namespace bilts {

// Motion classes of the synthetic benchmark: three translations, two
// rotations, and two screw motions of opposite pitch sign.
enum class MotionClass {
  Linear,
  Circular,
  Helical,
  FixedAxisRotation,
  PrecessionRotation,
  ScrewPosPitch,
  ScrewNegPitch,
};

inline constexpr MotionClass kAllMotionClasses[] = {
    MotionClass::Linear,          MotionClass::Circular,
    MotionClass::Helical,         MotionClass::FixedAxisRotation,
    MotionClass::PrecessionRotation, MotionClass::ScrewPosPitch,
    MotionClass::ScrewNegPitch,
};

const char* to_string(MotionClass c);
MotionClass motion_class_from_string(const std::string& s);

struct SynConfig {
  double duration = 5.0;        // [s]
  double dt = 0.01;             // [s]
  double radius = 0.25;         // circle radius / axis offset [m]
  double angular_rate = 1.0;    // [rad/s]
  double linear_rate = 0.2;     // [m/s]
  double pitch = 0.15;          // screw pitch [m/rad]
  double cone_angle = 0.35;     // precession cone half-angle [rad]
  double noise_std_rot = 0.015;   // velocity noise intensity [rad/s/sqrt(s)]
  double noise_std_trans = 0.00375;  // velocity noise intensity [m/s/sqrt(s)]
  int trials_per_context = 4;
  int n_contexts = 3;           // context 0 is the identity ("original")
  std::uint64_t seed = 12345;
};

struct TrajectoryRecord {
  TemporalTrajectory trajectory;
  std::string class_label;
  std::string context_label;
  int trial = 0;
  std::uint64_t seed = 0;
};

// Deterministic per-trial seed derived from the dataset seed.
std::uint64_t trial_seed(std::uint64_t dataset_seed, int class_index,
                         int context_index, int trial_index);

// One noisy trajectory of a class: the closed-form clean motion with
// integrated velocity-level white noise (a Brownian velocity perturbation,
// integrated once more into the pose stream). Deterministic given the seed.
TemporalTrajectory generate_class(MotionClass c, const SynConfig& cfg,
                                  std::uint64_t seed);

// Change of world and body reference frames: every pose T becomes a * T * b.
TemporalTrajectory apply_context(const TemporalTrajectory& traj, const Pose& a,
                                 const Pose& b);

// Context frame changes drawn from the dataset seed; entry 0 is the identity
// pair. Rotations are uniform on SO(3); world-frame positions are uniform in
// a 1 m box, body-frame positions in a 0.2 m box (a new reference point must
// stay on the tracked object, within the descriptor length scale).
std::vector<std::pair<Pose, Pose>> make_contexts(const SynConfig& cfg);

// Name of context i: "original" for 0, else "frames_<i>".
std::string context_label(int context_index);

// The full benchmark: every class x context x trial.
std::vector<TrajectoryRecord> generate_syn(const SynConfig& cfg);

// Trajectory files: CSV "t,px,py,pz,qw,qx,qy,qz" with >= 15 significant
// digits plus a JSON sidecar (same basename, .json) carrying class, context,
// trial, dt, and seed. Writes are atomic (temp file + rename).
void write_trajectory(const TrajectoryRecord& rec, const std::string& csv_path);
TrajectoryRecord read_trajectory(const std::string& csv_path);

// CSV alone, no sidecar required: labels stay empty and dt is derived from
// the time column (which must increase uniformly).
TrajectoryRecord read_trajectory_csv(const std::string& csv_path);

// Dataset directory layout: <dir>/<class>/<context>/trial_<n>.csv plus a
// manifest.json listing all records.
void write_dataset(const std::vector<TrajectoryRecord>& records,
                   const SynConfig& cfg, const std::string& dir);
std::vector<TrajectoryRecord> read_dataset(const std::string& dir);

// SYN generator config from a JSON file; unknown keys are rejected.
SynConfig load_syn_config(const std::string& path);
void validate(const SynConfig& cfg);

}  // namespace bilts
