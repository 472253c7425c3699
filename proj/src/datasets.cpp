#include "bilts/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "bilts/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace bilts {

const char* to_string(MotionClass c) {
  switch (c) {
    case MotionClass::Linear: return "linear";
    case MotionClass::Circular: return "circular";
    case MotionClass::Helical: return "helical";
    case MotionClass::FixedAxisRotation: return "fixed_axis_rotation";
    case MotionClass::PrecessionRotation: return "precession_rotation";
    case MotionClass::ScrewPosPitch: return "screw_pos_pitch";
    case MotionClass::ScrewNegPitch: return "screw_neg_pitch";
  }
  return "unknown";
}

MotionClass motion_class_from_string(const std::string& s) {
  for (MotionClass c : kAllMotionClasses)
    if (s == to_string(c)) return c;
  throw Error("unknown motion class: " + s);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t dataset_seed, int class_index,
                         int context_index, int trial_index) {
  const std::uint64_t key = (static_cast<std::uint64_t>(class_index) << 40) ^
                            (static_cast<std::uint64_t>(context_index) << 20) ^
                            static_cast<std::uint64_t>(trial_index);
  return splitmix64(splitmix64(dataset_seed) ^ key);
}

namespace {

Pose clean_pose(MotionClass c, const SynConfig& cfg, double t) {
  const double a = cfg.angular_rate;
  const double rho = cfg.radius;
  switch (c) {
    case MotionClass::Linear:
      return Pose(Eigen::Matrix3d::Identity(),
                  Eigen::Vector3d(cfg.linear_rate * t, 0.0, 0.0));
    case MotionClass::Circular:
      return Pose(Eigen::Matrix3d::Identity(),
                  rho * Eigen::Vector3d(std::cos(a * t) - 1.0,
                                        std::sin(a * t), 0.0));
    case MotionClass::Helical:
      return Pose(Eigen::Matrix3d::Identity(),
                  Eigen::Vector3d(rho * (std::cos(a * t) - 1.0),
                                  rho * std::sin(a * t), cfg.pitch * a * t));
    case MotionClass::FixedAxisRotation: {
      // Rotation about the vertical axis through (radius, 0, 0).
      const Eigen::Vector3d w(0.0, 0.0, a);
      const Eigen::Vector3d axis_point(rho, 0.0, 0.0);
      return se3_exp(ScrewTwist(w, -w.cross(axis_point)), t);
    }
    case MotionClass::PrecessionRotation: {
      // Spin about a tilted axis carried around the vertical axis.
      const Eigen::Vector3d spin =
          2.0 * a * Eigen::Vector3d(std::sin(cfg.cone_angle), 0.0,
                                    std::cos(cfg.cone_angle));
      const Pose precession =
          se3_exp(ScrewTwist(Eigen::Vector3d(0.0, 0.0, a),
                             Eigen::Vector3d::Zero()), t);
      const Pose rotation =
          se3_exp(ScrewTwist(spin, Eigen::Vector3d::Zero()), t);
      return compose(precession, rotation);
    }
    case MotionClass::ScrewPosPitch:
    case MotionClass::ScrewNegPitch: {
      const double pitch =
          c == MotionClass::ScrewPosPitch ? cfg.pitch : -cfg.pitch;
      const Eigen::Vector3d w(0.0, 0.0, a);
      const Eigen::Vector3d axis_point(rho, 0.0, 0.0);
      return se3_exp(
          ScrewTwist(w, -w.cross(axis_point) + pitch * a *
                            Eigen::Vector3d(0.0, 0.0, 1.0)),
          t);
    }
  }
  return Pose();
}

}  // namespace

TemporalTrajectory generate_class(MotionClass c, const SynConfig& cfg,
                                  std::uint64_t seed) {
  validate(cfg);
  const int n = static_cast<int>(std::lround(cfg.duration / cfg.dt)) + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sqrt_dt = std::sqrt(cfg.dt);

  TemporalTrajectory traj;
  traj.dt = cfg.dt;
  traj.samples.reserve(n);
  traj.metadata["class"] = to_string(c);

  // Brownian velocity perturbation, integrated into a drifting pose offset.
  Eigen::Vector3d w_rot = Eigen::Vector3d::Zero();
  Eigen::Vector3d w_trans = Eigen::Vector3d::Zero();
  Pose offset;
  for (int k = 0; k < n; ++k) {
    traj.samples.push_back(compose(offset, clean_pose(c, cfg, k * cfg.dt)));
    for (int i = 0; i < 3; ++i) {
      w_rot(i) += cfg.noise_std_rot * sqrt_dt * gauss(rng);
      w_trans(i) += cfg.noise_std_trans * sqrt_dt * gauss(rng);
    }
    offset = compose(se3_exp(ScrewTwist(w_rot, w_trans), cfg.dt), offset);
  }
  return traj;
}

TemporalTrajectory apply_context(const TemporalTrajectory& traj, const Pose& a,
                                 const Pose& b) {
  TemporalTrajectory out = traj;
  for (Pose& s : out.samples) s = compose(a, compose(s, b));
  return out;
}

namespace {

Pose random_frame(std::mt19937_64& rng, double box_half_width) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  std::uniform_real_distribution<double> box(-box_half_width, box_half_width);
  const Eigen::Vector3d p(box(rng), box(rng), box(rng));
  return Pose(q.toRotationMatrix(), p);
}

}  // namespace

std::vector<std::pair<Pose, Pose>> make_contexts(const SynConfig& cfg) {
  std::vector<std::pair<Pose, Pose>> contexts;
  contexts.emplace_back(Pose(), Pose());
  std::mt19937_64 rng(splitmix64(cfg.seed));
  for (int i = 1; i < cfg.n_contexts; ++i) {
    // World frames move freely; body frames only relocate the tracked
    // reference point within the object's extent (~radius), keeping it inside
    // the default descriptor length scale so origin regularization stays idle.
    const Pose a = random_frame(rng, 0.5);
    const Pose b = random_frame(rng, 0.1);
    contexts.emplace_back(a, b);
  }
  return contexts;
}

std::string context_label(int context_index) {
  return context_index == 0 ? "original"
                            : "frames_" + std::to_string(context_index);
}

std::vector<TrajectoryRecord> generate_syn(const SynConfig& cfg) {
  validate(cfg);
  const auto contexts = make_contexts(cfg);
  std::vector<TrajectoryRecord> records;
  int ci = 0;
  for (MotionClass c : kAllMotionClasses) {
    for (int xi = 0; xi < cfg.n_contexts; ++xi) {
      for (int ti = 0; ti < cfg.trials_per_context; ++ti) {
        TrajectoryRecord rec;
        rec.seed = trial_seed(cfg.seed, ci, xi, ti);
        rec.class_label = to_string(c);
        rec.context_label = context_label(xi);
        rec.trial = ti;
        rec.trajectory = apply_context(generate_class(c, cfg, rec.seed),
                                       contexts[xi].first,
                                       contexts[xi].second);
        records.push_back(std::move(rec));
      }
    }
    ++ci;
  }
  return records;
}

namespace {

std::string sidecar_path(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

void write_trajectory(const TrajectoryRecord& rec, const std::string& csv_path) {
  std::ostringstream csv;
  csv << "t,px,py,pz,qw,qx,qy,qz\n";
  char buf[512];
  Eigen::Quaterniond prev;
  for (size_t k = 0; k < rec.trajectory.samples.size(); ++k) {
    const Pose& pose = rec.trajectory.samples[k];
    Eigen::Quaterniond q(pose.rotation);
    if (k > 0 && q.dot(prev) < 0.0) q.coeffs() *= -1.0;
    prev = q;
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  k * rec.trajectory.dt, pose.position.x(), pose.position.y(),
                  pose.position.z(), q.w(), q.x(), q.y(), q.z());
    csv << buf;
  }
  atomic_write(csv_path, csv.str());

  json sidecar = {
      {"class", rec.class_label}, {"context", rec.context_label},
      {"trial", rec.trial},       {"dt", rec.trajectory.dt},
      {"seed", rec.seed},
  };
  atomic_write(sidecar_path(csv_path), sidecar.dump(2) + "\n");
}

TrajectoryRecord read_trajectory_csv(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open trajectory file: " + csv_path);

  TrajectoryRecord rec;
  std::vector<double> times;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 0);
  ++line_no;
  if (line.rfind("t,px,py,pz,qw,qx,qy,qz", 0) != 0)
    throw ParseError("unexpected header, want t,px,py,pz,qw,qx,qy,qz", line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    double f[8];
    char comma = ',';
    bool ok = true;
    for (int i = 0; i < 8 && ok; ++i) {
      if (!(row >> f[i])) ok = false;
      if (ok && i < 7 && !((row >> comma) && comma == ',')) ok = false;
    }
    if (!ok) throw ParseError("malformed row", line_no);
    Eigen::Quaterniond q(f[4], f[5], f[6], f[7]);
    if (std::abs(q.norm() - 1.0) > 1e-6)
      throw SchemaError("non-unit quaternion at line " +
                        std::to_string(line_no) + " of " + csv_path);
    q.normalize();
    Pose pose(q.toRotationMatrix(), Eigen::Vector3d(f[1], f[2], f[3]));
    rec.trajectory.samples.push_back(pose);
    times.push_back(f[0]);
  }
  if (rec.trajectory.samples.size() < 3)
    throw SchemaError("trajectory needs at least 3 samples: " + csv_path);

  const double span = times.back() - times.front();
  const double dt = span / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0))
    throw SchemaError("time column must increase: " + csv_path);
  for (size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * std::max(1.0, dt))
      throw SchemaError("time column must be uniformly spaced: " + csv_path);
  rec.trajectory.dt = dt;
  rec.trajectory.metadata["source"] = csv_path;
  return rec;
}

TrajectoryRecord read_trajectory(const std::string& csv_path) {
  TrajectoryRecord rec = read_trajectory_csv(csv_path);

  std::ifstream side(sidecar_path(csv_path));
  if (!side) throw IoError("missing sidecar: " + sidecar_path(csv_path));
  json meta;
  try {
    side >> meta;
  } catch (const json::exception& e) {
    throw SchemaError("invalid sidecar json: " + std::string(e.what()));
  }
  std::string missing;
  for (const char* key : {"class", "context", "trial", "dt", "seed"})
    if (!meta.contains(key)) missing += std::string(missing.empty() ? "" : ", ") + key;
  if (!missing.empty())
    throw SchemaError("sidecar missing fields: " + missing);
  rec.class_label = meta["class"].get<std::string>();
  rec.context_label = meta["context"].get<std::string>();
  rec.trial = meta["trial"].get<int>();
  rec.trajectory.dt = meta["dt"].get<double>();
  rec.seed = meta["seed"].get<std::uint64_t>();
  if (!(rec.trajectory.dt > 0.0)) throw SchemaError("sidecar dt must be > 0");
  rec.trajectory.metadata["source"] = csv_path;
  return rec;
}

namespace {

json config_to_json(const SynConfig& cfg) {
  return json{{"duration", cfg.duration},
              {"dt", cfg.dt},
              {"radius", cfg.radius},
              {"angular_rate", cfg.angular_rate},
              {"linear_rate", cfg.linear_rate},
              {"pitch", cfg.pitch},
              {"cone_angle", cfg.cone_angle},
              {"noise_std_rot", cfg.noise_std_rot},
              {"noise_std_trans", cfg.noise_std_trans},
              {"trials_per_context", cfg.trials_per_context},
              {"n_contexts", cfg.n_contexts},
              {"seed", cfg.seed}};
}

}  // namespace

void write_dataset(const std::vector<TrajectoryRecord>& records,
                   const SynConfig& cfg, const std::string& dir) {
  json manifest;
  manifest["schema_version"] = 1;
  manifest["seed"] = cfg.seed;
  manifest["config"] = config_to_json(cfg);
  manifest["records"] = json::array();
  for (const TrajectoryRecord& rec : records) {
    const std::string rel = rec.class_label + "/" + rec.context_label +
                            "/trial_" + std::to_string(rec.trial) + ".csv";
    write_trajectory(rec, (fs::path(dir) / rel).string());
    manifest["records"].push_back({{"path", rel},
                                   {"class", rec.class_label},
                                   {"context", rec.context_label},
                                   {"trial", rec.trial},
                                   {"seed", rec.seed}});
  }
  atomic_write((fs::path(dir) / "manifest.json").string(),
               manifest.dump(2) + "\n");
}

std::vector<TrajectoryRecord> read_dataset(const std::string& dir) {
  std::vector<TrajectoryRecord> records;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json manifest;
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw SchemaError("invalid manifest json: " + std::string(e.what()));
    }
    if (!manifest.contains("records"))
      throw SchemaError("manifest missing records");
    for (const json& r : manifest["records"])
      records.push_back(
          read_trajectory((fs::path(dir) / r["path"].get<std::string>())
                              .string()));
    return records;
  }
  if (!fs::is_directory(dir)) throw IoError("dataset directory not found: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  for (const std::string& p : paths) records.push_back(read_trajectory(p));
  if (records.empty()) throw IoError("no trajectory files under " + dir);
  return records;
}

SynConfig load_syn_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("invalid config json: " + std::string(e.what()));
  }
  SynConfig cfg;
  const json defaults = config_to_json(cfg);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw SchemaError("unknown config key: " + key);
    (void)value;
  }
  cfg.duration = j.value("duration", cfg.duration);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.radius = j.value("radius", cfg.radius);
  cfg.angular_rate = j.value("angular_rate", cfg.angular_rate);
  cfg.linear_rate = j.value("linear_rate", cfg.linear_rate);
  cfg.pitch = j.value("pitch", cfg.pitch);
  cfg.cone_angle = j.value("cone_angle", cfg.cone_angle);
  cfg.noise_std_rot = j.value("noise_std_rot", cfg.noise_std_rot);
  cfg.noise_std_trans = j.value("noise_std_trans", cfg.noise_std_trans);
  cfg.trials_per_context = j.value("trials_per_context", cfg.trials_per_context);
  cfg.n_contexts = j.value("n_contexts", cfg.n_contexts);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

void validate(const SynConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw SchemaError("config field dt must be > 0");
  if (!(cfg.duration >= 10.0 * cfg.dt))
    throw SchemaError("config field duration must be at least 10*dt");
  if (cfg.trials_per_context < 1)
    throw SchemaError("config field trials_per_context must be >= 1");
  if (cfg.n_contexts < 1)
    throw SchemaError("config field n_contexts must be >= 1");
  if (cfg.noise_std_rot < 0.0 || cfg.noise_std_trans < 0.0)
    throw SchemaError("config noise fields must be >= 0");
  if (!(cfg.radius > 0.0)) throw SchemaError("config field radius must be > 0");
}

}  // namespace bilts
