// Command-line front end: dataset generation, pairwise comparison,
// recognition experiments, and segmentation.
//
// Exit codes: 0 success, 1 I/O, 2 configuration/usage, 3 numeric/singular,
// 4 protocol.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bilts/datasets.hpp"
#include "bilts/descriptor.hpp"
#include "bilts/errors.hpp"
#include "bilts/recognition.hpp"
#include "bilts/segmentation.hpp"
#include "bilts/similarity.hpp"

namespace fs = std::filesystem;
using namespace bilts;

namespace {

constexpr const char* kVersion = "bilts 0.1.0 (schema 1)";

struct ExitWith {
  int code;
  std::string message;
};

// Angles on flags accept a "deg" suffix; everything else is radians/meters.
double parse_scalar(const std::string& text, const std::string& flag) {
  std::string body = text;
  double factor = 1.0;
  if (body.size() > 3 && body.substr(body.size() - 3) == "deg") {
    body = body.substr(0, body.size() - 3);
    factor = M_PI / 180.0;
  }
  try {
    size_t used = 0;
    const double value = std::stod(body, &used);
    if (used != body.size()) throw std::invalid_argument("trailing junk");
    return value * factor;
  } catch (const std::exception&) {
    throw ExitWith{2, "invalid value for " + flag + ": " + text};
  }
}

ProgressType parse_progress(const std::string& name) {
  if (name == "arclength") return ProgressType::Arclength;
  if (name == "angle") return ProgressType::Angle;
  if (name == "screw" || name == "screw_path") return ProgressType::ScrewPath;
  throw ExitWith{2, "unknown progress type: " + name +
                        " (want arclength|angle|screw)"};
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream file(tmp);
    if (!file) throw IoError("cannot write: " + path);
    file << text;
    if (!file.good()) throw IoError("failed writing: " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move temp file onto " + path);
}

// ---------------------------------------------------------------- syn-gen

struct SynGenArgs {
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void run_syn_gen(const SynGenArgs& args) {
  SynConfig cfg;
  try {
    if (!args.config.empty()) cfg = load_syn_config(args.config);
    if (args.seed_set) cfg.seed = args.seed;
    validate(cfg);
  } catch (const IoError& e) {
    // Configuration problems (including schema violations) are usage errors.
    throw ExitWith{2, e.what()};
  }

  if (fs::exists(args.out) && !fs::is_empty(args.out))
    throw ExitWith{2, "output directory exists and is not empty: " + args.out};

  const auto records = generate_syn(cfg);

  // Stage into a sibling temp directory, then move into place, so an
  // interrupted run leaves no partial dataset behind.
  const fs::path out(args.out);
  fs::path staging = out;
  staging += ".tmp";
  fs::remove_all(staging);
  try {
    write_dataset(records, cfg, staging.string());
    fs::remove_all(out);
    fs::rename(staging, out);
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }

  int n_classes = static_cast<int>(std::size(kAllMotionClasses));
  std::cout << "wrote " << records.size() << " trajectories (" << n_classes
            << " classes x " << cfg.n_contexts << " contexts x "
            << cfg.trials_per_context << " trials) to " << args.out
            << ", seed " << cfg.seed << "\n";
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string file_a;
  std::string file_b;
  std::string progress = "screw";
  double L = 0.5;
  std::string xi = "0.06";
  bool plus = false;
  int samples = 50;
  double smooth = 0.0;
  int band = 0;
  std::string dump;
};

void run_compare(const CompareArgs& args) {
  const ProgressType progress = parse_progress(args.progress);
  const double xi = parse_scalar(args.xi, "--xi");

  const TrajectoryRecord rec_a = read_trajectory_csv(args.file_a);
  const TrajectoryRecord rec_b = read_trajectory_csv(args.file_b);
  const GeometricTrajectory a = reparameterize(rec_a.trajectory, progress,
                                               args.L, args.samples,
                                               args.smooth);
  const GeometricTrajectory b = reparameterize(rec_b.trajectory, progress,
                                               args.L, args.samples,
                                               args.smooth);

  MeasureParams params;
  params.L = args.L;
  params.xi = xi;
  params.regularize = args.plus;
  params.plus = args.plus;
  params.band = args.band;

  if (args.dump.empty()) {
    std::printf("%.12g\n", trajectory_distance(a, b, params));
    return;
  }

  // With --dump we need the aligned per-pair distances, so run the pipeline
  // by hand: descriptors, alignment, then one row per matched pair.
  DescriptorOptions opts{params.L, params.regularize};
  const auto da = descriptor_sequence(a, progress_scale(xi, a.ds), opts);
  const auto db = descriptor_sequence(b, progress_scale(xi, b.ds), opts);
  if (da.size() < 3 || db.size() < 3)
    throw TooShort("too few descriptor samples to compare trajectories");
  std::vector<SvSummary> sa(da.size()), sb(db.size());
  for (size_t i = 0; i < da.size(); ++i) sa[i] = sv_summary(da[i]);
  for (size_t i = 0; i < db.size(); ++i) sb[i] = sv_summary(db[i]);
  const WeightMatrix w{params.L};
  const AlignmentPath path = dtw_align(sa, sb, w, params.band);

  std::ostringstream csv;
  csv << "index_a,index_b,distance\n";
  double total = 0.0;
  for (const auto& [i, j] : path.pairs) {
    const double d = params.plus ? bilts_plus_distance(da[i], db[j], w)
                                 : bilts_distance(da[i], db[j], w);
    total += d;
    csv << i << ',' << j << ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", d);
    csv << buf << '\n';
  }
  write_text(args.dump, csv.str());
  std::printf("%.12g\n", total / static_cast<double>(path.pairs.size()));
}

// -------------------------------------------------------------- recognize

struct RecognizeArgs {
  std::string dataset;
  std::string reference_context = "original";
  std::string measure = "bilts+";
  std::string progress = "screw";
  bool tune = false;
  double L = 0.5;
  std::string xi = "0.06";
  double lambda = 1.0;
  std::string report = "report.json";
  std::string confusion = "confusion.csv";
  int samples = 50;
  double smooth = 2.0;
  int band = 0;
  int jobs = 1;
};

void run_recognize(const RecognizeArgs& args) {
  RecognitionConfig cfg;
  try {
    cfg.measure = measure_from_string(args.measure);
  } catch (const Error& e) {
    throw ExitWith{2, e.what()};
  }
  cfg.progress = parse_progress(args.progress);
  cfg.reference_context = args.reference_context;
  cfg.n_samples = args.samples;
  cfg.smooth_sigma = args.smooth;
  cfg.band = args.band;
  cfg.jobs = args.jobs;

  const auto records = read_dataset(args.dataset);
  const ProtocolSplit split =
      split_by_protocol(records, args.reference_context);

  ChosenParams params;
  if (args.tune) {
    params = grid_search(split.references, split.train, cfg);
    std::printf("tuned: L=%g xi=%g lambda=%g train_rate=%.4f\n", params.L,
                params.xi, params.lambda, params.train_rate);
  } else {
    params.L = args.L;
    params.xi = parse_scalar(args.xi, "--xi");
    params.lambda = args.lambda;
  }

  const RecognitionReport report =
      evaluate(split.references, split.test, cfg, params);
  write_report_json(report, args.report);
  write_confusion_csv(report, args.confusion);

  std::printf("measure=%s progress=%s L=%g xi=%g lambda=%g\n",
              to_string(report.measure), to_string(report.progress),
              params.L, params.xi, params.lambda);
  std::printf("test rate: %.4f (%d/%d correct, %d failed distances)\n",
              report.recognition_rate, report.n_correct, report.n_test,
              report.failed_distances);
  std::printf("report: %s\nconfusion: %s\n", args.report.c_str(),
              args.confusion.c_str());
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
  std::string file;
  std::string progress = "screw";
  double L = 0.5;
  std::string xi = "0";
  double threshold = 0.0;
  int min_gap = 0;
  bool plus = true;
  int samples = 200;
  double smooth = 0.0;
  std::string signal_out;
  std::string breakpoints_out;
};

void run_segment(const SegmentArgs& args) {
  const ProgressType progress = parse_progress(args.progress);
  const double xi = parse_scalar(args.xi, "--xi");

  const TrajectoryRecord rec = read_trajectory_csv(args.file);
  const GeometricTrajectory traj = reparameterize(
      rec.trajectory, progress, args.L, args.samples, args.smooth);

  SegmentationParams params;
  params.L = args.L;
  params.xi = xi;
  params.plus = args.plus;
  const ShapeChangeSignal signal = shape_change_signal(traj, params);
  const std::vector<int> peaks = segment(signal, args.threshold, args.min_gap);

  const std::string stem = fs::path(args.file).stem().string();
  const std::string signal_path =
      args.signal_out.empty() ? stem + "_signal.csv" : args.signal_out;
  const std::string breaks_path = args.breakpoints_out.empty()
                                      ? stem + "_breakpoints.csv"
                                      : args.breakpoints_out;

  std::ostringstream sig_csv;
  sig_csv << "progress,shape_change\n";
  for (size_t i = 0; i < signal.values.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", signal.progress[i],
                  signal.values[i]);
    sig_csv << buf;
  }
  write_text(signal_path, sig_csv.str());

  std::ostringstream brk_csv;
  brk_csv << "sample_index,progress\n";
  for (int p : peaks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.12g\n", signal.sample_index[p],
                  signal.progress[p]);
    brk_csv << buf;
  }
  write_text(breaks_path, brk_csv.str());

  std::printf("%zu breakpoints", peaks.size());
  for (int p : peaks) std::printf(" %d", signal.sample_index[p]);
  std::printf("\nsignal: %s\nbreakpoints: %s\n", signal_path.c_str(),
              breaks_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-invariant local trajectory-shape similarity toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SynGenArgs syn_args;
  auto* syn = app.add_subcommand(
      "syn-gen", "Generate the synthetic seven-class benchmark dataset");
  syn->add_option("--out", syn_args.out, "Output dataset directory")
      ->required();
  syn->add_option("--config", syn_args.config,
                  "JSON generator configuration file");
  syn->add_option("--seed", syn_args.seed, "Dataset seed (overrides config)")
      ->each([&](const std::string&) { syn_args.seed_set = true; });
  syn->callback([&] { run_syn_gen(syn_args); });

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand(
      "compare", "Distance between the local shapes of two trajectories");
  cmp->add_option("A", cmp_args.file_a, "First trajectory CSV")->required();
  cmp->add_option("B", cmp_args.file_b, "Second trajectory CSV")->required();
  cmp->add_option("--progress", cmp_args.progress,
                  "Geometric progress: arclength|angle|screw");
  cmp->add_option("--L", cmp_args.L, "Rotation/translation weight length [m]");
  cmp->add_option("--xi", cmp_args.xi,
                  "Descriptor window in progress units ('deg' suffix allowed)");
  cmp->add_flag("--plus", cmp_args.plus,
                "Regularized descriptors + rotation-aligned distance");
  cmp->add_option("--samples", cmp_args.samples,
                  "Equidistant samples per trajectory");
  cmp->add_option("--smooth", cmp_args.smooth,
                  "Gaussian smoothing sigma, in geometric samples");
  cmp->add_option("--band", cmp_args.band,
                  "Alignment band half-width (0 = unconstrained)");
  cmp->add_option("--dump", cmp_args.dump,
                  "Write aligned per-pair distances to this CSV");
  cmp->callback([&] { run_compare(cmp_args); });

  RecognizeArgs rec_args;
  auto* rec = app.add_subcommand(
      "recognize", "1-NN motion recognition over a labeled dataset");
  rec->add_option("--dataset", rec_args.dataset, "Dataset directory")
      ->required();
  rec->add_option("--reference-context", rec_args.reference_context,
                  "Context whose trials act as references");
  rec->add_option("--measure", rec_args.measure, "bilts|bilts+|isa");
  rec->add_option("--progress", rec_args.progress,
                  "Geometric progress: arclength|angle|screw");
  rec->add_flag("--tune", rec_args.tune,
                "Grid-search L and xi (or lambda) on the training split");
  rec->add_option("--L", rec_args.L, "Weight length [m] (when not tuning)");
  rec->add_option("--xi", rec_args.xi,
                  "Descriptor window (when not tuning; 'deg' suffix allowed)");
  rec->add_option("--lambda", rec_args.lambda,
                  "Derivative weight for the isa measure (when not tuning)");
  rec->add_option("--report", rec_args.report, "Report JSON path");
  rec->add_option("--confusion", rec_args.confusion,
                  "Confusion matrix CSV path");
  rec->add_option("--samples", rec_args.samples,
                  "Equidistant samples per trajectory");
  rec->add_option("--smooth", rec_args.smooth,
                  "Gaussian smoothing sigma, in geometric samples");
  rec->add_option("--band", rec_args.band,
                  "Alignment band half-width (0 = unconstrained)");
  rec->add_option("--jobs", rec_args.jobs, "Worker threads");
  rec->callback([&] { run_recognize(rec_args); });

  SegmentArgs seg_args;
  auto* seg = app.add_subcommand(
      "segment", "Shape-change signal and breakpoints of one trajectory");
  seg->add_option("FILE", seg_args.file, "Trajectory CSV")->required();
  seg->add_option("--progress", seg_args.progress,
                  "Geometric progress: arclength|angle|screw");
  seg->add_option("--L", seg_args.L, "Rotation/translation weight length [m]");
  seg->add_option("--xi", seg_args.xi,
                  "Descriptor window; 0 uses one progress step");
  seg->add_option("--threshold", seg_args.threshold,
                  "Peak threshold; 0 uses mean + 3*std of the signal");
  seg->add_option("--min-gap", seg_args.min_gap,
                  "Minimum samples between breakpoints; 0 uses the window");
  seg->add_flag("--plus,!--no-plus", seg_args.plus,
                "Regularized descriptors (default on)");
  seg->add_option("--samples", seg_args.samples,
                  "Equidistant samples for the geometric trajectory");
  seg->add_option("--smooth", seg_args.smooth,
                  "Gaussian smoothing sigma, in geometric samples");
  seg->add_option("--signal", seg_args.signal_out, "Signal CSV path");
  seg->add_option("--breakpoints", seg_args.breakpoints_out,
                  "Breakpoint CSV path");
  seg->callback([&] { run_segment(seg_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are configuration errors
  } catch (const ExitWith& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {  // includes schema violations in data files
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {  // numeric/singular family
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
