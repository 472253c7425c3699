#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bilts/datasets.hpp"
#include "bilts/reparam.hpp"
#include "bilts/similarity.hpp"

namespace bilts {

enum class Measure { Bilts, BiltsPlus, Isa };

const char* to_string(Measure measure);
Measure measure_from_string(const std::string& name);

// 1-NN recognition over a labeled dataset: trajectories from one context act
// as references, the rest are queries. Hyperparameters are picked on a train
// split and reported on the held-out split.
struct RecognitionConfig {
  Measure measure = Measure::BiltsPlus;
  ProgressType progress = ProgressType::ScrewPath;
  std::string reference_context = "original";
  std::vector<double> L_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> xi_grid;     // empty: default grid for the progress type
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0};
  int n_samples = 50;              // equidistant samples per trajectory
  double smooth_sigma = 2.0;       // Gaussian smoothing, in geometric samples
  int band = 0;                    // alignment band half-width, 0 = none
  int jobs = 1;
};

// Window sizes to try for the descriptor spacing xi: meters of progress for
// arclength/screw-path parameterizations, radians for the angle one.
std::vector<double> default_xi_grid(ProgressType progress);

struct ChosenParams {
  double L = 0.5;
  double xi = 0.06;
  double lambda = 1.0;  // ISA only
  double train_rate = 0.0;
};

struct TrialOutcome {
  std::string true_class;
  std::string predicted_class;
  std::string context;
  int trial = 0;
  double distance = 0.0;
  int reference_index = -1;
};

struct RecognitionReport {
  Measure measure = Measure::BiltsPlus;
  ProgressType progress = ProgressType::ScrewPath;
  ChosenParams params;
  int n_test = 0;
  int n_correct = 0;
  double recognition_rate = 0.0;
  // confusion[true_class][predicted_class] = count
  std::map<std::string, std::map<std::string, int>> confusion;
  std::vector<TrialOutcome> outcomes;
  int failed_distances = 0;  // query/reference pairs whose distance blew up
};

struct ProtocolSplit {
  std::vector<TrajectoryRecord> references;  // all trials, reference context
  std::vector<TrajectoryRecord> train;  // other contexts, first two trials
  std::vector<TrajectoryRecord> test;   // other contexts, remaining trials
};

// Throws ProtocolError when the reference context is missing or a class has
// no reference trial.
ProtocolSplit split_by_protocol(const std::vector<TrajectoryRecord>& records,
                                const std::string& reference_context);

// Nearest reference by the requested measure. Distances that cannot be
// evaluated (singular samples, too-short overlap) count as +infinity; ties
// resolve toward the lowest reference index. Returns {label, distance}.
std::pair<std::string, double> classify_1nn(
    const GeometricTrajectory& query,
    const std::vector<std::pair<GeometricTrajectory, std::string>>& references,
    Measure measure, const MeasureParams& params, double lambda = 1.0);

// Exhaustive search over (L, xi) — or (L, lambda) for the ISA measure —
// maximizing the 1-NN rate of `train` against `references`. Ties resolve
// toward the smallest L, then the smallest xi/lambda.
ChosenParams grid_search(const std::vector<TrajectoryRecord>& references,
                         const std::vector<TrajectoryRecord>& train,
                         const RecognitionConfig& config);

// Classify every test record against the references at fixed parameters.
RecognitionReport evaluate(const std::vector<TrajectoryRecord>& references,
                           const std::vector<TrajectoryRecord>& test,
                           const RecognitionConfig& config,
                           const ChosenParams& params);

void write_report_json(const RecognitionReport& report,
                       const std::string& path);
void write_confusion_csv(const RecognitionReport& report,
                         const std::string& path);

}  // namespace bilts
