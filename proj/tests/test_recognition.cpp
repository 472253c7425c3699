#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "bilts/datasets.hpp"
#include "bilts/errors.hpp"
#include "bilts/recognition.hpp"
#include "bilts/reparam.hpp"
#include "util.hpp"

using namespace bilts;
namespace fs = std::filesystem;

namespace {

SynConfig tiny_config() {
  SynConfig cfg;
  cfg.duration = 2.0;
  cfg.dt = 0.01;
  cfg.trials_per_context = 3;
  cfg.n_contexts = 2;
  cfg.noise_std_rot = 0.0;
  cfg.noise_std_trans = 0.0;
  cfg.seed = 2024;
  return cfg;
}

}  // namespace

TEST_CASE("measure names roundtrip") {
  CHECK(measure_from_string(to_string(Measure::Bilts)) == Measure::Bilts);
  CHECK(measure_from_string(to_string(Measure::BiltsPlus)) ==
        Measure::BiltsPlus);
  CHECK(measure_from_string(to_string(Measure::Isa)) == Measure::Isa);
  CHECK_THROWS_AS((void)measure_from_string("cosine"), Error);
}

TEST_CASE("default window grids exist for every progress type") {
  for (ProgressType p : {ProgressType::Arclength, ProgressType::Angle,
                         ProgressType::ScrewPath}) {
    const auto grid = default_xi_grid(p);
    CHECK(!grid.empty());
    for (double x : grid) CHECK(x > 0.0);
  }
}

TEST_CASE("protocol split: all reference trials, two train trials per class") {
  const auto records = generate_syn(tiny_config());
  const ProtocolSplit split = split_by_protocol(records, "original");
  // 7 classes x 3 trials references; 7 x 1 non-reference context: 2 train,
  // 1 test each.
  CHECK(split.references.size() == 21);
  CHECK(split.train.size() == 14);
  CHECK(split.test.size() == 7);
  for (const auto& r : split.references) CHECK(r.context_label == "original");
  for (const auto& r : split.train) {
    CHECK(r.context_label != "original");
    CHECK(r.trial < 2);
  }
  for (const auto& r : split.test) {
    CHECK(r.context_label != "original");
    CHECK(r.trial >= 2);
  }

  CHECK_THROWS_AS((void)split_by_protocol(records, "no_such_context"),
                  ProtocolError);
  CHECK_THROWS_AS((void)split_by_protocol({}, "original"), ProtocolError);
}

TEST_CASE("protocol split needs train and test material") {
  SynConfig cfg = tiny_config();
  cfg.n_contexts = 1;  // reference context only: nothing to classify
  const auto records = generate_syn(cfg);
  CHECK_THROWS_AS((void)split_by_protocol(records, "original"),
                  ProtocolError);
}

TEST_CASE("1-NN picks the identical reference and breaks ties low") {
  std::mt19937_64 rng(600);
  const testutil::TwoExpCurve c1 = testutil::random_curve(rng);
  const testutil::TwoExpCurve c2 = testutil::random_curve(rng);
  const GeometricTrajectory t1 = c1.sample(0.0, 1.0, 40);
  const GeometricTrajectory t2 = c2.sample(0.0, 1.0, 40);

  MeasureParams p;
  p.L = 0.5;
  p.xi = 3.0 * t1.ds;
  p.regularize = true;
  p.plus = true;

  std::vector<std::pair<GeometricTrajectory, std::string>> refs;
  refs.emplace_back(t2, "other");
  refs.emplace_back(t1, "self");
  refs.emplace_back(t1, "self_copy");  // duplicate: tie goes to lower index

  const auto [label, dist] =
      classify_1nn(t1, refs, Measure::BiltsPlus, p);
  CHECK(label == "self");
  CHECK(dist < 1e-12);
}

TEST_CASE("1-NN turns evaluation failures into +infinity, not aborts") {
  // A straight-line trajectory is rotationally singular: the unregularized
  // measure cannot evaluate it against anything.
  GeometricTrajectory line;
  line.ds = 0.02;
  for (int i = 0; i < 30; ++i)
    line.samples.emplace_back(Eigen::Matrix3d::Identity(),
                            Eigen::Vector3d(0.02 * i, 0.0, 0.0));

  std::mt19937_64 rng(601);
  const GeometricTrajectory curve =
      testutil::random_curve(rng).sample(0.0, 1.0, 40);

  MeasureParams p;
  p.L = 0.5;
  p.xi = 2.0 * line.ds;
  p.regularize = false;  // raw measure: singular samples throw inside
  p.plus = false;

  std::vector<std::pair<GeometricTrajectory, std::string>> refs;
  refs.emplace_back(curve, "curve");
  const auto [label, dist] = classify_1nn(line, refs, Measure::Bilts, p);
  CHECK(label == "curve");  // still the nearest of what exists
  CHECK(std::isinf(dist));
}

TEST_CASE("grid search on a single cell returns that cell") {
  const auto records = generate_syn(tiny_config());
  const ProtocolSplit split = split_by_protocol(records, "original");

  RecognitionConfig cfg;
  cfg.measure = Measure::BiltsPlus;
  cfg.progress = ProgressType::ScrewPath;
  cfg.L_grid = {0.5};
  cfg.xi_grid = {0.06};
  cfg.n_samples = 40;
  cfg.smooth_sigma = 0.0;
  cfg.jobs = 2;

  const ChosenParams chosen = grid_search(split.references, split.train, cfg);
  CHECK(chosen.L == doctest::Approx(0.5));
  CHECK(chosen.xi == doctest::Approx(0.06));
  CHECK(chosen.train_rate > 0.9);  // noiseless: should be perfect or near it

  const RecognitionReport report =
      evaluate(split.references, split.test, cfg, chosen);
  CHECK(report.n_test == 7);
  CHECK(report.recognition_rate ==
        doctest::Approx(double(report.n_correct) / report.n_test));

  // Confusion matrix totals match the outcome list.
  int confusion_total = 0;
  for (const auto& [truth, row] : report.confusion)
    for (const auto& [pred, count] : row) confusion_total += count;
  CHECK(confusion_total == report.n_test);
  CHECK(report.outcomes.size() == static_cast<size_t>(report.n_test));
  for (const auto& o : report.outcomes) {
    CHECK(!o.true_class.empty());
    CHECK(!o.predicted_class.empty());
  }
  // Noiseless data, self-consistent split: recognition should be perfect.
  CHECK(report.n_correct == report.n_test);
}

TEST_CASE("evaluating the references against themselves is perfect") {
  const auto records = generate_syn(tiny_config());
  const ProtocolSplit split = split_by_protocol(records, "original");

  RecognitionConfig cfg;
  cfg.measure = Measure::BiltsPlus;
  cfg.n_samples = 40;
  cfg.smooth_sigma = 0.0;
  cfg.jobs = 2;

  ChosenParams params;
  params.L = 0.5;
  params.xi = 0.06;

  const RecognitionReport report =
      evaluate(split.references, split.references, cfg, params);
  CHECK(report.recognition_rate == doctest::Approx(1.0));
  CHECK(report.failed_distances >= 0);
}

TEST_CASE("raw measure fails over to +infinity on singular classes") {
  // Noiseless translations carry no rotation, so the unregularized
  // decomposition cannot produce descriptors for them; the protocol records
  // failed distances instead of aborting.
  const auto records = generate_syn(tiny_config());
  const ProtocolSplit split = split_by_protocol(records, "original");

  RecognitionConfig cfg;
  cfg.measure = Measure::Bilts;
  cfg.n_samples = 40;
  cfg.smooth_sigma = 0.0;
  cfg.jobs = 2;

  ChosenParams params;
  params.L = 0.5;
  params.xi = 0.06;

  const RecognitionReport report =
      evaluate(split.references, split.references, cfg, params);
  CHECK(report.failed_distances > 0);
  CHECK(report.n_test == 21);
  CHECK(static_cast<int>(report.outcomes.size()) == report.n_test);
}

TEST_CASE("ISA measure runs the same protocol end to end") {
  const auto records = generate_syn(tiny_config());
  const ProtocolSplit split = split_by_protocol(records, "original");

  RecognitionConfig cfg;
  cfg.measure = Measure::Isa;
  cfg.L_grid = {0.5};
  cfg.lambda_grid = {1e-2, 1.0};
  cfg.n_samples = 40;
  cfg.smooth_sigma = 0.0;
  cfg.jobs = 2;

  const ChosenParams chosen = grid_search(split.references, split.train, cfg);
  CHECK((chosen.lambda == doctest::Approx(1e-2) ||
         chosen.lambda == doctest::Approx(1.0)));
  const RecognitionReport report =
      evaluate(split.references, split.test, cfg, chosen);
  CHECK(report.n_test == 7);
  // The rotation-free classes are singular for the ISA invariants; those
  // distances fail over to +infinity rather than aborting the run.
  CHECK(report.n_correct >= 0);
}

TEST_CASE("report files are written and well-formed") {
  const auto records = generate_syn(tiny_config());
  const ProtocolSplit split = split_by_protocol(records, "original");

  RecognitionConfig cfg;
  cfg.n_samples = 40;
  cfg.smooth_sigma = 0.0;
  ChosenParams params;

  const RecognitionReport report =
      evaluate(split.references, split.test, cfg, params);

  const fs::path dir =
      fs::temp_directory_path() /
      ("bilts_recog_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string report_path = (dir / "report.json").string();
  const std::string confusion_path = (dir / "confusion.csv").string();
  write_report_json(report, report_path);
  write_confusion_csv(report, confusion_path);

  std::ifstream rj(report_path);
  REQUIRE(rj.good());
  std::string body((std::istreambuf_iterator<char>(rj)),
                   std::istreambuf_iterator<char>());
  CHECK(body.find("recognition_rate") != std::string::npos);
  CHECK(body.find("confusion") != std::string::npos);

  std::ifstream cc(confusion_path);
  REQUIRE(cc.good());
  std::string header;
  std::getline(cc, header);
  CHECK(header.find("linear") != std::string::npos);

  std::error_code ec;
  fs::remove_all(dir, ec);
}
