#include "bilts/recognition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bilts/descriptor.hpp"
#include "bilts/errors.hpp"

namespace bilts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

// Everything a distance evaluation needs, precomputed once per trajectory.
// ok = false marks trajectories whose features cannot be formed at these
// parameters; every distance involving them counts as +infinity.
struct Features {
  bool ok = false;
  std::vector<ShapeDescriptor> desc;
  std::vector<SvSummary> sum;
  std::vector<Vector6d> inv;
};

Features features_of(const TemporalTrajectory& traj,
                     const RecognitionConfig& cfg, double L, double xi) {
  Features f;
  try {
    const GeometricTrajectory g = reparameterize(
        traj, cfg.progress, L, cfg.n_samples, cfg.smooth_sigma);
    if (cfg.measure == Measure::Isa) {
      // The functional-frame invariants are differential quantities; they use
      // the finest window rather than the descriptor spacing xi.
      f.inv = isa_invariant_sequence(g, 1);
      if (f.inv.empty()) return f;
    } else {
      DescriptorOptions opts;
      opts.L = L;
      opts.regularize = cfg.measure == Measure::BiltsPlus;
      f.desc = descriptor_sequence(g, progress_scale(xi, g.ds), opts);
      if (f.desc.size() < 3) return f;
      f.sum.reserve(f.desc.size());
      for (const auto& d : f.desc) f.sum.push_back(sv_summary(d));
    }
    f.ok = true;
  } catch (const Error&) {
    // leave ok = false
  }
  return f;
}

double feature_distance(const Features& a, const Features& b,
                        const RecognitionConfig& cfg, double L, double lambda) {
  if (!a.ok || !b.ok) return kInf;
  try {
    if (cfg.measure == Measure::Isa)
      return isa_distance(a.inv, b.inv, L, lambda, cfg.band);
    const WeightMatrix w{L};
    const AlignmentPath path = dtw_align(a.sum, b.sum, w, cfg.band);
    double sum = 0.0;
    for (const auto& [i, j] : path.pairs)
      sum += cfg.measure == Measure::BiltsPlus
                 ? bilts_plus_distance(a.desc[i], b.desc[j], w)
                 : bilts_distance(a.desc[i], b.desc[j], w);
    return sum / static_cast<double>(path.pairs.size());
  } catch (const Error&) {
    return kInf;
  }
}

std::vector<Features> features_of_all(const std::vector<TrajectoryRecord>& recs,
                                      const RecognitionConfig& cfg, double L,
                                      double xi) {
  std::vector<Features> out(recs.size());
  parallel_for(static_cast<int>(recs.size()), cfg.jobs, [&](int i) {
    out[i] = features_of(recs[i].trajectory, cfg, L, xi);
  });
  return out;
}

struct Nearest {
  int index = 0;
  double distance = kInf;
  int failures = 0;  // +infinity distances encountered
};

Nearest nearest_reference(const Features& query,
                          const std::vector<Features>& refs,
                          const RecognitionConfig& cfg, double L,
                          double lambda) {
  Nearest best;
  for (int r = 0; r < static_cast<int>(refs.size()); ++r) {
    const double d = feature_distance(query, refs[r], cfg, L, lambda);
    if (std::isinf(d)) ++best.failures;
    if (d < best.distance) {
      best.distance = d;
      best.index = r;
    }
  }
  return best;
}

// Fraction of queries whose nearest reference carries the right label.
double rate_against(const std::vector<Features>& queries,
                    const std::vector<TrajectoryRecord>& query_recs,
                    const std::vector<Features>& refs,
                    const std::vector<TrajectoryRecord>& ref_recs,
                    const RecognitionConfig& cfg, double L, double lambda) {
  if (queries.empty()) return 0.0;
  std::atomic<int> correct{0};
  parallel_for(static_cast<int>(queries.size()), cfg.jobs, [&](int i) {
    const Nearest n = nearest_reference(queries[i], refs, cfg, L, lambda);
    if (ref_recs[n.index].class_label == query_recs[i].class_label) ++correct;
  });
  return static_cast<double>(correct) / static_cast<double>(queries.size());
}

// Atomic text write: temp file in the target directory, then rename.
void write_text_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
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
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path);
}

}  // namespace

const char* to_string(Measure measure) {
  switch (measure) {
    case Measure::Bilts:
      return "bilts";
    case Measure::BiltsPlus:
      return "bilts+";
    case Measure::Isa:
      return "isa";
  }
  return "bilts+";
}

Measure measure_from_string(const std::string& name) {
  if (name == "bilts") return Measure::Bilts;
  if (name == "bilts+" || name == "bilts_plus") return Measure::BiltsPlus;
  if (name == "isa") return Measure::Isa;
  throw Error("unknown measure: " + name);
}

std::vector<double> default_xi_grid(ProgressType progress) {
  if (progress == ProgressType::Angle) {
    const double deg = M_PI / 180.0;
    return {10.0 * deg, 20.0 * deg, 30.0 * deg};
  }
  return {0.03, 0.06, 0.12, 0.15};
}

ProtocolSplit split_by_protocol(const std::vector<TrajectoryRecord>& records,
                                const std::string& reference_context) {
  ProtocolSplit split;
  for (const auto& rec : records) {
    if (rec.context_label == reference_context)
      split.references.push_back(rec);
    else if (rec.trial < 2)
      split.train.push_back(rec);
    else
      split.test.push_back(rec);
  }
  if (split.references.empty())
    throw ProtocolError("reference context '" + reference_context +
                        "' has no trajectories");
  std::set<std::string> ref_classes, all_classes;
  for (const auto& rec : split.references) ref_classes.insert(rec.class_label);
  for (const auto& rec : records) all_classes.insert(rec.class_label);
  for (const auto& c : all_classes)
    if (!ref_classes.count(c))
      throw ProtocolError("class '" + c + "' missing from reference context");
  if (split.train.empty())
    throw ProtocolError("no training trajectories outside the reference "
                        "context");
  if (split.test.empty())
    throw ProtocolError("no test trajectories (need trials beyond the first "
                        "two in non-reference contexts)");
  return split;
}

std::pair<std::string, double> classify_1nn(
    const GeometricTrajectory& query,
    const std::vector<std::pair<GeometricTrajectory, std::string>>& references,
    Measure measure, const MeasureParams& params, double lambda) {
  if (references.empty())
    throw ProtocolError("classification needs at least one reference");
  MeasureParams p = params;
  p.regularize = measure == Measure::BiltsPlus;
  p.plus = measure == Measure::BiltsPlus;

  auto distance_to = [&](const GeometricTrajectory& ref) {
    try {
      if (measure == Measure::Isa)
        return isa_distance(isa_invariant_sequence(query, 1),
                            isa_invariant_sequence(ref, 1), p.L, lambda,
                            p.band);
      return trajectory_distance(query, ref, p);
    } catch (const Error&) {
      return kInf;
    }
  };

  int best = 0;
  double best_d = kInf;
  for (int r = 0; r < static_cast<int>(references.size()); ++r) {
    const double d = distance_to(references[r].first);
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return {references[best].second, best_d};
}

ChosenParams grid_search(const std::vector<TrajectoryRecord>& references,
                         const std::vector<TrajectoryRecord>& train,
                         const RecognitionConfig& config) {
  if (references.empty() || train.empty())
    throw ProtocolError("grid search needs references and training data");
  if (config.L_grid.empty())
    throw ProtocolError("grid search needs a non-empty L grid");

  std::vector<double> L_grid = config.L_grid;
  std::sort(L_grid.begin(), L_grid.end());
  std::vector<double> inner = config.measure == Measure::Isa
                                  ? config.lambda_grid
                                  : config.xi_grid;
  if (inner.empty()) {
    if (config.measure == Measure::Isa)
      throw ProtocolError("grid search needs a non-empty lambda grid");
    inner = default_xi_grid(config.progress);
  }
  std::sort(inner.begin(), inner.end());

  ChosenParams best;
  best.train_rate = -1.0;
  const bool isa = config.measure == Measure::Isa;
  for (const double L : L_grid) {
    // ISA features are lambda-independent; compute them once per L.
    std::vector<Features> ref_features, train_features;
    if (isa) {
      ref_features = features_of_all(references, config, L, 0.0);
      train_features = features_of_all(train, config, L, 0.0);
    }
    for (const double x : inner) {
      const double lambda = isa ? x : 1.0;
      if (!isa) {
        ref_features = features_of_all(references, config, L, x);
        train_features = features_of_all(train, config, L, x);
      }
      const double rate = rate_against(train_features, train, ref_features,
                                       references, config, L, lambda);
      if (rate > best.train_rate) {
        best.train_rate = rate;
        best.L = L;
        best.xi = isa ? 0.0 : x;
        best.lambda = lambda;
      }
    }
  }
  return best;
}

RecognitionReport evaluate(const std::vector<TrajectoryRecord>& references,
                           const std::vector<TrajectoryRecord>& test,
                           const RecognitionConfig& config,
                           const ChosenParams& params) {
  if (references.empty())
    throw ProtocolError("evaluation needs at least one reference");
  if (test.empty()) throw ProtocolError("evaluation needs a non-empty test set");

  const auto ref_features =
      features_of_all(references, config, params.L, params.xi);
  const auto test_features =
      features_of_all(test, config, params.L, params.xi);

  RecognitionReport report;
  report.measure = config.measure;
  report.progress = config.progress;
  report.params = params;
  report.n_test = static_cast<int>(test.size());
  report.outcomes.resize(test.size());

  std::atomic<int> failures{0};
  parallel_for(static_cast<int>(test.size()), config.jobs, [&](int i) {
    const Nearest n = nearest_reference(test_features[i], ref_features, config,
                                        params.L, params.lambda);
    failures += n.failures;
    TrialOutcome& out = report.outcomes[i];
    out.true_class = test[i].class_label;
    out.predicted_class = references[n.index].class_label;
    out.context = test[i].context_label;
    out.trial = test[i].trial;
    out.distance = n.distance;
    out.reference_index = n.index;
  });
  report.failed_distances = failures;

  for (const auto& out : report.outcomes) {
    ++report.confusion[out.true_class][out.predicted_class];
    if (out.true_class == out.predicted_class) ++report.n_correct;
  }
  report.recognition_rate =
      static_cast<double>(report.n_correct) / static_cast<double>(report.n_test);
  return report;
}

void write_report_json(const RecognitionReport& report,
                       const std::string& path) {
  nlohmann::json j;
  j["measure"] = to_string(report.measure);
  j["progress"] = to_string(report.progress);
  j["params"] = {{"L", report.params.L},
                 {"xi", report.params.xi},
                 {"lambda", report.params.lambda},
                 {"train_rate", report.params.train_rate}};
  j["n_test"] = report.n_test;
  j["n_correct"] = report.n_correct;
  j["recognition_rate"] = report.recognition_rate;
  j["failed_distances"] = report.failed_distances;
  j["confusion"] = report.confusion;
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& out : report.outcomes)
    trials.push_back({{"true_class", out.true_class},
                      {"predicted_class", out.predicted_class},
                      {"context", out.context},
                      {"trial", out.trial},
                      {"distance", out.distance},
                      {"reference_index", out.reference_index}});
  j["trials"] = trials;
  write_text_file(path, j.dump(2) + "\n");
}

void write_confusion_csv(const RecognitionReport& report,
                         const std::string& path) {
  std::set<std::string> labels;
  for (const auto& [t, row] : report.confusion) {
    labels.insert(t);
    for (const auto& [p, count] : row) labels.insert(p);
  }
  std::ostringstream out;
  out << "true_class";
  for (const auto& p : labels) out << ',' << p;
  out << '\n';
  for (const auto& t : labels) {
    out << t;
    auto row = report.confusion.find(t);
    for (const auto& p : labels) {
      int count = 0;
      if (row != report.confusion.end()) {
        auto cell = row->second.find(p);
        if (cell != row->second.end()) count = cell->second;
      }
      out << ',' << count;
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace bilts
