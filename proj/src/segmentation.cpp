#include "bilts/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bilts/descriptor.hpp"
#include "bilts/errors.hpp"

namespace bilts {

ShapeChangeSignal shape_change_signal(const GeometricTrajectory& traj,
                                      const SegmentationParams& params) {
  const int m =
      params.xi > 0.0 ? progress_scale(params.xi, traj.ds) : 1;
  DescriptorOptions opts;
  opts.L = params.L;
  opts.regularize = params.plus;
  const auto desc = descriptor_sequence(traj, m, opts);
  if (desc.size() < 2)
    throw TooShort("trajectory too short for a shape-change signal");

  ShapeChangeSignal sig;
  sig.m = m;
  sig.ds = traj.ds;
  const WeightMatrix w{params.L};
  sig.values.reserve(desc.size() - 1);
  for (size_t i = 0; i + 1 < desc.size(); ++i) {
    sig.values.push_back(params.plus
                             ? bilts_plus_distance(desc[i + 1], desc[i], w)
                             : bilts_distance(desc[i + 1], desc[i], w));
    // Descriptor j sits at trajectory sample m + 1 + j; attribute the change
    // between descriptors i and i+1 to the later sample, the first of the
    // new regime.
    const int k = m + 2 + static_cast<int>(i);
    sig.sample_index.push_back(k);
    sig.progress.push_back(k * traj.ds);
  }
  return sig;
}

std::vector<int> segment(const ShapeChangeSignal& signal, double threshold,
                         int min_gap) {
  const auto& v = signal.values;
  const int n = static_cast<int>(v.size());
  if (n == 0) return {};

  double thr = threshold;
  if (!(thr > 0.0)) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    // Floor keeps a numerically flat signal (constant screw) peak-free.
    thr = std::max(mean + 3.0 * std::sqrt(var / n), kShapeChangeFloor);
  }
  const int gap = min_gap > 0 ? min_gap : std::max(1, signal.m);

  // Interior local maxima only: a first or last value cannot be a peak, so
  // a ramp running off either end of the signal is not a breakpoint.
  std::vector<int> candidates;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(v[i] > thr)) continue;
    if (v[i - 1] > v[i]) continue;
    if (v[i + 1] >= v[i]) continue;  // plateaus keep the last
    candidates.push_back(i);
  }

  // Greedy suppression: larger peaks win; ties go to the earlier index.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](int a, int b) { return v[a] > v[b]; });
  std::vector<int> kept;
  for (int c : candidates) {
    bool blocked = false;
    for (int k : kept)
      if (std::abs(c - k) < gap) {
        blocked = true;
        break;
      }
    if (!blocked) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<int> segment_samples(const ShapeChangeSignal& signal,
                                 double threshold, int min_gap) {
  std::vector<int> out;
  for (int i : segment(signal, threshold, min_gap))
    out.push_back(signal.sample_index[i]);
  return out;
}

}  // namespace bilts
