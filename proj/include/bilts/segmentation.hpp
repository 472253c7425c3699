#pragma once

#include <vector>

#include "bilts/reparam.hpp"
#include "bilts/similarity.hpp"

namespace bilts {

// Smallest auto-threshold for peak picking; a signal that never rises above
// this is treated as flat.
inline constexpr double kShapeChangeFloor = 1e-8;

struct SegmentationParams {
  double L = 0.5;    // weighting length; rule of thumb: ~3x the body size
  double xi = 0.0;   // descriptor spacing in progress units; 0 = one step
  bool plus = true;  // regularized descriptors + rotation-aligned distance
};

// Shape-change signal: the distance between descriptors at consecutive
// samples. A peak marks a sudden change in local trajectory shape.
struct ShapeChangeSignal {
  std::vector<double> values;     // values[i] = d(descriptor i+1, descriptor i)
  std::vector<int> sample_index;  // sample of descriptor i+1: change arrival
  std::vector<double> progress;   // progress coordinate of that sample
  int m = 1;                      // descriptor window actually used
  double ds = 0.0;
};

ShapeChangeSignal shape_change_signal(const GeometricTrajectory& traj,
                                      const SegmentationParams& params);

// Local maxima of the signal above `threshold`; maxima closer than `min_gap`
// indices suppress the smaller one. threshold <= 0 picks mean + 3*std of the
// signal, min_gap <= 0 defaults to the descriptor window m. Returns indices
// into signal.values, strictly increasing.
std::vector<int> segment(const ShapeChangeSignal& signal,
                         double threshold = 0.0, int min_gap = 0);

// Breakpoints as trajectory sample indices instead of signal indices.
std::vector<int> segment_samples(const ShapeChangeSignal& signal,
                                 double threshold = 0.0, int min_gap = 0);

}  // namespace bilts
