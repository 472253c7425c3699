#include "bilts/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bilts/errors.hpp"

namespace bilts {

double weighted_norm(const Matrix63d& diff, const WeightMatrix& w) {
  const double upper = diff.topRows<3>().squaredNorm();
  const double lower = diff.bottomRows<3>().squaredNorm();
  return std::sqrt(w.L * w.L * upper + lower);
}

namespace {

void check_compatible(const ShapeDescriptor& y1, const ShapeDescriptor& y2) {
  const double s1 = y1.m * y1.ds;
  const double s2 = y2.m * y2.ds;
  if (!(s1 > 0.0) || !(s2 > 0.0) || s1 > 2.0 * s2 || s2 > 2.0 * s1)
    throw MismatchedScale("descriptor progress scales are incommensurate");
}

// Rotation minimizing |R a - b|_F over SO(3) (orthogonal Procrustes with
// determinant correction; ties resolved toward the identity by the zero case).
Eigen::Matrix3d procrustes_rotation(const Eigen::Matrix<double, 3, 6>& a,
                                    const Eigen::Matrix<double, 3, 6>& b) {
  const Eigen::Matrix3d m = b * a.transpose();
  if (m.norm() == 0.0) return Eigen::Matrix3d::Identity();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, 1.0);
  if ((u * v.transpose()).determinant() < 0.0) d(2) = -1.0;
  return u * d.asDiagonal() * v.transpose();
}

}  // namespace

double bilts_distance(const ShapeDescriptor& y1, const ShapeDescriptor& y2,
                      const WeightMatrix& w) {
  check_compatible(y1, y2);
  return weighted_norm(y1.y - y2.y, w);
}

double bilts_plus_distance(const ShapeDescriptor& y1, const ShapeDescriptor& y2,
                           const WeightMatrix& w) {
  check_compatible(y1, y2);
  // min_R |blkdiag(R,R) y1 - y2|_W = min_R |R [L W1 | V1] - [L W2 | V2]|_F.
  Eigen::Matrix<double, 3, 6> a, b;
  a.leftCols<3>() = w.L * y1.y.topRows<3>();
  a.rightCols<3>() = y1.y.bottomRows<3>();
  b.leftCols<3>() = w.L * y2.y.topRows<3>();
  b.rightCols<3>() = y2.y.bottomRows<3>();
  const Eigen::Matrix3d r = procrustes_rotation(a, b);
  Matrix63d aligned;
  aligned.topRows<3>() = r * y1.y.topRows<3>();
  aligned.bottomRows<3>() = r * y1.y.bottomRows<3>();
  return weighted_norm(aligned - y2.y, w);
}

SvSummary sv_summary(const ShapeDescriptor& y) {
  SvSummary s;
  s.upper = y.y.topRows<3>().jacobiSvd().singularValues();
  s.lower = y.y.bottomRows<3>().jacobiSvd().singularValues();
  return s;
}

namespace {

double summary_cost(const SvSummary& a, const SvSummary& b,
                    const WeightMatrix& w) {
  const double upper = (a.upper - b.upper).squaredNorm();
  const double lower = (a.lower - b.lower).squaredNorm();
  return std::sqrt(w.L * w.L * upper + lower);
}

template <typename CostFn>
AlignmentPath dtw_path(int n1, int n2, int band, CostFn cost) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d(n1, n2);
  d.setConstant(kInf);
  const double slope = n1 > 1 ? static_cast<double>(n2 - 1) / (n1 - 1) : 0.0;
  auto in_band = [&](int i, int j) {
    return band <= 0 || std::abs(j - slope * i) <= band;
  };
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if (!in_band(i, j)) continue;
      double best = 0.0;
      if (i > 0 || j > 0) {
        best = kInf;
        if (i > 0 && j > 0) best = std::min(best, d(i - 1, j - 1));
        if (i > 0) best = std::min(best, d(i - 1, j));
        if (j > 0) best = std::min(best, d(i, j - 1));
      }
      d(i, j) = cost(i, j) + best;
    }
  }

  AlignmentPath path;
  int i = n1 - 1, j = n2 - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    // Ties prefer the diagonal, then advancing i, then j.
    double diag = kInf, up = kInf, left = kInf;
    if (i > 0 && j > 0) diag = d(i - 1, j - 1);
    if (i > 0) up = d(i - 1, j);
    if (j > 0) left = d(i, j - 1);
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

}  // namespace

AlignmentPath dtw_align(const std::vector<SvSummary>& s1,
                        const std::vector<SvSummary>& s2,
                        const WeightMatrix& w, int band) {
  if (s1.empty() || s2.empty())
    throw TooShort("dtw needs non-empty summary sequences");
  return dtw_path(static_cast<int>(s1.size()), static_cast<int>(s2.size()),
                  band,
                  [&](int i, int j) { return summary_cost(s1[i], s2[j], w); });
}

int progress_scale(double xi, double ds) {
  if (!(ds > 0.0)) throw std::invalid_argument("progress step must be > 0");
  return std::max(1, static_cast<int>(std::lround(xi / ds)));
}

double trajectory_distance(const GeometricTrajectory& t1,
                           const GeometricTrajectory& t2,
                           const MeasureParams& params) {
  const DescriptorOptions opts{params.L, params.regularize};
  const auto d1 = descriptor_sequence(t1, progress_scale(params.xi, t1.ds), opts);
  const auto d2 = descriptor_sequence(t2, progress_scale(params.xi, t2.ds), opts);
  if (d1.size() < 3 || d2.size() < 3)
    throw TooShort("too few descriptor samples to compare trajectories");

  std::vector<SvSummary> s1(d1.size()), s2(d2.size());
  for (size_t i = 0; i < d1.size(); ++i) s1[i] = sv_summary(d1[i]);
  for (size_t i = 0; i < d2.size(); ++i) s2[i] = sv_summary(d2[i]);

  const WeightMatrix w{params.L};
  const AlignmentPath path = dtw_align(s1, s2, w, params.band);
  double sum = 0.0;
  for (const auto& [i, j] : path.pairs)
    sum += params.plus ? bilts_plus_distance(d1[i], d2[j], w)
                       : bilts_distance(d1[i], d2[j], w);
  return sum / static_cast<double>(path.pairs.size());
}

double isa_distance(const std::vector<Vector6d>& inv1,
                    const std::vector<Vector6d>& inv2, double L, double lambda,
                    int band) {
  if (inv1.empty() || inv2.empty())
    throw TooShort("isa distance needs non-empty invariant sequences");
  Vector6d weights;
  weights << L, L * lambda, L * lambda, 1.0, lambda, lambda;
  auto cost = [&](int i, int j) {
    return (weights.array() * (inv1[i] - inv2[j]).array()).matrix().norm();
  };
  const AlignmentPath path = dtw_path(static_cast<int>(inv1.size()),
                                      static_cast<int>(inv2.size()), band, cost);
  double sum = 0.0;
  for (const auto& [i, j] : path.pairs) sum += cost(i, j);
  return sum / static_cast<double>(path.pairs.size());
}

}  // namespace bilts
