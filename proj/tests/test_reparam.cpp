#include <cmath>
#include <random>

#include <doctest.h>

#include "bilts/errors.hpp"
#include "bilts/reparam.hpp"
#include "util.hpp"

using namespace bilts;

namespace {

// Uniform time samples of a pose path T(g(t)) with a monotone clock g.
TemporalTrajectory sample_warped(const testutil::TwoExpCurve& curve, double dt,
                                 int n, double (*clock)(double)) {
  TemporalTrajectory traj;
  traj.dt = dt;
  traj.samples.reserve(n);
  for (int i = 0; i < n; ++i) traj.samples.push_back(curve.at(clock(i * dt)));
  return traj;
}

double identity_clock(double t) { return t; }
double slowdown_clock(double t) { return 2.0 * t / (1.0 + 0.5 * t); }

}  // namespace

TEST_CASE("constant-twist streams report the constant twist") {
  std::mt19937_64 rng(201);
  const ScrewTwist tw = testutil::random_twist(rng);
  TemporalTrajectory traj;
  traj.dt = 0.05;
  Pose p = testutil::random_pose(rng);
  for (int i = 0; i < 20; ++i) {
    traj.samples.push_back(p);
    p = compose(se3_exp(tw, traj.dt), p);
  }
  for (const ScrewTwist& t : temporal_twists(traj))
    CHECK((t.vec() - tw.vec()).norm() < 1e-12);
}

TEST_CASE("progress rates recover speed, angular rate, and screw rate") {
  // Straight line at 0.3 m/s.
  TemporalTrajectory line;
  line.dt = 0.01;
  for (int i = 0; i < 100; ++i)
    line.samples.push_back(
        Pose(Eigen::Matrix3d::Identity(),
             Eigen::Vector3d(0.3 * i * line.dt, 0.0, 0.0)));
  auto rates = progress_rates(temporal_twists(line), line,
                              ProgressType::Arclength, 0.0);
  for (double r : rates) CHECK(r == doctest::Approx(0.3).epsilon(1e-9));

  // Rotation about z at 1.2 rad/s through the body origin.
  TemporalTrajectory rot;
  rot.dt = 0.01;
  const ScrewTwist spin(Eigen::Vector3d(0.0, 0.0, 1.2),
                        Eigen::Vector3d::Zero());
  Pose p = Pose::identity();
  for (int i = 0; i < 100; ++i) {
    rot.samples.push_back(p);
    p = compose(se3_exp(spin, rot.dt), p);
  }
  auto arates =
      progress_rates(temporal_twists(rot), rot, ProgressType::Angle, 0.0);
  for (double r : arates) CHECK(r == doctest::Approx(1.2).epsilon(1e-9));

  // For that same pure rotation the screw path adds nothing: the body origin
  // sits on the axis, so the regulated axis velocity vanishes.
  auto srates =
      progress_rates(temporal_twists(rot), rot, ProgressType::ScrewPath, 0.5);
  for (double r : srates) CHECK(r == doctest::Approx(1.2).epsilon(1e-9));
}

TEST_CASE("regulated axis velocity matches the exact one near the axis") {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 30; ++i) {
    const ScrewTwist tw = testutil::random_twist(rng, 1.5, 1.0);
    const ScrewAxis axis = screw_axis(tw);
    // Body origin within L of the axis: regulation must not kick in, and the
    // regulated velocity equals the velocity of the on-axis point.
    const Eigen::Vector3d near_axis =
        axis.point_on_axis + 0.3 * testutil::random_unit(rng);
    const Eigen::Vector3d v = regulated_isa_velocity(tw, near_axis, 10.0);
    CHECK((v - axis.pitch_velocity * axis.direction).norm() < 1e-10);

    // Far from the axis the cap takes over: the result stays within
    // |omega| L of the body origin's own velocity.
    const Eigen::Vector3d far = axis.point_on_axis +
                                100.0 * testutil::random_unit(rng);
    const Eigen::Vector3d vr = regulated_isa_velocity(tw, far, 0.2);
    const Eigen::Vector3d v_origin = tw.vel + tw.omega.cross(far);
    CHECK((vr - v_origin).norm() <= tw.omega.norm() * 0.2 + 1e-12);
  }
}

TEST_CASE("pure translation uses the plain velocity as axis velocity") {
  const ScrewTwist tw(Eigen::Vector3d::Zero(), Eigen::Vector3d(0.1, 0.2, 0.3));
  const Eigen::Vector3d v =
      regulated_isa_velocity(tw, Eigen::Vector3d(5, 5, 5), 0.5);
  CHECK((v - tw.vel).norm() == 0.0);
}

TEST_CASE("cumulative progress is monotone and rejects a static stream") {
  std::vector<double> rates(10, 0.5);
  const auto s = cumulative_progress(rates, 0.1);
  REQUIRE(s.size() == 11);
  CHECK(s.front() == 0.0);
  CHECK(s.back() == doctest::Approx(0.5));
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1]);

  std::vector<double> zero(10, 0.0);
  CHECK_THROWS_AS((void)cumulative_progress(zero, 0.1), DegenerateProgress);
}

TEST_CASE("equidistant resampling pins endpoints and spacing") {
  std::mt19937_64 rng(203);
  const testutil::TwoExpCurve curve = testutil::random_curve(rng);
  TemporalTrajectory traj = sample_warped(curve, 0.002, 1001, identity_clock);
  const GeometricTrajectory g =
      reparameterize(traj, ProgressType::ScrewPath, 0.5, 50);
  REQUIRE(g.samples.size() == 50);
  CHECK(g.ds > 0.0);
  CHECK((g.samples.front().position - traj.samples.front().position).norm() <
        1e-12);
  CHECK((g.samples.back().position - traj.samples.back().position).norm() <
        1e-12);
}

TEST_CASE("reparameterization is invariant to the time profile") {
  std::mt19937_64 rng(204);
  const testutil::TwoExpCurve curve = testutil::random_curve(rng);
  // Same geometric path traversed with two different speed profiles; the
  // warped clock covers the same s range: slowdown_clock(1.0) = 4/3.
  TemporalTrajectory uniform;
  uniform.dt = 0.001;
  const int n = 1001;
  for (int i = 0; i < n; ++i)
    uniform.samples.push_back(curve.at(slowdown_clock(1.0) * i * uniform.dt));
  TemporalTrajectory warped = sample_warped(curve, 0.001, n, slowdown_clock);

  const auto ga = reparameterize(uniform, ProgressType::ScrewPath, 0.5, 40);
  const auto gb = reparameterize(warped, ProgressType::ScrewPath, 0.5, 40);
  REQUIRE(ga.samples.size() == gb.samples.size());
  CHECK(ga.ds == doctest::Approx(gb.ds).epsilon(1e-4));
  for (size_t i = 0; i < ga.samples.size(); ++i) {
    CHECK((ga.samples[i].position - gb.samples[i].position).norm() < 2e-3);
    CHECK((ga.samples[i].rotation - gb.samples[i].rotation).norm() < 2e-3);
  }
}

TEST_CASE("stalled stretches are deduplicated before resampling") {
  TemporalTrajectory traj;
  traj.dt = 0.1;
  for (int i = 0; i < 10; ++i)
    traj.samples.push_back(
        Pose(Eigen::Matrix3d::Identity(), Eigen::Vector3d(0.1 * i, 0, 0)));
  for (int i = 0; i < 5; ++i) traj.samples.push_back(traj.samples.back());
  for (int i = 1; i <= 10; ++i)
    traj.samples.push_back(
        Pose(Eigen::Matrix3d::Identity(),
             Eigen::Vector3d(0.9 + 0.1 * i, 0, 0)));
  const auto g = reparameterize(traj, ProgressType::Arclength, 0.0, 20);
  REQUIRE(g.samples.size() == 20);
  // Equal progress spacing on a straight line = equal position spacing.
  for (size_t i = 1; i < g.samples.size(); ++i) {
    const double step =
        (g.samples[i].position - g.samples[i - 1].position).norm();
    CHECK(step == doctest::Approx(g.ds).epsilon(1e-6));
  }
}

TEST_CASE("gaussian smoothing: identity at sigma zero, unit quaternions out") {
  std::mt19937_64 rng(205);
  const testutil::TwoExpCurve curve = testutil::random_curve(rng);
  GeometricTrajectory g = curve.sample(0.0, 1.0, 60);
  const GeometricTrajectory same = gaussian_smooth(g, 0.0);
  for (size_t i = 0; i < g.samples.size(); ++i)
    CHECK((same.samples[i].rotation - g.samples[i].rotation).norm() == 0.0);

  // Perturb positions, smooth, and expect the wiggle to shrink.
  std::normal_distribution<double> noise(0.0, 0.01);
  GeometricTrajectory noisy = g;
  for (auto& s : noisy.samples)
    s.position += Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
  const GeometricTrajectory smooth = gaussian_smooth(noisy, 2.0);
  double rough = 0.0, soft = 0.0;
  for (size_t i = 2; i + 2 < g.samples.size(); ++i) {
    const auto lap = [&](const GeometricTrajectory& t) {
      return (t.samples[i + 1].position - 2.0 * t.samples[i].position +
              t.samples[i - 1].position)
          .norm();
    };
    rough += lap(noisy);
    soft += lap(smooth);
  }
  CHECK(soft < rough);
  for (const auto& s : smooth.samples)
    CHECK(std::abs(s.rotation.determinant() - 1.0) < 1e-12);
}
