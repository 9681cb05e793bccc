#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "t4d/errors.hpp"
#include "t4d/registered_metrics.hpp"
#include "t4d/sequence_tools.hpp"
#include "t4d/shape_primitives.hpp"
#include "t4d/unregistered_metrics.hpp"

using namespace t4d;
using namespace t4d::testing;

namespace {

Trajectory traj(std::initializer_list<Vec3> pts) {
  Trajectory t;
  for (const Vec3& p : pts) t.points.push_back(p);
  return t;
}

}  // namespace

TEST_CASE("dtw hand examples") {
  CHECK(dtw(traj({{0, 0, 0}, {1, 0, 0}}), traj({{0, 0, 0}, {1, 0, 0}})) == 0.0);
  CHECK(dtw(traj({{0, 0, 0}, {1, 0, 0}}), traj({{0, 0, 0}, {0, 0, 0}})) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dtw(traj({{0, 0, 0}}), traj({{3, 4, 0}})) ==
        doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(dtw(traj({}), traj({{0, 0, 0}})), ValidationError);
}

TEST_CASE("dtw equals exhaustive path enumeration") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 120; ++trial) {
    const Trajectory p = random_trajectory(rng);
    const Trajectory q = random_trajectory(rng);
    const double fast = dtw(p, q);
    const double slow = exhaustive_dtw(p, q);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-13));
  }
}

TEST_CASE("dtw diagonal path upper bound when n == m") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory p = random_trajectory(rng, 4, 8);
    Trajectory q = random_trajectory(rng, 4, 8);
    q.points.resize(static_cast<size_t>(p.size()), Vec3::Zero());
    double diag = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      diag += (p.points[static_cast<size_t>(i)] -
               q.points[static_cast<size_t>(i)]).squaredNorm();
    }
    CHECK(dtw(p, q) * dtw(p, q) <= diag + 1e-12);
  }
}

TEST_CASE("dtw band flag") {
  const Trajectory p = traj({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  const Trajectory q = traj({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  DtwOptions banded;
  banded.band = 0;  // diagonal only
  CHECK(dtw(p, q, banded) == 0.0);
}

TEST_CASE("frechet hand examples") {
  CHECK(frechet(traj({{0, 0, 0}, {1, 0, 0}}), traj({{0, 0, 0}, {1, 0, 0}})) == 0.0);
  CHECK(frechet(traj({{1, 2, 3}}), traj({{4, 6, 3}})) ==
        doctest::Approx(5.0).epsilon(1e-15));
  CHECK(frechet(traj({{0, 0, 0}, {1, 0, 0}}), traj({{0, 0, 0}, {2, 0, 0}})) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("frechet equals exhaustive coupling enumeration") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 120; ++trial) {
    const Trajectory p = random_trajectory(rng);
    const Trajectory q = random_trajectory(rng);
    CHECK(frechet(p, q) == exhaustive_frechet(p, q));
  }
}

TEST_CASE("frechet dominates the point-set Hausdorff distance") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 60; ++trial) {
    const Trajectory p = random_trajectory(rng, 2, 6);
    const Trajectory q = random_trajectory(rng, 2, 6);
    VertexMatrix a(p.size(), 3), b(q.size(), 3);
    for (int i = 0; i < p.size(); ++i) {
      a.row(i) = p.points[static_cast<size_t>(i)].transpose();
    }
    for (int i = 0; i < q.size(); ++i) {
      b.row(i) = q.points[static_cast<size_t>(i)].transpose();
    }
    CHECK(frechet(p, q) >= brute_hausdorff(a, b) - 1e-12);
  }
}

TEST_CASE("delta_m hand examples and translation invariance") {
  CHECK(delta_m(traj({{0, 0, 0}, {1, 0, 0}}), traj({{5, 5, 5}, {6, 5, 5}})) == 0.0);
  CHECK(delta_m(traj({{0, 0, 0}, {1, 0, 0}}), traj({{0, 0, 0}, {0, 0, 0}})) ==
        doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    Trajectory p = random_trajectory(rng, 2, 6);
    Trajectory q = random_trajectory(rng, 2, 6);
    q.points.resize(p.points.size(), Vec3::Zero());
    const double base = delta_m(p, q);
    Trajectory shifted = p;
    for (Vec3& pt : shifted.points) pt += Vec3(10, -3, 7);
    CHECK(delta_m(shifted, q) == doctest::Approx(base).epsilon(1e-12));
  }

  CHECK_THROWS_AS(delta_m(traj({{0, 0, 0}}), traj({{0, 0, 0}})), ValidationError);
  CHECK_THROWS_AS(
      delta_m(traj({{0, 0, 0}, {1, 0, 0}}), traj({{0, 0, 0}})), ValidationError);
}

TEST_CASE("delta_cd endpoints") {
  const Trajectory fwd = traj({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  const Trajectory bwd = traj({{0, 0, 0}, {-1, 0, 0}, {-2, 0, 0}});
  const Trajectory up = traj({{0, 0, 0}, {0, 1, 0}, {0, 2, 0}});
  CHECK(delta_cd(fwd, fwd) == 0.0);
  CHECK(delta_cd(fwd, bwd) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(delta_cd(fwd, up) == doctest::Approx(1.0).epsilon(1e-15));

  // static steps contribute zero, not NaN
  const Trajectory still = traj({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  CHECK(delta_cd(fwd, still) == 0.0);
}

TEST_CASE("extract_trajectories") {
  const SyntheticHead head = make_synthetic_head(31);
  SUBCASE("static sequence gives constant trajectories") {
    const MeshSequence still = make_sequence(
        std::vector<Mesh>(4, head.mesh), 30.0);
    const TrajectorySet set = extract_trajectories(still, head.lips);
    REQUIRE(set.trajectories.size() == 6);
    for (const Trajectory& t : set.trajectories) {
      REQUIRE(t.size() == 4);
      for (const Vec3& p : t.points) CHECK(p == t.points[0]);
    }
  }
  SUBCASE("T=1 works") {
    const MeshSequence one = make_sequence({head.mesh}, 30.0);
    const TrajectorySet set = extract_trajectories(one, head.lips);
    CHECK(set.trajectories[0].size() == 1);
  }
  SUBCASE("lower-lip y follows the generator, upper stays flat") {
    SynthOptions opts;
    opts.frames = 30;
    opts.seed = 5;
    const MeshSequence seq = synth_talking_sequence(head.mesh, head.lips, opts);
    const TrajectorySet set = extract_trajectories(seq, head.lips);
    // trajectories 0..2 upper, 3..5 lower
    for (int u = 0; u < 3; ++u) {
      const Trajectory& t = set.trajectories[static_cast<size_t>(u)];
      for (const Vec3& p : t.points) CHECK(p == t.points[0]);
    }
    const Trajectory& lower = set.trajectories[3];
    const double y0 = head.mesh.vertex(head.lips.lower[0])[1];
    for (int j = 0; j < opts.frames; ++j) {
      const double expected = y0 - opts.amplitude * synth_envelope(opts, j);
      CHECK(lower.points[static_cast<size_t>(j)][1] ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("lve hand examples") {
  const SyntheticHead head = make_synthetic_head(24);
  const int v = head.mesh.vertex_count();
  const VertexMask one = make_mask({head.mouth.indices[0]}, "one", v);

  MeshSequence gt = make_sequence({head.mesh}, 30.0);
  MeshSequence pred = gt;
  pred.frames[0].vertices(head.mouth.indices[0], 0) += 0.002;
  CHECK(lve(gt, pred, one) == doctest::Approx(4e-6).epsilon(1e-12));

  // two frames, second exact: mean of 4e-6 and 0
  MeshSequence gt2 = make_sequence({head.mesh, head.mesh}, 30.0);
  MeshSequence pred2 = gt2;
  pred2.frames[0].vertices(head.mouth.indices[0], 0) += 0.002;
  CHECK(lve(gt2, pred2, one) == doctest::Approx(2e-6).epsilon(1e-12));
  CHECK(lve(gt2, pred2, one, FrameAggregation::Max) ==
        doctest::Approx(4e-6).epsilon(1e-12));

  CHECK(lve(gt, gt, one) == 0.0);
  const VertexMask empty = make_mask({}, "none", v);
  CHECK_THROWS_AS(lve(gt, pred, empty), ValidationError);
}

TEST_CASE("mve reductions") {
  const Mesh patch = make_face_patch(10);
  const int v = patch.vertex_count();
  MeshSequence gt = make_sequence({patch, patch}, 30.0);
  CHECK(mve(gt, gt) == 0.0);

  // frame 0: every vertex off by 1 -> mean 1.0; frame 1: half that offset
  MeshSequence pred = gt;
  pred.frames[0].vertices.col(0).array() += 1.0;
  pred.frames[1].vertices.col(0).array() += 0.5;
  CHECK(mve(gt, pred) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mve(gt, pred, FrameAggregation::Mean) ==
        doctest::Approx((1.0 + 0.25) / 2.0).epsilon(1e-15));

  // uniform offset in all frames
  MeshSequence uniform = gt;
  for (Mesh& f : uniform.frames) f.vertices.col(0).array() += 1.0;
  CHECK(mve(gt, uniform) == doctest::Approx(1.0).epsilon(1e-15));
  (void)v;
}

TEST_CASE("fdd against the std-dev oracle") {
  const SyntheticHead head = make_synthetic_head(24);
  const int v = head.mesh.vertex_count();
  const int probe = head.upper_face.indices[0];
  const VertexMask single = make_mask({probe}, "probe", v);

  // oscillate the probe vertex by +/- 1mm on y starting at +1
  const int t_count = 8;
  std::vector<Mesh> frames(t_count, head.mesh);
  std::vector<double> magnitudes;
  for (int t = 0; t < t_count; ++t) {
    const double y = (t % 2 == 0) ? 1.0 : -1.0;
    frames[static_cast<size_t>(t)].vertices(probe, 1) += y;
    magnitudes.push_back(std::abs(y - 1.0));  // distance from frame 0
  }
  const MeshSequence gt = make_sequence(std::move(frames), 30.0);
  const MeshSequence pred = make_sequence(
      std::vector<Mesh>(t_count, head.mesh), 30.0);

  const double expected_dyn = population_std(magnitudes);
  CHECK(expected_dyn == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fdd(gt, pred, single) == doctest::Approx(expected_dyn).epsilon(1e-12));
  // signed: pred more dynamic than gt flips the sign
  CHECK(fdd(pred, gt, single) == doctest::Approx(-expected_dyn).epsilon(1e-12));
  CHECK(fdd(gt, gt, single) == 0.0);
}

TEST_CASE("evaluate_registered composes the parts") {
  const FixturePair fix = make_fixture_pair(42);
  const RegisteredMetrics self = evaluate_registered(
      fix.gt, fix.gt, fix.head.mouth, fix.head.upper_face, fix.head.lips);
  CHECK(self.lve == 0.0);
  CHECK(self.mve == 0.0);
  CHECK(self.fdd == 0.0);
  CHECK(self.dtw == 0.0);
  CHECK(self.frechet == 0.0);
  CHECK(self.delta_m == 0.0);
  CHECK(self.delta_cd == 0.0);

  const RegisteredMetrics metrics = evaluate_registered(
      fix.gt, fix.pred, fix.head.mouth, fix.head.upper_face, fix.head.lips);
  CHECK(metrics.lve == lve(fix.gt, fix.pred, fix.head.mouth));
  CHECK(metrics.mve == mve(fix.gt, fix.pred));
  CHECK(metrics.fdd == fdd(fix.gt, fix.pred, fix.head.upper_face));

  const TrajectorySet tg = extract_trajectories(fix.gt, fix.head.lips);
  const TrajectorySet tp = extract_trajectories(fix.pred, fix.head.lips);
  double dtw_sum = 0.0;
  for (int t = 0; t < 6; ++t) {
    dtw_sum += dtw(tg.trajectories[static_cast<size_t>(t)],
                   tp.trajectories[static_cast<size_t>(t)]);
  }
  CHECK(metrics.dtw == doctest::Approx(dtw_sum / 6.0).epsilon(1e-15));

  SUBCASE("heterogeneous pred is routed to unregistered mode") {
    std::vector<Mesh> frames = fix.pred.frames;
    frames[0] = make_face_patch(17);
    for (size_t i = 1; i < frames.size(); ++i) frames[i] = make_face_patch(19);
    const MeshSequence het = make_sequence(std::move(frames), fix.pred.fps);
    CHECK_THROWS_WITH_AS(
        evaluate_registered(fix.gt, het, fix.head.mouth, fix.head.upper_face,
                            fix.head.lips),
        doctest::Contains("unregistered"), ValidationError);
  }
}

TEST_CASE("rigid motion of both sequences leaves registered metrics put") {
  std::mt19937_64 rng(777);
  const FixturePair fix = make_fixture_pair(3);
  const RegisteredMetrics base = evaluate_registered(
      fix.gt, fix.pred, fix.head.mouth, fix.head.upper_face, fix.head.lips);

  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Matrix3d rot = random_rotation(rng);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    const Vec3 t(shift(rng), shift(rng), shift(rng));
    const MeshSequence gt_m = transformed_sequence(fix.gt, rot, t);
    const MeshSequence pred_m = transformed_sequence(fix.pred, rot, t);
    const RegisteredMetrics moved = evaluate_registered(
        gt_m, pred_m, fix.head.mouth, fix.head.upper_face, fix.head.lips);

    CHECK(moved.lve == doctest::Approx(base.lve).epsilon(1e-9));
    CHECK(moved.mve == doctest::Approx(base.mve).epsilon(1e-9));
    CHECK(moved.fdd == doctest::Approx(base.fdd).epsilon(1e-9));
    CHECK(moved.dtw == doctest::Approx(base.dtw).epsilon(1e-9));
    CHECK(moved.frechet == doctest::Approx(base.frechet).epsilon(1e-9));
    CHECK(moved.delta_m == doctest::Approx(base.delta_m).epsilon(1e-9));
    CHECK(moved.delta_cd == doctest::Approx(base.delta_cd).epsilon(1e-9));
  }
}
