#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "t4d/errors.hpp"
#include "t4d/sequence_losses.hpp"
#include "t4d/sequence_tools.hpp"
#include "t4d/shape_primitives.hpp"
#include "t4d/unregistered_metrics.hpp"

using namespace t4d;
using namespace t4d::testing;

namespace {

VertexMatrix points(std::initializer_list<Vec3> list) {
  VertexMatrix m(static_cast<Eigen::Index>(list.size()), 3);
  Eigen::Index i = 0;
  for (const Vec3& p : list) m.row(i++) = p.transpose();
  return m;
}

Mesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  Mesh mesh;
  mesh.vertices.resize(3, 3);
  mesh.vertices.row(0) = a.transpose();
  mesh.vertices.row(1) = b.transpose();
  mesh.vertices.row(2) = c.transpose();
  mesh.faces.resize(1, 3);
  mesh.faces << 0, 1, 2;
  return mesh;
}

}  // namespace

TEST_CASE("hausdorff hand examples") {
  const VertexMatrix a = points({{0, 0, 0}, {1, 1, 1}});
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(points({{0, 0, 0}}), points({{3, 4, 0}})) ==
        doctest::Approx(5.0).epsilon(1e-15));
  CHECK(hausdorff(points({{0, 0, 0}, {10, 0, 0}}), points({{0, 0, 0}})) ==
        doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(hausdorff(a, VertexMatrix(0, 3)), ValidationError);
}

TEST_CASE("hausdorff matches brute force and dominates chamfer NN terms") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> size(1, 300);
  for (int trial = 0; trial < 50; ++trial) {
    const VertexMatrix a = random_points(rng, size(rng));
    const VertexMatrix b = random_points(rng, size(rng));
    const double hd = hausdorff(a, b);
    CHECK(hd == doctest::Approx(brute_hausdorff(a, b)).epsilon(1e-12));
    // HD is the max NN distance, so it bounds every NN distance in chamfer
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
      CHECK(hd * hd >= brute_nn_sq(b, a.row(k).transpose()) - 1e-18);
    }
  }
}

TEST_CASE("varifold_rep of the unit right triangle") {
  const Mesh tri = single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const VarifoldRep rep = varifold_rep(tri);
  REQUIRE(rep.size() == 1);
  CHECK(rep.centers.row(0).transpose() ==
        Vec3(1.0 / 3.0, 1.0 / 3.0, 0.0));
  CHECK(rep.areas[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.normals.row(0).transpose() == Vec3(0, 0, 1));
  CHECK(rep.dropped_faces == 0);
}

TEST_CASE("varifold_rep drops degenerate faces with a count") {
  Mesh mesh;
  mesh.vertices.resize(4, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 2, 0, 0;
  mesh.faces.resize(2, 3);
  mesh.faces << 0, 1, 2,  // fine
      0, 1, 3;            // collinear, zero area
  const VarifoldRep rep = varifold_rep(mesh);
  CHECK(rep.size() == 1);
  CHECK(rep.dropped_faces == 1);

  Mesh all_bad;
  all_bad.vertices.resize(3, 3);
  all_bad.vertices << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  all_bad.faces.resize(1, 3);
  all_bad.faces << 0, 1, 2;
  CHECK_THROWS_AS(varifold_rep(all_bad), ValidationError);
}

TEST_CASE("varifold_rep area totals") {
  const Mesh ico = make_icosphere(2, 10.0);
  const VarifoldRep rep = varifold_rep(ico);
  CHECK(rep.areas.sum() ==
        doctest::Approx(total_surface_area(ico)).epsilon(1e-12));
  for (int f = 0; f < rep.size(); ++f) {
    CHECK(rep.normals.row(f).norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("varifold metric identities") {
  const Mesh ico = make_icosphere(1, 5.0);
  const VarifoldRep rep = varifold_rep(ico);
  VarifoldOptions options;
  options.sigma = 2.0;

  const double self = varifold_metric(rep, rep, options);
  const double energy = varifold_product(rep, rep, options);
  CHECK(std::abs(self) <= 1e-10 * energy);

  SUBCASE("orientation flip is invisible to the unoriented kernel") {
    Mesh flipped = ico;
    flipped.faces.col(1).swap(flipped.faces.col(2));
    const VarifoldRep rep_flipped = varifold_rep(flipped);
    const double metric = varifold_metric(rep, rep_flipped, options);
    CHECK(std::abs(metric) <= 1e-10 * energy);
  }

  SUBCASE("symmetry") {
    const Mesh other = make_icosphere(1, 5.5);
    const VarifoldRep rep_other = varifold_rep(other);
    const double xy = varifold_metric(rep, rep_other, options);
    const double yx = varifold_metric(rep_other, rep, options);
    CHECK(xy == doctest::Approx(yx).epsilon(1e-12));
  }
}

TEST_CASE("far-separated triangles: the metric is the sum of self energies") {
  VarifoldOptions options;
  options.sigma = 0.1;
  // both areas 0.5, centers 100 sigma apart
  const Mesh tri_a = single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  const Mesh tri_b = single_triangle({10, 0, 0}, {11, 0, 0}, {10, 1, 0});
  const VarifoldRep rep_a = varifold_rep(tri_a);
  const VarifoldRep rep_b = varifold_rep(tri_b);
  CHECK(varifold_metric(rep_a, rep_b, options) ==
        doctest::Approx(0.25 + 0.25).epsilon(1e-9));
}

TEST_CASE("positive semidefinite kernel keeps the metric nonnegative") {
  std::mt19937_64 rng(99);
  VarifoldOptions options;
  options.sigma = 3.0;
  for (int trial = 0; trial < 20; ++trial) {
    RemeshOptions rm;
    rm.seed = static_cast<std::uint64_t>(trial);
    rm.up_fraction = 0.4;
    rm.down_target_ratio = 0.9;
    const Mesh base = make_icosphere(1, 6.0);
    const Mesh other = remesh_random(base, rm).mesh;
    const double metric =
        varifold_metric(varifold_rep(base), varifold_rep(other), options);
    CHECK(metric >= -1e-9);
  }
}

TEST_CASE("truncated evaluation matches the exact double sum") {
  const Mesh a = make_icosphere(3, 1.0);  // 1280 faces
  Mesh b = make_icosphere(3, 1.0);
  b.vertices.col(0).array() += 0.08;
  b.vertices.col(2).array() *= 1.03;

  VarifoldOptions exact;
  exact.sigma = 0.05;
  VarifoldOptions truncated = exact;
  truncated.truncate = true;

  const double metric_exact = varifold_metric(varifold_rep(a), varifold_rep(b), exact);
  const double metric_trunc =
      varifold_metric(varifold_rep(a), varifold_rep(b), truncated);
  CHECK(metric_trunc ==
        doctest::Approx(metric_exact).epsilon(1e-6));
}

TEST_CASE("subdivision leaves the varifold nearly unchanged") {
  const Mesh base = make_icosphere(2, 10.0);
  RemeshOptions rm;
  rm.up_fraction = 1.0;
  rm.down_target_ratio = 1.0;  // pure conforming subdivision
  const Mesh subdivided = remesh_random(base, rm).mesh;

  VarifoldOptions options;
  options.sigma = 2.0 * max_edge_length(base);  // sigma >= mean edge length
  const VarifoldRep rep_base = varifold_rep(base);
  const double energy = varifold_product(rep_base, rep_base, options);
  const double metric =
      varifold_metric(rep_base, varifold_rep(subdivided), options);
  CHECK(metric <= 1e-3 * energy);
}

TEST_CASE("evaluate_unregistered aggregates per-frame values") {
  const FixturePair fix = make_fixture_pair(9, 17, 6);
  VarifoldOptions options;
  options.sigma = 5.0;
  options.truncate = true;

  SUBCASE("identical sequences give ~0 everywhere") {
    const UnregisteredMetrics self = evaluate_unregistered(fix.gt, fix.gt, options);
    CHECK(self.mean.hausdorff == 0.0);
    CHECK(self.mean.chamfer == 0.0);
    CHECK(std::abs(self.mean.varifold) <= 1e-12);
  }

  const UnregisteredMetrics metrics =
      evaluate_unregistered(fix.gt, fix.pred, options);
  REQUIRE(static_cast<int>(metrics.per_frame.size()) == fix.gt.frame_count());
  double hd_mean = 0.0;
  for (const auto& frame : metrics.per_frame) hd_mean += frame.hausdorff;
  hd_mean /= static_cast<double>(metrics.per_frame.size());
  CHECK(metrics.mean.hausdorff == doctest::Approx(hd_mean).epsilon(1e-15));

  SUBCASE("remeshed gt beats a 1mm-translated gt") {
    RemeshOptions rm;
    rm.seed = 4;
    rm.up_fraction = 0.5;
    rm.down_target_ratio = 0.9;
    std::vector<Mesh> remeshed, translated;
    for (const Mesh& frame : fix.gt.frames) {
      remeshed.push_back(remesh_random(frame, rm).mesh);
      Mesh moved = frame;
      moved.vertices.col(0).array() += 1.0;
      translated.push_back(moved);
    }
    const MeshSequence seq_remeshed =
        make_sequence(std::move(remeshed), fix.gt.fps);
    const MeshSequence seq_translated =
        make_sequence(std::move(translated), fix.gt.fps);
    const UnregisteredMetrics m_rm =
        evaluate_unregistered(fix.gt, seq_remeshed, options);
    const UnregisteredMetrics m_tr =
        evaluate_unregistered(fix.gt, seq_translated, options);
    CHECK(m_rm.mean.hausdorff < m_tr.mean.hausdorff);
    CHECK(m_rm.mean.chamfer < m_tr.mean.chamfer);
  }

  SUBCASE("sigma must be positive") {
    VarifoldOptions bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(evaluate_unregistered(fix.gt, fix.pred, bad), ValidationError);
  }
  SUBCASE("length mismatch") {
    MeshSequence shorter = fix.pred;
    shorter.frames.pop_back();
    shorter = make_sequence(std::move(shorter.frames), fix.pred.fps);
    CHECK_THROWS_AS(evaluate_unregistered(fix.gt, shorter, options),
                    ValidationError);
  }
}
