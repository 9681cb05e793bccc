#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <random>

#include "support/oracles.hpp"
#include "t4d/errors.hpp"
#include "t4d/shape_primitives.hpp"
#include "t4d/surface_operators.hpp"

using namespace t4d;
using namespace t4d::testing;

namespace {

Mesh equilateral_triangle() {
  Mesh mesh;
  mesh.vertices.resize(3, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0.5, std::sqrt(3.0) / 2.0, 0;
  mesh.faces.resize(1, 3);
  mesh.faces << 0, 1, 2;
  return mesh;
}

void check_operator_invariants(const Mesh& mesh, const SurfaceOperators& ops) {
  const Eigen::MatrixXd laplacian(ops.laplacian);
  const int v = mesh.vertex_count();

  // symmetry, relative to the largest entry
  const double scale = laplacian.cwiseAbs().maxCoeff();
  CHECK((laplacian - laplacian.transpose()).cwiseAbs().maxCoeff() <=
        1e-10 * scale);

  // zero row sums
  CHECK((laplacian * Eigen::VectorXd::Ones(v)).cwiseAbs().maxCoeff() <= 1e-8);

  // PSD via smallest eigenvalue of the M-normalized operator
  const Eigen::VectorXd inv_sqrt_m = ops.mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd b =
      inv_sqrt_m.asDiagonal() * laplacian * inv_sqrt_m.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
  CHECK(es.eigenvalues()[0] >= -1e-8);

  // strictly positive mass summing to the surface area
  CHECK(ops.mass.minCoeff() > 0.0);
  CHECK(ops.mass.sum() ==
        doctest::Approx(total_surface_area(mesh)).epsilon(1e-10));

  // M-orthonormal eigenvectors
  const Eigen::MatrixXd gram = ops.eigenvectors.transpose() *
                               ops.mass.asDiagonal() * ops.eigenvectors;
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  CHECK((gram - identity).cwiseAbs().maxCoeff() <= 1e-8);

  // Galerkin residuals
  for (int i = 0; i < ops.eigenpair_count(); ++i) {
    const Eigen::VectorXd residual =
        ops.laplacian * ops.eigenvectors.col(i) -
        ops.eigenvalues[i] * ops.mass.cwiseProduct(ops.eigenvectors.col(i));
    CHECK(residual.lpNorm<Eigen::Infinity>() <=
          1e-6 * std::max(1.0, ops.eigenvalues[i]));
  }

  // eigenvalues ascending, first ~0
  for (int i = 1; i < ops.eigenpair_count(); ++i) {
    CHECK(ops.eigenvalues[i] >= ops.eigenvalues[i - 1] - 1e-12);
  }
  CHECK(std::abs(ops.eigenvalues[0]) <= 1e-8);
}

}  // namespace

TEST_CASE("equilateral triangle: cotangent weights and mass by hand") {
  const Mesh tri = equilateral_triangle();
  const SurfaceOperators ops = precompute_operators(tri, 1);

  const double w = 1.0 / (2.0 * std::sqrt(3.0));  // cot(60 deg)/2
  const Eigen::MatrixXd laplacian(ops.laplacian);
  CHECK(laplacian(0, 1) == doctest::Approx(-w).epsilon(1e-12));
  CHECK(laplacian(0, 2) == doctest::Approx(-w).epsilon(1e-12));
  CHECK(laplacian(1, 2) == doctest::Approx(-w).epsilon(1e-12));
  CHECK(laplacian(0, 0) == doctest::Approx(2.0 * w).epsilon(1e-12));

  const double lump = std::sqrt(3.0) / 4.0 / 3.0;  // third of the area
  for (int i = 0; i < 3; ++i) {
    CHECK(ops.mass[i] == doctest::Approx(lump).epsilon(1e-12));
  }

  // k=1: zero eigenvalue with the M-normalized constant eigenvector
  CHECK(std::abs(ops.eigenvalues[0]) <= 1e-10);
  const double ratio = ops.eigenvectors(1, 0) / ops.eigenvectors(0, 0);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-10));
  const double norm = (ops.eigenvectors.col(0).transpose() *
                       ops.mass.asDiagonal() * ops.eigenvectors.col(0))(0);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("operator invariants on the three fixture meshes") {
  const Mesh grid = make_plane_grid(12, 12, 0.5);
  const Mesh ico = make_icosphere(2, 1.0);
  const Mesh patch = make_face_patch(14, 10.0);
  for (const Mesh* mesh : {&grid, &ico, &patch}) {
    const int k = std::min(32, mesh->vertex_count());
    check_operator_invariants(*mesh, precompute_operators(*mesh, k));
  }
}

TEST_CASE("clamped cotangents stay nonnegative off-diagonal") {
  // obtuse sliver triangles produce negative weights unclamped
  Mesh mesh;
  mesh.vertices.resize(4, 3);
  mesh.vertices << 0, 0, 0, 4, 0, 0, 2, 0.4, 0, 2, -0.4, 0;
  mesh.faces.resize(2, 3);
  mesh.faces << 0, 1, 2, 0, 3, 1;
  OperatorOptions clamp;
  clamp.clamp_cotangents = true;
  const SurfaceOperators ops = precompute_operators(mesh, 2, clamp);
  const Eigen::MatrixXd laplacian(ops.laplacian);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(laplacian(i, j) <= 1e-15);
    }
  }
  const SurfaceOperators raw = precompute_operators(mesh, 2);
  CHECK(Eigen::MatrixXd(raw.laplacian).maxCoeff() > 0.0);
}

TEST_CASE("PSD quadratic form on random fields") {
  const Mesh ico = make_icosphere(2, 1.0);
  const SurfaceOperators ops = precompute_operators(ico, 8);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd u(ico.vertex_count());
    for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
    CHECK(u.dot(ops.laplacian * u) >= -1e-8);
  }
}

TEST_CASE("heat diffusion") {
  const Mesh ico = make_icosphere(2, 1.0);
  const int v = ico.vertex_count();
  const SurfaceOperators ops = precompute_operators(ico, v);  // full spectrum

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd u0(v);
  for (int i = 0; i < v; ++i) u0[i] = gauss(rng);

  SUBCASE("t = 0 reproduces the field") {
    const Eigen::VectorXd u = heat_diffuse(ops, u0, 0.0);
    CHECK((u - u0).norm() <= 1e-8 * u0.norm());
  }

  SUBCASE("t -> infinity gives the mass-weighted mean") {
    const Eigen::VectorXd u = heat_diffuse(ops, u0, 1e6);
    const double mean = ops.mass.dot(u0) / ops.mass.sum();
    for (int i = 0; i < v; ++i) {
      CHECK(u[i] == doctest::Approx(mean).epsilon(1e-6));
    }
  }

  SUBCASE("delta diffusion conserves mass and matches the expm oracle") {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(v);
    delta[3] = 1.0;
    const double total0 = ops.mass.dot(delta);
    const Eigen::MatrixXd laplacian(ops.laplacian);
    for (double t : {0.01, 0.1, 1.0}) {
      const Eigen::VectorXd u = heat_diffuse(ops, delta, t);
      CHECK(ops.mass.dot(u) == doctest::Approx(total0).epsilon(1e-8));
      const Eigen::VectorXd oracle = expm_heat(laplacian, ops.mass, delta, t);
      CHECK((u - oracle).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
  }

  SUBCASE("semigroup property") {
    const Eigen::VectorXd two_step =
        heat_diffuse(ops, heat_diffuse(ops, u0, 0.05), 0.2);
    const Eigen::VectorXd one_step = heat_diffuse(ops, u0, 0.25);
    CHECK((two_step - one_step).norm() <= 1e-7 * one_step.norm());
  }

  SUBCASE("maximum principle probe") {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(v);
    delta[0] = 1.0;
    for (double t : {0.001, 0.01, 0.1, 1.0}) {
      const Eigen::VectorXd u = heat_diffuse(ops, delta, t);
      CHECK(u.minCoeff() >= -1e-6);
      CHECK(u.maxCoeff() <= 1.0 + 1e-6);
    }
  }

  SUBCASE("negative time is rejected") {
    CHECK_THROWS_AS(heat_diffuse(ops, u0, -1.0), ValidationError);
  }
}

TEST_CASE("tangent gradients of linear fields on a flat grid") {
  const int n = 14;
  const Mesh grid = make_plane_grid(n, n, 0.5);
  const SurfaceOperators ops = precompute_operators(grid, 4);

  Eigen::VectorXd u_const = Eigen::VectorXd::Constant(grid.vertex_count(), 3.25);
  const auto g_const = gradient(ops, u_const);
  CHECK(g_const.cwiseAbs().maxCoeff() <= 1e-10);

  Eigen::VectorXd ux(grid.vertex_count()), uxy(grid.vertex_count());
  for (int i = 0; i < grid.vertex_count(); ++i) {
    ux[i] = grid.vertices(i, 0);
    uxy[i] = grid.vertices(i, 0) + 2.0 * grid.vertices(i, 1);
  }
  const auto gx = gradient(ops, ux);
  const auto gxy = gradient(ops, uxy);
  for (int j = 1; j + 1 < n; ++j) {
    for (int i = 1; i + 1 < n; ++i) {
      const int idx = j * n + i;
      CHECK(gx(idx, 0) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(gx(idx, 1)) <= 1e-6);
      CHECK(gxy.row(idx).norm() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-6));
    }
  }
}

TEST_CASE("precondition failures") {
  const Mesh tri = equilateral_triangle();
  CHECK_THROWS_AS(precompute_operators(tri, 0), ValidationError);
  CHECK_THROWS_AS(precompute_operators(tri, 4), ValidationError);

  SUBCASE("non-manifold edge") {
    Mesh fan;
    fan.vertices.resize(5, 3);
    fan.vertices << 0, 0, 0, 1, 0, 0, 0.5, 1, 0, 0.5, -1, 0, 0.5, 0.5, 1;
    fan.faces.resize(3, 3);
    fan.faces << 0, 1, 2, 0, 1, 3, 0, 1, 4;  // edge (0,1) in three faces
    CHECK_THROWS_WITH_AS(precompute_operators(fan, 2),
                         doctest::Contains("non-manifold"), ValidationError);
  }

  SUBCASE("isolated vertex") {
    Mesh lonely = equilateral_triangle();
    lonely.vertices.conservativeResize(4, 3);
    lonely.vertices.row(3) << 9, 9, 9;
    CHECK_THROWS_WITH_AS(precompute_operators(lonely, 2),
                         doctest::Contains("isolated"), ValidationError);
  }
}

TEST_CASE("lanczos path agrees with the dense path") {
  const Mesh grid = make_plane_grid(18, 18, 0.3);  // 324 vertices
  const int k = 20;
  const SurfaceOperators dense = precompute_operators(grid, k);
  OperatorOptions force_iterative;
  force_iterative.dense_eigensolver_limit = 0;
  const SurfaceOperators lanczos =
      precompute_operators(grid, k, force_iterative);

  for (int i = 0; i < k; ++i) {
    CHECK(std::abs(lanczos.eigenvalues[i] - dense.eigenvalues[i]) <=
          1e-8 * std::max(1.0, std::abs(dense.eigenvalues[i])));
  }
  check_operator_invariants(grid, lanczos);
}

TEST_CASE("operator cache round-trips and rejects wrong meshes") {
  namespace fs = std::filesystem;
  const Mesh patch = make_face_patch(10);
  const SurfaceOperators ops = precompute_operators(patch, 8);
  const std::uint64_t hash = mesh_content_hash(patch);

  const fs::path path = fs::temp_directory_path() / "t4d_ops_test.cache";
  save_operators(path, ops, hash);
  const SurfaceOperators loaded = load_operators(path, hash);
  CHECK(loaded.mass == ops.mass);
  CHECK(loaded.eigenvalues == ops.eigenvalues);
  CHECK(loaded.eigenvectors == ops.eigenvectors);
  CHECK(Eigen::MatrixXd(loaded.laplacian) == Eigen::MatrixXd(ops.laplacian));
  CHECK(Eigen::MatrixXd(loaded.gradient_x) == Eigen::MatrixXd(ops.gradient_x));

  CHECK_THROWS_WITH_AS(load_operators(path, hash ^ 1ULL),
                       doctest::Contains("hash mismatch"), ValidationError);

  Mesh other = patch;
  other.vertices(0, 0) += 1e-9;
  CHECK(mesh_content_hash(other) != hash);
}
