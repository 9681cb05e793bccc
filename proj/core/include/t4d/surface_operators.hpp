#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <filesystem>

#include "t4d/mesh.hpp"

namespace t4d {

// Precomputed surface operators of one mesh: stiffness-form cotangent
// Laplacian (L = D - W, PSD), barycentric lumped mass, the leading
// generalized eigenpairs L phi = lambda M phi with M-orthonormal columns,
// and per-vertex tangent-plane gradient matrices.
struct SurfaceOperators {
  Eigen::SparseMatrix<double> laplacian;  // V x V, symmetric
  Eigen::VectorXd mass;                   // V, lumped vertex areas (mm^2)
  Eigen::VectorXd eigenvalues;            // k, ascending, first ~0
  Eigen::MatrixXd eigenvectors;           // V x k, Phi^T M Phi = I
  Eigen::SparseMatrix<double> gradient_x;  // V x V, scalar field -> frame x comp
  Eigen::SparseMatrix<double> gradient_y;  // V x V, scalar field -> frame y comp
  // Orthonormal tangent frames per vertex, rows (basis_x | basis_y | normal).
  Eigen::MatrixXd frame_x;  // V x 3
  Eigen::MatrixXd frame_y;  // V x 3
  Eigen::MatrixXd frame_n;  // V x 3

  int vertex_count() const { return static_cast<int>(mass.size()); }
  int eigenpair_count() const { return static_cast<int>(eigenvalues.size()); }
};

struct OperatorOptions {
  // Clamp negative (obtuse-triangle) cotangent terms at 0. Off by default:
  // unclamped is the textbook operator.
  bool clamp_cotangents = false;
  // Dense generalized eigensolve up to this vertex count, shift-invert
  // Lanczos above it.
  int dense_eigensolver_limit = 6000;
};

// k defaults to 128 eigenpairs (capped at V by the caller).
SurfaceOperators precompute_operators(const Mesh& mesh, int eigenpair_count = 128,
                                      const OperatorOptions& options = {});

// Spectral heat diffusion u(t) = Phi diag(exp(-lambda t)) Phi^T M u0,
// truncated to the precomputed eigenpairs. t >= 0.
Eigen::VectorXd heat_diffuse(const SurfaceOperators& ops,
                             const Eigen::VectorXd& u0, double t);

// Tangent-frame gradient of a scalar field at every vertex (V x 2).
Eigen::Matrix<double, Eigen::Dynamic, 2> gradient(const SurfaceOperators& ops,
                                                  const Eigen::VectorXd& u);

// FNV-1a over vertex and face bytes; cache key component.
std::uint64_t mesh_content_hash(const Mesh& mesh);

// Binary operator cache, keyed by mesh content hash and eigenpair count.
// Host-endian; intended as a local cache, not an interchange format.
void save_operators(const std::filesystem::path& path, const SurfaceOperators& ops,
                    std::uint64_t mesh_hash);
SurfaceOperators load_operators(const std::filesystem::path& path,
                                std::uint64_t expected_mesh_hash);

}  // namespace t4d
