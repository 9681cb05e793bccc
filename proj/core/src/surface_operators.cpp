#include "t4d/surface_operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "t4d/errors.hpp"

namespace t4d {

namespace {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void require_operator_preconditions(const Mesh& mesh, int k) {
  require_valid(mesh, "precompute_operators");
  const int v_count = mesh.vertex_count();
  if (k < 1 || k > v_count) {
    throw ValidationError("precompute_operators: k must be in [1, V], got " +
                          std::to_string(k));
  }

  std::map<std::pair<int, int>, int> edge_faces;
  std::vector<bool> referenced(static_cast<size_t>(v_count), false);
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.faces(f, e);
      const int b = mesh.faces(f, (e + 1) % 3);
      referenced[static_cast<size_t>(a)] = true;
      const auto key = std::minmax(a, b);
      if (++edge_faces[key] > 2) {
        throw ValidationError("precompute_operators: non-manifold edge (" +
                              std::to_string(key.first) + ", " +
                              std::to_string(key.second) + ") with >2 faces");
      }
    }
  }
  for (int i = 0; i < v_count; ++i) {
    if (!referenced[static_cast<size_t>(i)]) {
      throw ValidationError("precompute_operators: isolated vertex " +
                            std::to_string(i) + " would have zero mass");
    }
  }
}

SparseMat build_cotangent_laplacian(const Mesh& mesh, bool clamp) {
  const int v_count = mesh.vertex_count();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(mesh.face_count()) * 12);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const int idx[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    const Vec3 pos[3] = {mesh.vertex(idx[0]), mesh.vertex(idx[1]),
                         mesh.vertex(idx[2])};
    for (int corner = 0; corner < 3; ++corner) {
      // cot of the angle at `corner` weights the opposite edge (j, k)
      const Vec3 e1 = pos[(corner + 1) % 3] - pos[corner];
      const Vec3 e2 = pos[(corner + 2) % 3] - pos[corner];
      double cot = e1.dot(e2) / e1.cross(e2).norm();
      if (clamp) cot = std::max(cot, 0.0);
      const double w = 0.5 * cot;
      const int j = idx[(corner + 1) % 3];
      const int k = idx[(corner + 2) % 3];
      triplets.emplace_back(j, k, -w);
      triplets.emplace_back(k, j, -w);
      triplets.emplace_back(j, j, w);
      triplets.emplace_back(k, k, w);
    }
  }
  SparseMat laplacian(v_count, v_count);
  laplacian.setFromTriplets(triplets.begin(), triplets.end());
  return laplacian;
}

Eigen::VectorXd build_lumped_mass(const Mesh& mesh) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.vertex_count());
  for (int f = 0; f < mesh.face_count(); ++f) {
    const double third = face_area(mesh, f) / 3.0;
    for (int e = 0; e < 3; ++e) mass[mesh.faces(f, e)] += third;
  }
  return mass;
}

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // M-orthonormal
};

EigenPairs dense_eigensolve(const SparseMat& laplacian,
                            const Eigen::VectorXd& mass, int k) {
  const Eigen::VectorXd inv_sqrt_m = mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd b = Eigen::MatrixXd(laplacian);
  b = inv_sqrt_m.asDiagonal() * b * inv_sqrt_m.asDiagonal();
  // enforce exact symmetry before the solver
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("dense eigensolver failed to converge");
  }
  EigenPairs pairs;
  pairs.values = solver.eigenvalues().head(k);
  pairs.vectors = inv_sqrt_m.asDiagonal() * solver.eigenvectors().leftCols(k);
  return pairs;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Shift-invert Lanczos with full reorthogonalization on
// B = M^{-1/2} L M^{-1/2}, solving (L - shift M) x = rhs per step.
EigenPairs lanczos_eigensolve(const SparseMat& laplacian,
                              const Eigen::VectorXd& mass, int k) {
  const int v_count = static_cast<int>(mass.size());
  const Eigen::VectorXd sqrt_m = mass.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt_m = sqrt_m.cwiseInverse();

  double diag_scale = 0.0;
  for (int i = 0; i < v_count; ++i) diag_scale += laplacian.coeff(i, i) / mass[i];
  diag_scale /= v_count;
  const double shift = -1e-4 * diag_scale;

  SparseMat shifted = laplacian;
  for (int i = 0; i < v_count; ++i) shifted.coeffRef(i, i) -= shift * mass[i];
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SparseMat> factor(shifted);
  if (factor.info() != Eigen::Success) {
    throw NumericalError("lanczos: factorization of shifted operator failed");
  }

  auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return sqrt_m.cwiseProduct(factor.solve(sqrt_m.cwiseProduct(x)));
  };

  int steps = std::min(v_count, std::max(2 * k + 32, 64));
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd basis(v_count, steps);
    Eigen::VectorXd alpha(steps), beta(steps);

    Eigen::VectorXd v(v_count);
    for (int i = 0; i < v_count; ++i) {
      v[i] = 1.0 + 1e-2 * (static_cast<double>(splitmix64(i)) / 1.8446744073709552e19);
    }
    v.normalize();

    int m = 0;
    for (; m < steps; ++m) {
      basis.col(m) = v;
      Eigen::VectorXd w = apply(v);
      alpha[m] = v.dot(w);
      w -= alpha[m] * v;
      if (m > 0) w -= beta[m - 1] * basis.col(m - 1);
      // full reorthogonalization keeps the basis usable past convergence
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
      }
      beta[m] = w.norm();
      if (beta[m] < 1e-14) {
        ++m;
        break;
      }
      v = w / beta[m];
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolver(tri);
    if (tsolver.info() != Eigen::Success) {
      throw NumericalError("lanczos: tridiagonal eigensolver failed");
    }

    if (m >= k) {
      // largest theta of the inverted operator = smallest lambda
      EigenPairs pairs;
      pairs.values.resize(k);
      pairs.vectors.resize(v_count, k);
      for (int i = 0; i < k; ++i) {
        const int col = m - 1 - i;
        const double theta = tsolver.eigenvalues()[col];
        pairs.values[i] = shift + 1.0 / theta;
        pairs.vectors.col(i) =
            inv_sqrt_m.cwiseProduct(basis.leftCols(m) * tsolver.eigenvectors().col(col));
      }

      bool converged = true;
      for (int i = 0; i < k && converged; ++i) {
        const Eigen::VectorXd residual =
            laplacian * pairs.vectors.col(i) -
            pairs.values[i] * mass.cwiseProduct(pairs.vectors.col(i));
        if (residual.lpNorm<Eigen::Infinity>() >
            1e-7 * std::max(1.0, std::abs(pairs.values[i]))) {
          converged = false;
        }
      }
      if (converged) return pairs;
    }

    if (steps >= v_count) break;
    steps = std::min(v_count, steps * 2);
  }
  throw NumericalError("lanczos: eigensolver did not converge");
}

void build_tangent_frames(const Mesh& mesh, SurfaceOperators& ops) {
  const int v_count = mesh.vertex_count();
  Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(v_count, 3);
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3 a = mesh.vertex(mesh.faces(f, 0));
    const Vec3 b = mesh.vertex(mesh.faces(f, 1));
    const Vec3 c = mesh.vertex(mesh.faces(f, 2));
    const Vec3 area_normal = 0.5 * (b - a).cross(c - a);
    for (int e = 0; e < 3; ++e) {
      normals.row(mesh.faces(f, e)) += area_normal.transpose();
    }
  }

  ops.frame_x.resize(v_count, 3);
  ops.frame_y.resize(v_count, 3);
  ops.frame_n.resize(v_count, 3);
  for (int i = 0; i < v_count; ++i) {
    Vec3 n = normals.row(i).transpose();
    const double len = n.norm();
    if (len < 1e-30) n = Vec3(0, 0, 1); else n /= len;
    // reference axis least aligned with the normal, x preferred
    Vec3 ref = std::abs(n[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    Vec3 bx = (ref - ref.dot(n) * n).normalized();
    Vec3 by = n.cross(bx);
    ops.frame_x.row(i) = bx.transpose();
    ops.frame_y.row(i) = by.transpose();
    ops.frame_n.row(i) = n.transpose();
  }
}

void build_gradient_matrices(const Mesh& mesh, SurfaceOperators& ops) {
  const int v_count = mesh.vertex_count();
  std::vector<std::vector<int>> neighbors(static_cast<size_t>(v_count));
  auto add_neighbor = [&](int a, int b) {
    auto& list = neighbors[static_cast<size_t>(a)];
    if (std::find(list.begin(), list.end(), b) == list.end()) list.push_back(b);
  };
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.faces(f, e);
      const int b = mesh.faces(f, (e + 1) % 3);
      add_neighbor(a, b);
      add_neighbor(b, a);
    }
  }

  std::vector<Triplet> gx_triplets, gy_triplets;
  for (int i = 0; i < v_count; ++i) {
    auto& ring = neighbors[static_cast<size_t>(i)];
    std::sort(ring.begin(), ring.end());
    const int deg = static_cast<int>(ring.size());
    const Vec3 bx = ops.frame_x.row(i).transpose();
    const Vec3 by = ops.frame_y.row(i).transpose();
    const Vec3 pi = mesh.vertex(i);

    // least squares for g in R^2 with rows (edge . bx, edge . by) and
    // finite differences u_j - u_i on the right-hand side
    Eigen::MatrixXd w(deg, 2);
    for (int r = 0; r < deg; ++r) {
      const Vec3 edge = mesh.vertex(ring[static_cast<size_t>(r)]) - pi;
      w(r, 0) = edge.dot(bx);
      w(r, 1) = edge.dot(by);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    // coeff = W^+ (2 x deg): per-neighbor coefficients of the gradient
    const Eigen::MatrixXd coeff =
        svd.solve(Eigen::MatrixXd::Identity(deg, deg)).eval();

    double diag_x = 0.0, diag_y = 0.0;
    for (int r = 0; r < deg; ++r) {
      const int j = ring[static_cast<size_t>(r)];
      gx_triplets.emplace_back(i, j, coeff(0, r));
      gy_triplets.emplace_back(i, j, coeff(1, r));
      diag_x -= coeff(0, r);
      diag_y -= coeff(1, r);
    }
    gx_triplets.emplace_back(i, i, diag_x);
    gy_triplets.emplace_back(i, i, diag_y);
  }

  ops.gradient_x.resize(v_count, v_count);
  ops.gradient_x.setFromTriplets(gx_triplets.begin(), gx_triplets.end());
  ops.gradient_y.resize(v_count, v_count);
  ops.gradient_y.setFromTriplets(gy_triplets.begin(), gy_triplets.end());
}

}  // namespace

SurfaceOperators precompute_operators(const Mesh& mesh, int eigenpair_count,
                                      const OperatorOptions& options) {
  require_operator_preconditions(mesh, eigenpair_count);
  const int v_count = mesh.vertex_count();

  SurfaceOperators ops;
  ops.laplacian = build_cotangent_laplacian(mesh, options.clamp_cotangents);
  ops.mass = build_lumped_mass(mesh);

  // Lanczos cannot deliver nearly-complete spectra; fall back to dense then.
  const bool dense = v_count <= options.dense_eigensolver_limit ||
                     eigenpair_count * 2 >= v_count;
  const EigenPairs pairs = dense
                               ? dense_eigensolve(ops.laplacian, ops.mass,
                                                  eigenpair_count)
                               : lanczos_eigensolve(ops.laplacian, ops.mass,
                                                    eigenpair_count);
  ops.eigenvalues = pairs.values;
  ops.eigenvectors = pairs.vectors;

  build_tangent_frames(mesh, ops);
  build_gradient_matrices(mesh, ops);
  return ops;
}

Eigen::VectorXd heat_diffuse(const SurfaceOperators& ops,
                             const Eigen::VectorXd& u0, double t) {
  if (t < 0.0) throw ValidationError("heat_diffuse: negative diffusion time");
  if (u0.size() != ops.mass.size()) {
    throw ValidationError("heat_diffuse: field length " +
                          std::to_string(u0.size()) + " != V = " +
                          std::to_string(ops.mass.size()));
  }
  const Eigen::VectorXd coeffs =
      ops.eigenvectors.transpose() * ops.mass.cwiseProduct(u0);
  Eigen::VectorXd damped(coeffs.size());
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    damped[i] = std::exp(-ops.eigenvalues[i] * t) * coeffs[i];
  }
  return ops.eigenvectors * damped;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> gradient(const SurfaceOperators& ops,
                                                  const Eigen::VectorXd& u) {
  if (u.size() != ops.mass.size()) {
    throw ValidationError("gradient: field length " + std::to_string(u.size()) +
                          " != V = " + std::to_string(ops.mass.size()));
  }
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(u.size(), 2);
  out.col(0) = ops.gradient_x * u;
  out.col(1) = ops.gradient_y * u;
  return out;
}

std::uint64_t mesh_content_hash(const Mesh& mesh) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    for (int c = 0; c < 3; ++c) {
      const double value = mesh.vertices(v, c);
      mix_bytes(&value, sizeof(value));
    }
  }
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const std::int32_t value = mesh.faces(f, c);
      mix_bytes(&value, sizeof(value));
    }
  }
  return h;
}

namespace {

constexpr char kCacheMagic[8] = {'T', '4', 'D', 'O', 'P', 'S', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

void write_dense(std::ostream& out, const Eigen::MatrixXd& m) {
  write_pod(out, static_cast<std::int64_t>(m.rows()));
  write_pod(out, static_cast<std::int64_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_dense(std::istream& in) {
  const auto rows = read_pod<std::int64_t>(in);
  const auto cols = read_pod<std::int64_t>(in);
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  return m;
}

void write_sparse(std::ostream& out, const SparseMat& m) {
  write_pod(out, static_cast<std::int64_t>(m.rows()));
  write_pod(out, static_cast<std::int64_t>(m.cols()));
  write_pod(out, static_cast<std::int64_t>(m.nonZeros()));
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(m, col); it; ++it) {
      write_pod(out, static_cast<std::int32_t>(it.row()));
      write_pod(out, static_cast<std::int32_t>(it.col()));
      write_pod(out, it.value());
    }
  }
}

SparseMat read_sparse(std::istream& in) {
  const auto rows = read_pod<std::int64_t>(in);
  const auto cols = read_pod<std::int64_t>(in);
  const auto nnz = read_pod<std::int64_t>(in);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(nnz));
  for (std::int64_t i = 0; i < nnz; ++i) {
    const auto r = read_pod<std::int32_t>(in);
    const auto c = read_pod<std::int32_t>(in);
    const auto v = read_pod<double>(in);
    triplets.emplace_back(r, c, v);
  }
  SparseMat m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

void save_operators(const std::filesystem::path& path, const SurfaceOperators& ops,
                    std::uint64_t mesh_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(kCacheMagic, sizeof(kCacheMagic));
  write_pod(out, mesh_hash);
  write_pod(out, static_cast<std::int32_t>(ops.vertex_count()));
  write_pod(out, static_cast<std::int32_t>(ops.eigenpair_count()));
  write_dense(out, ops.mass);
  write_dense(out, ops.eigenvalues);
  write_dense(out, ops.eigenvectors);
  write_dense(out, ops.frame_x);
  write_dense(out, ops.frame_y);
  write_dense(out, ops.frame_n);
  write_sparse(out, ops.laplacian);
  write_sparse(out, ops.gradient_x);
  write_sparse(out, ops.gradient_y);
  if (!out) throw ValidationError("write failed for " + path.string());
}

SurfaceOperators load_operators(const std::filesystem::path& path,
                                std::uint64_t expected_mesh_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw ValidationError(path.string() + ": not an operator cache file");
  }
  const auto hash = read_pod<std::uint64_t>(in);
  if (hash != expected_mesh_hash) {
    throw ValidationError(path.string() +
                          ": cache was built for a different mesh (hash mismatch)");
  }
  read_pod<std::int32_t>(in);  // V, implied by the matrices
  read_pod<std::int32_t>(in);  // k
  SurfaceOperators ops;
  ops.mass = read_dense(in);
  ops.eigenvalues = read_dense(in);
  ops.eigenvectors = read_dense(in);
  ops.frame_x = read_dense(in);
  ops.frame_y = read_dense(in);
  ops.frame_n = read_dense(in);
  ops.laplacian = read_sparse(in);
  ops.gradient_x = read_sparse(in);
  ops.gradient_y = read_sparse(in);
  if (!in) throw ValidationError(path.string() + ": truncated operator cache");
  return ops;
}

}  // namespace t4d
