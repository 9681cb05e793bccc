#include "t4d/shape_primitives.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "t4d/errors.hpp"

namespace t4d {

namespace {

Mesh grid_mesh(int nx, int ny,
               const std::function<Vec3(double, double)>& surface) {
  Mesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(nx) * ny, 3);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double u = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.0;
      const double v = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.0;
      mesh.vertices.row(j * nx + i) = surface(u, v).transpose();
    }
  }
  mesh.faces.resize(static_cast<Eigen::Index>(nx - 1) * (ny - 1) * 2, 3);
  Eigen::Index f = 0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i;
      const int b = j * nx + i + 1;
      const int c = (j + 1) * nx + i + 1;
      const int d = (j + 1) * nx + i;
      mesh.faces.row(f++) << a, b, c;
      mesh.faces.row(f++) << a, c, d;
    }
  }
  return mesh;
}

}  // namespace

Mesh make_plane_grid(int nx, int ny, double spacing) {
  if (nx < 2 || ny < 2) throw ValidationError("make_plane_grid: need nx, ny >= 2");
  return grid_mesh(nx, ny, [&](double u, double v) {
    return Vec3(u * (nx - 1) * spacing, v * (ny - 1) * spacing, 0.0);
  });
}

Mesh make_icosphere(int subdivisions, double radius) {
  if (subdivisions < 0 || subdivisions > 7) {
    throw ValidationError("make_icosphere: subdivisions must be in [0, 7]");
  }
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back(0.5 * (verts[static_cast<size_t>(a)] +
                             verts[static_cast<size_t>(b)]));
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& tri : faces) {
      const int ab = mid(tri[0], tri[1]);
      const int bc = mid(tri[1], tri[2]);
      const int ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({ab, tri[1], bc});
      next.push_back({ca, bc, tri[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  Mesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) {
    mesh.vertices.row(static_cast<Eigen::Index>(i)) =
        (verts[i].normalized() * radius).transpose();
  }
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (size_t f = 0; f < faces.size(); ++f) {
    mesh.faces(static_cast<Eigen::Index>(f), 0) = faces[f][0];
    mesh.faces(static_cast<Eigen::Index>(f), 1) = faces[f][1];
    mesh.faces(static_cast<Eigen::Index>(f), 2) = faces[f][2];
  }
  return mesh;
}

namespace {

// Face patch parameterization over (u, v) in [-1, 1]^2: v runs chin to
// forehead, z bulges toward the viewer with a nose bump.
Vec3 face_point(double u, double v, double scale) {
  const double x = 0.75 * scale * u;
  const double y = scale * v;
  double z = 0.55 * scale * std::exp(-1.2 * u * u - 0.8 * v * v);
  z += 0.16 * scale * std::exp(-(u * u / 0.02 + (v - 0.05) * (v - 0.05) / 0.03));
  return Vec3(x, y, z);
}

constexpr double kMouthV = -0.38;
constexpr double kLipGapV = 0.16;
constexpr double kMouthHalfWidthU = 0.30;
constexpr double kUpperFaceMinV = 0.25;

}  // namespace

Mesh make_face_patch(int resolution, double scale) {
  if (resolution < 8) throw ValidationError("make_face_patch: resolution >= 8");
  return grid_mesh(resolution, resolution, [&](double s, double t) {
    return face_point(2.0 * s - 1.0, 2.0 * t - 1.0, scale);
  });
}

SyntheticHead make_synthetic_head(int resolution, double scale) {
  if (resolution < 24) {
    throw ValidationError("make_synthetic_head: resolution >= 24");
  }
  SyntheticHead head;
  head.mesh = make_face_patch(resolution, scale);
  const int n = resolution;

  auto grid_uv = [&](int idx) {
    const int i = idx % n;
    const int j = idx / n;
    return std::pair<double, double>{2.0 * i / (n - 1) - 1.0,
                                     2.0 * j / (n - 1) - 1.0};
  };

  std::vector<int> mouth, upper;
  for (int idx = 0; idx < n * n; ++idx) {
    const auto [u, v] = grid_uv(idx);
    if (std::abs(u) <= kMouthHalfWidthU &&
        std::abs(v - kMouthV) <= kLipGapV + 0.06) {
      mouth.push_back(idx);
    }
    if (v >= kUpperFaceMinV) upper.push_back(idx);
  }
  head.mouth = make_mask(std::move(mouth), "mouth", n * n);
  head.upper_face = make_mask(std::move(upper), "upper_face", n * n);

  auto nearest_vertex = [&](double u, double v) {
    const int i = static_cast<int>(std::lround((u + 1.0) * 0.5 * (n - 1)));
    const int j = static_cast<int>(std::lround((v + 1.0) * 0.5 * (n - 1)));
    return j * n + i;
  };
  const double upper_v = kMouthV + kLipGapV / 2.0;
  const double lower_v = kMouthV - kLipGapV / 2.0;
  head.lips = make_lip_landmarks(
      {nearest_vertex(-0.18, upper_v), nearest_vertex(0.0, upper_v),
       nearest_vertex(0.18, upper_v)},
      {nearest_vertex(-0.18, lower_v), nearest_vertex(0.0, lower_v),
       nearest_vertex(0.18, lower_v)},
      n * n);
  return head;
}

}  // namespace t4d
