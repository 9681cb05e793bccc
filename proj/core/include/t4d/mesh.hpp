#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace t4d {

using Vec3 = Eigen::Vector3d;
// Vertex positions in millimeters, one row per vertex.
using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
// Triangle connectivity, one row of three vertex indices per face.
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

// Area below which a triangle counts as degenerate (mm^2).
inline constexpr double kZeroAreaTolerance = 1e-12;

struct Mesh {
  VertexMatrix vertices;
  FaceMatrix faces;

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }
  Vec3 vertex(int i) const { return vertices.row(i).transpose(); }
};

// Per-face findings of a validation pass. Violations are reported,
// never silently dropped.
struct MeshValidation {
  std::vector<int> out_of_range_faces;
  std::vector<int> degenerate_faces;  // repeated indices
  std::vector<int> zero_area_faces;   // area <= kZeroAreaTolerance

  bool ok() const {
    return out_of_range_faces.empty() && degenerate_faces.empty() &&
           zero_area_faces.empty();
  }
};

MeshValidation validate_mesh(const Mesh& mesh);

// Throws ValidationError with a per-face diagnostic if the mesh violates
// any invariant. `context` names the offending file or frame.
void require_valid(const Mesh& mesh, const std::string& context = "mesh");

double face_area(const Mesh& mesh, int face);
double total_surface_area(const Mesh& mesh);
double max_edge_length(const Mesh& mesh);

// Two meshes share topology iff their face arrays are identical over the
// same vertex index space.
bool same_topology(const Mesh& a, const Mesh& b);

enum class TopologyMode { Homogeneous, Heterogeneous };

struct MeshSequence {
  std::vector<Mesh> frames;
  double fps = 0.0;
  std::optional<Mesh> neutral;
  TopologyMode topology_mode = TopologyMode::Homogeneous;

  int frame_count() const { return static_cast<int>(frames.size()); }
  bool homogeneous() const { return topology_mode == TopologyMode::Homogeneous; }
};

// Builds a sequence from frames, inferring topology_mode and checking the
// sequence invariants (T >= 1, fps > 0, neutral topology when homogeneous).
MeshSequence make_sequence(std::vector<Mesh> frames, double fps,
                           std::optional<Mesh> neutral = std::nullopt);

// Index set over a fixed topology. Indices are sorted, unique and < V.
struct VertexMask {
  std::vector<int> indices;
  std::string label;
  int topology_vertex_count = 0;

  bool empty() const { return indices.empty(); }
  int size() const { return static_cast<int>(indices.size()); }
};

VertexMask make_mask(std::vector<int> indices, std::string label,
                     int topology_vertex_count);

// Six tracked lip vertices, three per lip.
struct LipLandmarkSet {
  std::array<int, 3> upper{};
  std::array<int, 3> lower{};
  int topology_vertex_count = 0;
};

LipLandmarkSet make_lip_landmarks(const std::array<int, 3>& upper,
                                  const std::array<int, 3>& lower,
                                  int topology_vertex_count);

void require_mask_bound(const VertexMask& mask, int vertex_count,
                        const std::string& context);
void require_landmarks_bound(const LipLandmarkSet& lips, int vertex_count,
                             const std::string& context);

}  // namespace t4d
