#include "t4d/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "t4d/errors.hpp"

namespace t4d {

MeshValidation validate_mesh(const Mesh& mesh) {
  MeshValidation report;
  const int v = mesh.vertex_count();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    if (a < 0 || a >= v || b < 0 || b >= v || c < 0 || c >= v) {
      report.out_of_range_faces.push_back(f);
      continue;
    }
    if (a == b || b == c || a == c) {
      report.degenerate_faces.push_back(f);
      continue;
    }
    if (face_area(mesh, f) <= kZeroAreaTolerance) {
      report.zero_area_faces.push_back(f);
    }
  }
  return report;
}

namespace {

void append_face_list(std::ostringstream& out, const char* kind,
                      const std::vector<int>& faces) {
  if (faces.empty()) return;
  out << "; " << faces.size() << " " << kind << " face(s):";
  const size_t shown = std::min<size_t>(faces.size(), 8);
  for (size_t i = 0; i < shown; ++i) out << " " << faces[i];
  if (faces.size() > shown) out << " ...";
}

}  // namespace

void require_valid(const Mesh& mesh, const std::string& context) {
  const MeshValidation report = validate_mesh(mesh);
  if (report.ok()) return;
  std::ostringstream msg;
  msg << context << ": invalid mesh";
  append_face_list(msg, "out-of-range", report.out_of_range_faces);
  append_face_list(msg, "degenerate", report.degenerate_faces);
  append_face_list(msg, "zero-area", report.zero_area_faces);
  throw ValidationError(msg.str());
}

double face_area(const Mesh& mesh, int face) {
  const Vec3 a = mesh.vertex(mesh.faces(face, 0));
  const Vec3 b = mesh.vertex(mesh.faces(face, 1));
  const Vec3 c = mesh.vertex(mesh.faces(face, 2));
  return 0.5 * (b - a).cross(c - a).norm();
}

double total_surface_area(const Mesh& mesh) {
  double area = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) area += face_area(mesh, f);
  return area;
}

double max_edge_length(const Mesh& mesh) {
  double longest = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const Vec3 p = mesh.vertex(mesh.faces(f, e));
      const Vec3 q = mesh.vertex(mesh.faces(f, (e + 1) % 3));
      longest = std::max(longest, (p - q).norm());
    }
  }
  return longest;
}

bool same_topology(const Mesh& a, const Mesh& b) {
  return a.vertex_count() == b.vertex_count() &&
         a.faces.rows() == b.faces.rows() && a.faces == b.faces;
}

MeshSequence make_sequence(std::vector<Mesh> frames, double fps,
                           std::optional<Mesh> neutral) {
  if (frames.empty()) throw ValidationError("sequence: needs at least one frame");
  if (!(fps > 0.0)) throw ValidationError("sequence: fps must be positive");

  bool homogeneous = true;
  for (size_t i = 1; i < frames.size(); ++i) {
    if (!same_topology(frames[0], frames[i])) {
      homogeneous = false;
      break;
    }
  }
  if (neutral && homogeneous && !same_topology(frames[0], *neutral)) {
    throw ValidationError(
        "sequence: neutral frame does not share the frames' topology");
  }

  MeshSequence seq;
  seq.frames = std::move(frames);
  seq.fps = fps;
  seq.neutral = std::move(neutral);
  seq.topology_mode =
      homogeneous ? TopologyMode::Homogeneous : TopologyMode::Heterogeneous;
  return seq;
}

VertexMask make_mask(std::vector<int> indices, std::string label,
                     int topology_vertex_count) {
  std::sort(indices.begin(), indices.end());
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= topology_vertex_count) {
      throw ValidationError("mask '" + label + "': index " +
                            std::to_string(indices[i]) + " out of range [0, " +
                            std::to_string(topology_vertex_count) + ")");
    }
    if (i > 0 && indices[i] == indices[i - 1]) {
      throw ValidationError("mask '" + label + "': duplicate index " +
                            std::to_string(indices[i]));
    }
  }
  VertexMask mask;
  mask.indices = std::move(indices);
  mask.label = std::move(label);
  mask.topology_vertex_count = topology_vertex_count;
  return mask;
}

LipLandmarkSet make_lip_landmarks(const std::array<int, 3>& upper,
                                  const std::array<int, 3>& lower,
                                  int topology_vertex_count) {
  std::set<int> unique;
  for (int i : upper) unique.insert(i);
  for (int i : lower) unique.insert(i);
  if (unique.size() != 6) {
    throw ValidationError("lip landmarks: the six indices must be distinct");
  }
  for (int i : unique) {
    if (i < 0 || i >= topology_vertex_count) {
      throw ValidationError("lip landmarks: index " + std::to_string(i) +
                            " out of range [0, " +
                            std::to_string(topology_vertex_count) + ")");
    }
  }
  LipLandmarkSet lips;
  lips.upper = upper;
  lips.lower = lower;
  lips.topology_vertex_count = topology_vertex_count;
  return lips;
}

void require_mask_bound(const VertexMask& mask, int vertex_count,
                        const std::string& context) {
  if (mask.topology_vertex_count != vertex_count) {
    throw ValidationError(context + ": mask '" + mask.label + "' bound to V=" +
                          std::to_string(mask.topology_vertex_count) +
                          " but mesh has V=" + std::to_string(vertex_count));
  }
}

void require_landmarks_bound(const LipLandmarkSet& lips, int vertex_count,
                             const std::string& context) {
  if (lips.topology_vertex_count != vertex_count) {
    throw ValidationError(context + ": lip landmarks bound to V=" +
                          std::to_string(lips.topology_vertex_count) +
                          " but mesh has V=" + std::to_string(vertex_count));
  }
}

}  // namespace t4d
