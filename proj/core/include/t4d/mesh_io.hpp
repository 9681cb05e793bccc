#pragma once

#include <filesystem>
#include <string>

#include "t4d/mesh.hpp"

namespace t4d {

enum class MeshFormat { Obj, PlyAscii, Auto };

struct LoadOptions {
  MeshFormat format = MeshFormat::Auto;
  // Fan-triangulate polygon faces. Off by default: silent triangulation
  // changes operator matrices, so it has to be requested explicitly.
  bool triangulate_polygons = false;
};

Mesh load_mesh(const std::filesystem::path& path, const LoadOptions& options = {});

// ASCII output with fixed 9-significant-digit coordinate printing; saving a
// loaded mesh reproduces the coordinate text exactly once it is in that form.
void save_mesh(const std::filesystem::path& path, const Mesh& mesh,
               MeshFormat format = MeshFormat::Obj);

// Loads all files matching `pattern` (a shell-style glob over filenames)
// in `dir`. Frame order is the natural numeric order of the filenames and
// does not depend on directory listing order.
MeshSequence load_sequence(const std::filesystem::path& dir,
                           const std::string& pattern, double fps,
                           const LoadOptions& options = {});

void save_sequence(const std::filesystem::path& dir, const MeshSequence& seq,
                   const std::string& stem = "frame",
                   MeshFormat format = MeshFormat::Obj);

// Mask JSON: {"label": string, "indices": [int...]}
VertexMask load_mask(const std::filesystem::path& path, int vertex_count);
void save_mask(const std::filesystem::path& path, const VertexMask& mask);

// Lip landmark JSON: {"upper": [i,j,k], "lower": [l,m,n]}
LipLandmarkSet load_lip_landmarks(const std::filesystem::path& path,
                                  int vertex_count);
void save_lip_landmarks(const std::filesystem::path& path,
                        const LipLandmarkSet& lips);

// Filename ordering used by load_sequence: digit runs compare numerically,
// other characters bytewise ("frame_2" < "frame_10").
bool natural_less(const std::string& a, const std::string& b);

bool glob_match(const std::string& pattern, const std::string& name);

}  // namespace t4d
