#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>

#include "t4d/mesh.hpp"

namespace t4d {

// Similarity transform x -> scale * rotation * x + translation,
// rotation in SO(3) (no reflections).
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& x) const { return scale * (rotation * x) + translation; }
};

struct AlignmentResult {
  Mesh aligned;
  RigidTransform transform;
  double residual = 0.0;  // sum of squared correspondence errors (mm^2)
};

// Correspondence-based Procrustes: least-squares similarity transform from
// source onto target. Requires shared topology and a non-degenerate
// (rank-3 centered) source.
AlignmentResult align_rigid(const Mesh& source, const Mesh& target,
                            bool with_scale = false);

// One transform per sequence, estimated on the neutral frame (or frame 0)
// and applied to every frame, preserving intra-sequence motion.
MeshSequence align_sequence(const MeshSequence& seq, const Mesh& reference,
                            bool with_scale = false);

struct RemeshOptions {
  double up_fraction = 0.3;        // fraction of faces to subdivide, in [0,1]
  double down_target_ratio = 0.8;  // collapse until V <= ratio * V_original
  std::uint64_t seed = 0;
};

struct RemeshResult {
  Mesh mesh;
  // false when no legal collapse remained before reaching the target
  bool reached_target = true;
  int subdivided_faces = 0;
  int collapsed_edges = 0;
};

// Random remesh: conforming midpoint subdivision of a random face subset,
// then seeded shortest-edge collapses down to the vertex target. Output
// stays edge-manifold and free of degenerate faces; deterministic per seed.
RemeshResult remesh_random(const Mesh& mesh, const RemeshOptions& options);

// Full 1 -> 4 midpoint subdivision of every face.
Mesh midpoint_subdivide(const Mesh& mesh);

struct SynthOptions {
  int frames = 120;
  double fps = 30.0;
  double amplitude = 2.0;      // peak lower-lip displacement (mm)
  double frequency = 2.5;      // syllable rate (Hz)
  double falloff_radius = 8.0; // support of the motion around the lower lip (mm)
  std::uint64_t seed = 0;
};

// Procedural jaw motion for test fixtures: the lower-lip region moves down
// by amplitude * |sin| with a seeded phase and smooth spatial falloff.
// The template is the sequence's neutral frame.
MeshSequence synth_talking_sequence(const Mesh& template_mesh,
                                    const LipLandmarkSet& lips,
                                    const SynthOptions& options);

// Closed form of the generator's envelope at a frame; at the lower lip
// landmarks the y displacement is exactly -amplitude * envelope.
double synth_envelope(const SynthOptions& options, int frame);
double synth_phase(std::uint64_t seed);

// Classical (Torgerson) MDS embedding of a symmetric zero-diagonal
// distance matrix into `dims` dimensions.
Eigen::MatrixXd mds_project(const Eigen::MatrixXd& distances, int dims);

}  // namespace t4d
