#pragma once

// Shared test fixtures: small synthetic heads, perturbed prediction
// sequences, and rigid motions applied to whole sequences.

#include <cmath>
#include <random>

#include "t4d/mesh.hpp"
#include "t4d/sequence_tools.hpp"
#include "t4d/shape_primitives.hpp"

namespace t4d::testing {

struct FixturePair {
  SyntheticHead head;
  MeshSequence gt;
  MeshSequence pred;
};

// gt is a seeded talking sequence; pred adds a smooth per-vertex error
// field on top of a different-phase sequence, so every metric is nonzero
// but well-scaled.
inline FixturePair make_fixture_pair(std::uint64_t seed, int resolution = 31,
                                     int frames = 24) {
  FixturePair fix;
  fix.head = make_synthetic_head(resolution);

  SynthOptions gt_opts;
  gt_opts.frames = frames;
  gt_opts.seed = seed;
  fix.gt = synth_talking_sequence(fix.head.mesh, fix.head.lips, gt_opts);

  SynthOptions pred_opts = gt_opts;
  pred_opts.seed = seed ^ 0xabcdef12345ULL;
  pred_opts.amplitude = gt_opts.amplitude * 0.85;
  fix.pred = synth_talking_sequence(fix.head.mesh, fix.head.lips, pred_opts);

  std::mt19937_64 rng(seed * 2654435761ULL + 1);
  std::uniform_real_distribution<double> offset(-0.25, 0.25);
  const int v_count = fix.head.mesh.vertex_count();
  VertexMatrix field(v_count, 3);
  for (int k = 0; k < v_count; ++k) {
    field(k, 0) = offset(rng);
    field(k, 1) = offset(rng);
    field(k, 2) = offset(rng);
  }
  for (int j = 0; j < fix.pred.frame_count(); ++j) {
    const double fade = 0.5 + 0.5 * std::cos(0.37 * j);
    fix.pred.frames[static_cast<size_t>(j)].vertices += fade * field;
  }
  return fix;
}

inline MeshSequence transformed_sequence(const MeshSequence& seq,
                                         const Eigen::Matrix3d& rotation,
                                         const Vec3& translation) {
  MeshSequence out = seq;
  auto apply = [&](Mesh& mesh) {
    for (int i = 0; i < mesh.vertex_count(); ++i) {
      mesh.vertices.row(i) =
          (rotation * mesh.vertex(i) + translation).transpose();
    }
  };
  for (Mesh& frame : out.frames) apply(frame);
  if (out.neutral) apply(*out.neutral);
  return out;
}

}  // namespace t4d::testing
