#pragma once

#include <vector>

#include "t4d/mesh.hpp"

namespace t4d {

// Displacements below this norm (mm) carry no usable direction; cosine
// terms over them contribute 0.
inline constexpr double kZeroDisplacementEps = 1e-9;

// Frame-to-frame vertex displacements of a homogeneous sequence,
// steps[j] = frames[j+1] - frames[j], so T-1 entries.
struct DisplacementField {
  std::vector<VertexMatrix> steps;
};

DisplacementField displacement_field(const MeshSequence& seq);

// All pairwise losses take (gt, pred). The first four require both
// sequences homogeneous, same topology, same length; violations raise
// ValidationError. Values are means over the summed terms.

// mm^2
double loss_mse(const MeshSequence& gt, const MeshSequence& pred);

// mm^2; masked terms only, but still normalized by the full vertex count.
double loss_masked_mse(const MeshSequence& gt, const MeshSequence& pred,
                       const VertexMask& mask);

// mm^2; needs T >= 2.
double loss_velocity(const MeshSequence& gt, const MeshSequence& pred);

// dimensionless in [0, 2]; needs T >= 2.
double loss_cosine(const MeshSequence& gt, const MeshSequence& pred);

// 1 - cos(angle) between two displacement vectors, 0 if either norm is
// below kZeroDisplacementEps. Shared by loss_cosine and delta_cd.
double cosine_distance_term(const Vec3& d, const Vec3& d_hat);

// Symmetric squared-distance Chamfer between two point sets (mm^2),
// exact nearest neighbors via kd-tree.
double chamfer(const VertexMatrix& a, const VertexMatrix& b);

// Per-frame Chamfer averaged along the sequences (mm^2). Topologies may
// differ per frame on either side; lengths must match.
double dynamic_chamfer(const MeshSequence& gt, const MeshSequence& pred);

// Shared precondition check for the registered losses/metrics.
void require_registered_pair(const MeshSequence& gt, const MeshSequence& pred,
                             const std::string& context);

}  // namespace t4d
