#pragma once

#include <vector>

#include "t4d/mesh.hpp"

namespace t4d {

// Symmetric Hausdorff distance between two vertex sets (mm), kd-tree
// accelerated and exact.
double hausdorff(const VertexMatrix& a, const VertexMatrix& b);

// Surface as an unoriented varifold: per-face barycenters, areas and unit
// normals. Degenerate faces are excluded and counted, not repaired.
struct VarifoldRep {
  VertexMatrix centers;     // mm
  Eigen::VectorXd areas;    // mm^2
  VertexMatrix normals;     // unit
  int dropped_faces = 0;

  int size() const { return static_cast<int>(areas.size()); }
};

VarifoldRep varifold_rep(const Mesh& mesh);

struct VarifoldOptions {
  double sigma = 0.1;  // position kernel scale (mm)
  // Truncate the double sum to center pairs within radius_factor * sigma.
  // exp(-16) ~ 1.1e-7 makes 4 sigma a safe cutoff.
  bool truncate = false;
  double radius_factor = 4.0;
};

// Kernel inner product <mu_x, mu_y> = sum_f sum_g a_f a_g k_p(c_f, c_g)
// k_n(n_f, n_g) with Gaussian k_p(x,y) = exp(-||x-y||^2 / sigma^2) and
// unoriented k_n(u,v) = <u,v>^2.
double varifold_product(const VarifoldRep& x, const VarifoldRep& y,
                        const VarifoldOptions& options = {});

// Squared kernel metric <x,x> + <y,y> - 2<x,y>.
double varifold_metric(const VarifoldRep& x, const VarifoldRep& y,
                       const VarifoldOptions& options = {});

struct UnregisteredFrameMetrics {
  double hausdorff = 0.0;
  double chamfer = 0.0;
  double varifold = 0.0;
};

struct UnregisteredMetrics {
  std::vector<UnregisteredFrameMetrics> per_frame;
  UnregisteredFrameMetrics mean;
};

// Per-frame HD, Chamfer and varifold metric, plus unweighted means over
// the sequence. Arbitrary topologies per frame on both sides; only the
// lengths must match.
UnregisteredMetrics evaluate_unregistered(const MeshSequence& gt,
                                          const MeshSequence& pred,
                                          const VarifoldOptions& options = {},
                                          int jobs = 0);

}  // namespace t4d
