#pragma once

#include <optional>
#include <vector>

#include "t4d/mesh.hpp"

namespace t4d {

// 3D motion trajectory of one tracked vertex, one point per frame (mm).
struct Trajectory {
  std::vector<Vec3> points;

  int size() const { return static_cast<int>(points.size()); }
};

// One trajectory per lip landmark, upper row then lower row.
struct TrajectorySet {
  std::vector<Trajectory> trajectories;
  std::vector<int> landmark_indices;
};

TrajectorySet extract_trajectories(const MeshSequence& seq,
                                   const LipLandmarkSet& lips);

struct DtwOptions {
  // Sakoe-Chiba band half-width in frames; unset = unconstrained.
  std::optional<int> band;
};

// sqrt of the minimum over monotone warping paths of the summed squared
// point distances (mm). Steps are right, down, diagonal.
double dtw(const Trajectory& p, const Trajectory& q, const DtwOptions& = {});

// Discrete Frechet distance: min over monotone couplings of the max
// pairwise distance (mm).
double frechet(const Trajectory& p, const Trajectory& q);

// Mean squared error between per-step displacement vectors (mm^2);
// trajectories must have equal length n >= 2.
double delta_m(const Trajectory& p, const Trajectory& q);

// Mean cosine distance between per-step displacements, in [0, 2];
// zero-norm steps contribute 0.
double delta_cd(const Trajectory& p, const Trajectory& q);

enum class FrameAggregation { Mean, Max };

// Lip-Vertex Error (mm^2): per frame the max squared error over mouth
// vertices, then aggregated across frames (mean by default).
double lve(const MeshSequence& gt, const MeshSequence& pred,
           const VertexMask& mouth,
           FrameAggregation frames = FrameAggregation::Mean);

// Mean Vertex Error (mm^2): per frame the mean squared error over all
// vertices, then aggregated across frames (max by default, matching the
// "maximum of the mean squared error" reading).
double mve(const MeshSequence& gt, const MeshSequence& pred,
           FrameAggregation frames = FrameAggregation::Max);

// Face Dynamics Deviation (mm): per masked vertex the population standard
// deviation over frames of its displacement-from-first-frame magnitude;
// FDD is the mean over masked vertices of dyn_gt - dyn_pred (signed).
double fdd(const MeshSequence& gt, const MeshSequence& pred,
           const VertexMask& upper_face);

struct RegisteredOptions {
  FrameAggregation lve_frames = FrameAggregation::Mean;
  FrameAggregation mve_frames = FrameAggregation::Max;
  DtwOptions dtw;
};

// All seven registered metrics of one sequence pair. Trajectory metrics
// are unweighted means over the six lip landmarks. Raw units (mm / mm^2);
// paper-style scale factors apply only at report formatting time.
struct RegisteredMetrics {
  double lve = 0.0;
  double mve = 0.0;
  double fdd = 0.0;
  double fdd_abs = 0.0;
  double dtw = 0.0;
  double frechet = 0.0;
  double delta_m = 0.0;
  double delta_cd = 0.0;
};

RegisteredMetrics evaluate_registered(const MeshSequence& gt,
                                      const MeshSequence& pred,
                                      const VertexMask& mouth,
                                      const VertexMask& upper_face,
                                      const LipLandmarkSet& lips,
                                      const RegisteredOptions& options = {});

}  // namespace t4d
