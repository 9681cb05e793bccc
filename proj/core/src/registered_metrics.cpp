#include "t4d/registered_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "t4d/errors.hpp"
#include "t4d/sequence_losses.hpp"

namespace t4d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_empty(const Trajectory& p, const Trajectory& q,
                       const char* context) {
  if (p.size() == 0 || q.size() == 0) {
    throw ValidationError(std::string(context) + ": empty trajectory");
  }
}

void require_equal_length(const Trajectory& p, const Trajectory& q,
                          const char* context) {
  if (p.size() != q.size()) {
    throw ValidationError(std::string(context) + ": trajectory lengths differ (" +
                          std::to_string(p.size()) + " vs " +
                          std::to_string(q.size()) + ")");
  }
}

}  // namespace

TrajectorySet extract_trajectories(const MeshSequence& seq,
                                   const LipLandmarkSet& lips) {
  if (!seq.homogeneous()) {
    throw ValidationError("extract_trajectories: sequence must be homogeneous");
  }
  require_landmarks_bound(lips, seq.frames[0].vertex_count(),
                          "extract_trajectories");

  TrajectorySet set;
  for (int idx : lips.upper) set.landmark_indices.push_back(idx);
  for (int idx : lips.lower) set.landmark_indices.push_back(idx);
  set.trajectories.resize(set.landmark_indices.size());
  for (size_t t = 0; t < set.landmark_indices.size(); ++t) {
    const int k = set.landmark_indices[t];
    auto& points = set.trajectories[t].points;
    points.reserve(static_cast<size_t>(seq.frame_count()));
    for (const Mesh& frame : seq.frames) points.push_back(frame.vertex(k));
  }
  return set;
}

double dtw(const Trajectory& p, const Trajectory& q, const DtwOptions& options) {
  require_non_empty(p, q, "dtw");
  const int n = p.size();
  const int m = q.size();
  const int band = options.band.value_or(std::max(n, m));

  // Rolling two-row DP over cumulative squared costs.
  std::vector<double> prev(static_cast<size_t>(m), kInf);
  std::vector<double> curr(static_cast<size_t>(m), kInf);
  for (int i = 0; i < n; ++i) {
    std::fill(curr.begin(), curr.end(), kInf);
    const int j_lo = std::max(0, i - band);
    const int j_hi = std::min(m - 1, i + band);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double cost = (p.points[i] - q.points[j]).squaredNorm();
      if (i == 0 && j == 0) {
        curr[j] = cost;
        continue;
      }
      double best = kInf;
      if (i > 0) best = std::min(best, prev[j]);
      if (j > 0) best = std::min(best, curr[j - 1]);
      if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      curr[j] = best + cost;
    }
    std::swap(prev, curr);
  }
  const double total = prev[m - 1];
  if (!std::isfinite(total)) {
    throw ValidationError("dtw: band too narrow for the given lengths");
  }
  return std::sqrt(total);
}

double frechet(const Trajectory& p, const Trajectory& q) {
  require_non_empty(p, q, "frechet");
  const int n = p.size();
  const int m = q.size();

  // Coupling recursion: c(i,j) = max(d(i,j), min of the three predecessors).
  std::vector<double> prev(static_cast<size_t>(m));
  std::vector<double> curr(static_cast<size_t>(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double d = (p.points[i] - q.points[j]).norm();
      double reach;
      if (i == 0 && j == 0) {
        reach = d;
      } else {
        double best = kInf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, curr[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
        reach = std::max(best, d);
      }
      curr[j] = reach;
    }
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

double delta_m(const Trajectory& p, const Trajectory& q) {
  require_equal_length(p, q, "delta_m");
  const int n = p.size();
  if (n < 2) throw ValidationError("delta_m: needs at least 2 points");
  double sum = 0.0;
  for (int i = 1; i < n; ++i) {
    const Vec3 dp = p.points[i] - p.points[i - 1];
    const Vec3 dq = q.points[i] - q.points[i - 1];
    sum += (dp - dq).squaredNorm();
  }
  return sum / (n - 1);
}

double delta_cd(const Trajectory& p, const Trajectory& q) {
  require_equal_length(p, q, "delta_cd");
  const int n = p.size();
  if (n < 2) throw ValidationError("delta_cd: needs at least 2 points");
  double sum = 0.0;
  for (int i = 1; i < n; ++i) {
    const Vec3 dp = p.points[i] - p.points[i - 1];
    const Vec3 dq = q.points[i] - q.points[i - 1];
    sum += cosine_distance_term(dp, dq);
  }
  return sum / (n - 1);
}

double lve(const MeshSequence& gt, const MeshSequence& pred,
           const VertexMask& mouth, FrameAggregation frames) {
  require_registered_pair(gt, pred, "lve");
  require_mask_bound(mouth, gt.frames[0].vertex_count(), "lve");
  if (mouth.empty()) throw ValidationError("lve: mouth mask is empty");

  double agg = frames == FrameAggregation::Max ? -kInf : 0.0;
  for (int j = 0; j < gt.frame_count(); ++j) {
    double frame_max = 0.0;
    for (int k : mouth.indices) {
      const double e2 =
          (gt.frames[j].vertices.row(k) - pred.frames[j].vertices.row(k))
              .squaredNorm();
      frame_max = std::max(frame_max, e2);
    }
    if (frames == FrameAggregation::Max) {
      agg = std::max(agg, frame_max);
    } else {
      agg += frame_max;
    }
  }
  return frames == FrameAggregation::Max ? agg : agg / gt.frame_count();
}

double mve(const MeshSequence& gt, const MeshSequence& pred,
           FrameAggregation frames) {
  require_registered_pair(gt, pred, "mve");
  const int v_count = gt.frames[0].vertex_count();
  double agg = frames == FrameAggregation::Max ? -kInf : 0.0;
  for (int j = 0; j < gt.frame_count(); ++j) {
    const double frame_mean =
        (gt.frames[j].vertices - pred.frames[j].vertices).squaredNorm() / v_count;
    if (frames == FrameAggregation::Max) {
      agg = std::max(agg, frame_mean);
    } else {
      agg += frame_mean;
    }
  }
  return frames == FrameAggregation::Max ? agg : agg / gt.frame_count();
}

namespace {

// Population standard deviation over frames of ||m_k^t - m_k^0||.
double dynamics_deviation(const MeshSequence& seq, int vertex) {
  const int t_count = seq.frame_count();
  std::vector<double> magnitude(static_cast<size_t>(t_count));
  const Vec3 base = seq.frames[0].vertex(vertex);
  for (int t = 0; t < t_count; ++t) {
    magnitude[static_cast<size_t>(t)] = (seq.frames[t].vertex(vertex) - base).norm();
  }
  double mean = 0.0;
  for (double m : magnitude) mean += m;
  mean /= t_count;
  double var = 0.0;
  for (double m : magnitude) var += (m - mean) * (m - mean);
  return std::sqrt(var / t_count);
}

}  // namespace

double fdd(const MeshSequence& gt, const MeshSequence& pred,
           const VertexMask& upper_face) {
  require_registered_pair(gt, pred, "fdd");
  require_mask_bound(upper_face, gt.frames[0].vertex_count(), "fdd");
  if (upper_face.empty()) throw ValidationError("fdd: upper-face mask is empty");
  if (gt.frame_count() < 2) throw ValidationError("fdd: needs at least 2 frames");

  double sum = 0.0;
  for (int k : upper_face.indices) {
    sum += dynamics_deviation(gt, k) - dynamics_deviation(pred, k);
  }
  return sum / upper_face.size();
}

RegisteredMetrics evaluate_registered(const MeshSequence& gt,
                                      const MeshSequence& pred,
                                      const VertexMask& mouth,
                                      const VertexMask& upper_face,
                                      const LipLandmarkSet& lips,
                                      const RegisteredOptions& options) {
  require_registered_pair(gt, pred, "evaluate_registered");

  RegisteredMetrics out;
  out.lve = lve(gt, pred, mouth, options.lve_frames);
  out.mve = mve(gt, pred, options.mve_frames);
  out.fdd = fdd(gt, pred, upper_face);
  out.fdd_abs = std::abs(out.fdd);

  const TrajectorySet traj_gt = extract_trajectories(gt, lips);
  const TrajectorySet traj_pred = extract_trajectories(pred, lips);
  const int count = static_cast<int>(traj_gt.trajectories.size());
  for (int t = 0; t < count; ++t) {
    const Trajectory& p = traj_gt.trajectories[static_cast<size_t>(t)];
    const Trajectory& q = traj_pred.trajectories[static_cast<size_t>(t)];
    out.dtw += dtw(p, q, options.dtw);
    out.frechet += frechet(p, q);
    out.delta_m += delta_m(p, q);
    out.delta_cd += delta_cd(p, q);
  }
  out.dtw /= count;
  out.frechet /= count;
  out.delta_m /= count;
  out.delta_cd /= count;
  return out;
}

}  // namespace t4d
