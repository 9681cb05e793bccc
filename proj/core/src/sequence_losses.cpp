#include "t4d/sequence_losses.hpp"

#include <cmath>
#include <string>

#include "t4d/errors.hpp"
#include "t4d/kdtree.hpp"

namespace t4d {

void require_registered_pair(const MeshSequence& gt, const MeshSequence& pred,
                             const std::string& context) {
  if (gt.frame_count() != pred.frame_count()) {
    throw ValidationError(context + ": sequence lengths differ (" +
                          std::to_string(gt.frame_count()) + " vs " +
                          std::to_string(pred.frame_count()) + ")");
  }
  if (!gt.homogeneous() || !pred.homogeneous()) {
    throw ValidationError(context +
                          ": sequences must be homogeneous; use the "
                          "unregistered metrics for per-frame topologies");
  }
  if (!same_topology(gt.frames[0], pred.frames[0])) {
    throw ValidationError(context + ": gt and pred topologies differ");
  }
}

DisplacementField displacement_field(const MeshSequence& seq) {
  if (!seq.homogeneous()) {
    throw ValidationError("displacement field requires a homogeneous sequence");
  }
  DisplacementField field;
  field.steps.reserve(static_cast<size_t>(std::max(0, seq.frame_count() - 1)));
  for (int j = 1; j < seq.frame_count(); ++j) {
    field.steps.push_back(seq.frames[j].vertices - seq.frames[j - 1].vertices);
  }
  return field;
}

double loss_mse(const MeshSequence& gt, const MeshSequence& pred) {
  require_registered_pair(gt, pred, "loss_mse");
  const int t_count = gt.frame_count();
  const int v_count = gt.frames[0].vertex_count();
  double sum = 0.0;
  for (int j = 0; j < t_count; ++j) {
    sum += (gt.frames[j].vertices - pred.frames[j].vertices).squaredNorm();
  }
  return sum / (static_cast<double>(t_count) * v_count);
}

double loss_masked_mse(const MeshSequence& gt, const MeshSequence& pred,
                       const VertexMask& mask) {
  require_registered_pair(gt, pred, "loss_masked_mse");
  require_mask_bound(mask, gt.frames[0].vertex_count(), "loss_masked_mse");
  const int t_count = gt.frame_count();
  const int v_count = gt.frames[0].vertex_count();
  double sum = 0.0;
  for (int j = 0; j < t_count; ++j) {
    for (int k : mask.indices) {
      sum += (gt.frames[j].vertices.row(k) - pred.frames[j].vertices.row(k))
                 .squaredNorm();
    }
  }
  return sum / (static_cast<double>(t_count) * v_count);
}

double loss_velocity(const MeshSequence& gt, const MeshSequence& pred) {
  require_registered_pair(gt, pred, "loss_velocity");
  if (gt.frame_count() < 2) {
    throw ValidationError("loss_velocity: needs at least 2 frames");
  }
  const DisplacementField d = displacement_field(gt);
  const DisplacementField d_hat = displacement_field(pred);
  const int v_count = gt.frames[0].vertex_count();
  double sum = 0.0;
  for (size_t j = 0; j < d.steps.size(); ++j) {
    sum += (d.steps[j] - d_hat.steps[j]).squaredNorm();
  }
  return sum / (static_cast<double>(d.steps.size()) * v_count);
}

double cosine_distance_term(const Vec3& d, const Vec3& d_hat) {
  const double nd = d.squaredNorm();
  const double nh = d_hat.squaredNorm();
  const double eps2 = kZeroDisplacementEps * kZeroDisplacementEps;
  if (nd < eps2 || nh < eps2) return 0.0;
  // sqrt(nd * nh) rather than |d|*|d_hat|: identical vectors then give
  // exactly cos = 1 and a zero term.
  return 1.0 - d.dot(d_hat) / std::sqrt(nd * nh);
}

double loss_cosine(const MeshSequence& gt, const MeshSequence& pred) {
  require_registered_pair(gt, pred, "loss_cosine");
  if (gt.frame_count() < 2) {
    throw ValidationError("loss_cosine: needs at least 2 frames");
  }
  const DisplacementField d = displacement_field(gt);
  const DisplacementField d_hat = displacement_field(pred);
  const int v_count = gt.frames[0].vertex_count();
  double sum = 0.0;
  for (size_t j = 0; j < d.steps.size(); ++j) {
    for (int k = 0; k < v_count; ++k) {
      sum += cosine_distance_term(d.steps[j].row(k).transpose(),
                                  d_hat.steps[j].row(k).transpose());
    }
  }
  return sum / (static_cast<double>(d.steps.size()) * v_count);
}

double chamfer(const VertexMatrix& a, const VertexMatrix& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw ValidationError("chamfer: point sets must be non-empty");
  }
  const KdTree3 tree_a(a);
  const KdTree3 tree_b(b);

  double sum_b_to_a = 0.0;
  for (Eigen::Index l = 0; l < b.rows(); ++l) {
    sum_b_to_a += tree_a.nearest(b.row(l).transpose()).squared_distance;
  }
  double sum_a_to_b = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    sum_a_to_b += tree_b.nearest(a.row(k).transpose()).squared_distance;
  }
  return sum_b_to_a / static_cast<double>(b.rows()) +
         sum_a_to_b / static_cast<double>(a.rows());
}

double dynamic_chamfer(const MeshSequence& gt, const MeshSequence& pred) {
  if (gt.frame_count() != pred.frame_count()) {
    throw ValidationError("dynamic_chamfer: sequence lengths differ (" +
                          std::to_string(gt.frame_count()) + " vs " +
                          std::to_string(pred.frame_count()) + ")");
  }
  double sum = 0.0;
  for (int j = 0; j < gt.frame_count(); ++j) {
    sum += chamfer(gt.frames[j].vertices, pred.frames[j].vertices);
  }
  return sum / gt.frame_count();
}

}  // namespace t4d
