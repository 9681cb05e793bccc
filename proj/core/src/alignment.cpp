#include <Eigen/Dense>

#include "t4d/errors.hpp"
#include "t4d/sequence_tools.hpp"

namespace t4d {

AlignmentResult align_rigid(const Mesh& source, const Mesh& target,
                            bool with_scale) {
  if (!same_topology(source, target)) {
    throw ValidationError("align_rigid: source and target topologies differ");
  }
  const int v_count = source.vertex_count();
  if (v_count < 3) throw ValidationError("align_rigid: needs at least 3 vertices");

  const Eigen::RowVector3d centroid_src = source.vertices.colwise().mean();
  const Eigen::RowVector3d centroid_tgt = target.vertices.colwise().mean();
  const Eigen::MatrixXd src0 = source.vertices.rowwise() - centroid_src;
  const Eigen::MatrixXd tgt0 = target.vertices.rowwise() - centroid_tgt;

  const double src_var = src0.squaredNorm() / v_count;
  // cross-covariance mapping source onto target
  const Eigen::Matrix3d cov = (tgt0.transpose() * src0) / v_count;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d singular = svd.singularValues();
  // rank-3 centered configuration required; collinear or planar-degenerate
  // sources leave the rotation underdetermined
  if (src_var < 1e-24 || singular[1] < 1e-12 * std::max(singular[0], 1e-300)) {
    throw ValidationError("align_rigid: degenerate (rank-deficient) configuration");
  }

  Eigen::Vector3d correction = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    correction[2] = -1.0;
  }
  RigidTransform transform;
  transform.rotation =
      svd.matrixU() * correction.asDiagonal() * svd.matrixV().transpose();
  if (with_scale) {
    transform.scale = (singular.array() * correction.array()).sum() / src_var;
    if (!(transform.scale > 0.0)) {
      throw ValidationError("align_rigid: non-positive optimal scale");
    }
  }
  transform.translation =
      centroid_tgt.transpose() -
      transform.scale * (transform.rotation * centroid_src.transpose());

  AlignmentResult result;
  result.transform = transform;
  result.aligned = source;
  for (int i = 0; i < v_count; ++i) {
    result.aligned.vertices.row(i) =
        transform.apply(source.vertex(i)).transpose();
  }
  result.residual = (result.aligned.vertices - target.vertices).squaredNorm();
  return result;
}

MeshSequence align_sequence(const MeshSequence& seq, const Mesh& reference,
                            bool with_scale) {
  if (!seq.homogeneous()) {
    throw ValidationError("align_sequence: sequence must be homogeneous");
  }
  const Mesh& anchor = seq.neutral ? *seq.neutral : seq.frames[0];
  const RigidTransform transform =
      align_rigid(anchor, reference, with_scale).transform;

  MeshSequence out = seq;
  auto apply_all = [&](Mesh& mesh) {
    for (int i = 0; i < mesh.vertex_count(); ++i) {
      mesh.vertices.row(i) = transform.apply(mesh.vertex(i)).transpose();
    }
  };
  for (Mesh& frame : out.frames) apply_all(frame);
  if (out.neutral) apply_all(*out.neutral);
  return out;
}

}  // namespace t4d
