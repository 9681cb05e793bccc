#include "t4d/unregistered_metrics.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

#include "t4d/errors.hpp"
#include "t4d/kdtree.hpp"
#include "t4d/parallel.hpp"
#include "t4d/sequence_losses.hpp"

namespace t4d {

double hausdorff(const VertexMatrix& a, const VertexMatrix& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw ValidationError("hausdorff: point sets must be non-empty");
  }
  const KdTree3 tree_a(a);
  const KdTree3 tree_b(b);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    worst = std::max(worst, tree_b.nearest(a.row(k).transpose()).squared_distance);
  }
  for (Eigen::Index l = 0; l < b.rows(); ++l) {
    worst = std::max(worst, tree_a.nearest(b.row(l).transpose()).squared_distance);
  }
  return std::sqrt(worst);
}

VarifoldRep varifold_rep(const Mesh& mesh) {
  const int f_count = mesh.face_count();
  std::vector<int> kept;
  kept.reserve(static_cast<size_t>(f_count));
  for (int f = 0; f < f_count; ++f) {
    if (face_area(mesh, f) > kZeroAreaTolerance) kept.push_back(f);
  }
  if (kept.empty()) {
    throw ValidationError("varifold_rep: all faces are degenerate");
  }

  VarifoldRep rep;
  rep.dropped_faces = f_count - static_cast<int>(kept.size());
  rep.centers.resize(static_cast<Eigen::Index>(kept.size()), 3);
  rep.normals.resize(static_cast<Eigen::Index>(kept.size()), 3);
  rep.areas.resize(static_cast<Eigen::Index>(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) {
    const int f = kept[i];
    const Vec3 a = mesh.vertex(mesh.faces(f, 0));
    const Vec3 b = mesh.vertex(mesh.faces(f, 1));
    const Vec3 c = mesh.vertex(mesh.faces(f, 2));
    const Vec3 cross = (b - a).cross(c - a);
    const double twice_area = cross.norm();
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    rep.centers.row(row) = ((a + b + c) / 3.0).transpose();
    rep.areas[row] = 0.5 * twice_area;
    rep.normals.row(row) = (cross / twice_area).transpose();
  }
  return rep;
}

namespace {

inline double kernel_pair(const VarifoldRep& x, Eigen::Index f,
                          const VarifoldRep& y, Eigen::Index g,
                          double inv_sigma2) {
  const double d2 = (x.centers.row(f) - y.centers.row(g)).squaredNorm();
  const double dot = x.normals.row(f).dot(y.normals.row(g));
  return x.areas[f] * y.areas[g] * std::exp(-d2 * inv_sigma2) * dot * dot;
}

}  // namespace

double varifold_product(const VarifoldRep& x, const VarifoldRep& y,
                        const VarifoldOptions& options) {
  if (!(options.sigma > 0.0)) {
    throw ValidationError("varifold: sigma must be positive");
  }
  if (x.size() == 0 || y.size() == 0) {
    throw ValidationError("varifold: empty representation");
  }
  const double inv_sigma2 = 1.0 / (options.sigma * options.sigma);

  if (!options.truncate) {
    double sum = 0.0;
    for (Eigen::Index f = 0; f < x.centers.rows(); ++f) {
      for (Eigen::Index g = 0; g < y.centers.rows(); ++g) {
        sum += kernel_pair(x, f, y, g, inv_sigma2);
      }
    }
    return sum;
  }

  const double radius = options.radius_factor * options.sigma;
  const KdTree3 tree(y.centers);
  double sum = 0.0;
  std::vector<int> hits;
  for (Eigen::Index f = 0; f < x.centers.rows(); ++f) {
    tree.radius_query(x.centers.row(f).transpose(), radius, hits);
    for (int g : hits) {
      sum += kernel_pair(x, f, y, g, inv_sigma2);
    }
  }
  return sum;
}

double varifold_metric(const VarifoldRep& x, const VarifoldRep& y,
                       const VarifoldOptions& options) {
  const double xx = varifold_product(x, x, options);
  const double yy = varifold_product(y, y, options);
  const double xy = varifold_product(x, y, options);
  return xx + yy - 2.0 * xy;
}

UnregisteredMetrics evaluate_unregistered(const MeshSequence& gt,
                                          const MeshSequence& pred,
                                          const VarifoldOptions& options,
                                          int jobs) {
  if (gt.frame_count() != pred.frame_count()) {
    throw ValidationError("evaluate_unregistered: sequence lengths differ (" +
                          std::to_string(gt.frame_count()) + " vs " +
                          std::to_string(pred.frame_count()) + ")");
  }
  if (!(options.sigma > 0.0)) {
    throw ValidationError("evaluate_unregistered: sigma must be positive");
  }

  UnregisteredMetrics out;
  out.per_frame.resize(static_cast<size_t>(gt.frame_count()));
  parallel_for(
      0, gt.frame_count(),
      [&](int j) {
        UnregisteredFrameMetrics& frame = out.per_frame[static_cast<size_t>(j)];
        frame.hausdorff = hausdorff(gt.frames[j].vertices, pred.frames[j].vertices);
        frame.chamfer = chamfer(gt.frames[j].vertices, pred.frames[j].vertices);
        frame.varifold = varifold_metric(varifold_rep(gt.frames[j]),
                                         varifold_rep(pred.frames[j]), options);
      },
      jobs);

  for (const auto& frame : out.per_frame) {
    out.mean.hausdorff += frame.hausdorff;
    out.mean.chamfer += frame.chamfer;
    out.mean.varifold += frame.varifold;
  }
  const double t_count = gt.frame_count();
  out.mean.hausdorff /= t_count;
  out.mean.chamfer /= t_count;
  out.mean.varifold /= t_count;
  return out;
}

}  // namespace t4d
