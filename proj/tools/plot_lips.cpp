#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "commands.hpp"
#include "t4d/errors.hpp"
#include "t4d/mesh_io.hpp"
#include "t4d/registered_metrics.hpp"

namespace t4d::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

// One panel per lip landmark: y coordinate against time, ground truth as a
// solid line, prediction dashed.
int run_plot_lips(const PlotLipsArgs& args) {
  const MeshSequence gt = load_sequence(args.gt_dir, args.pattern, args.fps);
  const MeshSequence pred = load_sequence(args.pred_dir, args.pattern, args.fps);
  if (!gt.homogeneous() || !pred.homogeneous() ||
      !same_topology(gt.frames[0], pred.frames[0])) {
    throw ValidationError("plot-lips: needs registered gt and pred sequences");
  }
  if (gt.frame_count() != pred.frame_count()) {
    throw ValidationError("plot-lips: sequence lengths differ");
  }
  const LipLandmarkSet lips =
      load_lip_landmarks(args.lips_path, gt.frames[0].vertex_count());

  const TrajectorySet tg = extract_trajectories(gt, lips);
  const TrajectorySet tp = extract_trajectories(pred, lips);
  const int t_count = gt.frame_count();
  const double duration = (t_count - 1) / gt.fps;

  const int panel_w = 380, panel_h = 150, margin = 45, gap = 18;
  const int cols = 2, rows = 3;
  const int width = cols * (panel_w + margin + gap);
  const int height = rows * (panel_h + margin + gap);

  const char* labels[6] = {"upper lip 1", "upper lip 2", "upper lip 3",
                           "lower lip 1", "lower lip 2", "lower lip 3"};

  std::ofstream out(args.out_path);
  if (!out) throw ValidationError("cannot write " + args.out_path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int panel = 0; panel < 6; ++panel) {
    const auto& traj_gt = tg.trajectories[static_cast<size_t>(panel)];
    const auto& traj_pred = tp.trajectories[static_cast<size_t>(panel)];

    double y_min = 1e300, y_max = -1e300;
    for (int j = 0; j < t_count; ++j) {
      for (double y : {traj_gt.points[static_cast<size_t>(j)][1],
                       traj_pred.points[static_cast<size_t>(j)][1]}) {
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
    if (y_max - y_min < 1e-9) {
      y_min -= 0.5;
      y_max += 0.5;
    }

    const int col = panel % cols, row = panel / cols;
    const int x0 = margin + col * (panel_w + margin + gap);
    const int y0 = margin / 2 + row * (panel_h + margin + gap);

    auto sx = [&](int j) {
      return x0 + (t_count > 1 ? panel_w * static_cast<double>(j) / (t_count - 1)
                               : panel_w / 2.0);
    };
    auto sy = [&](double y) {
      return y0 + panel_h * (1.0 - (y - y_min) / (y_max - y_min));
    };

    out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << panel_w
        << "\" height=\"" << panel_h
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << x0 << "\" y=\"" << y0 - 5
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << labels[panel]
        << " (vertex " << tg.landmark_indices[static_cast<size_t>(panel)]
        << ")</text>\n";
    out << "<text x=\"" << x0 + panel_w - 60 << "\" y=\"" << y0 + panel_h + 16
        << "\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(duration)
        << " s</text>\n";
    out << "<text x=\"" << x0 << "\" y=\"" << y0 + panel_h + 16
        << "\" font-size=\"10\" font-family=\"sans-serif\">0 s</text>\n";

    auto emit_curve = [&](const Trajectory& traj, const char* color, bool dashed) {
      if (t_count == 1) {
        out << "<circle cx=\"" << sx(0) << "\" cy=\"" << sy(traj.points[0][1])
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        return;
      }
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"";
      if (dashed) out << " stroke-dasharray=\"6 4\"";
      out << " points=\"";
      for (int j = 0; j < t_count; ++j) {
        out << sx(j) << "," << sy(traj.points[static_cast<size_t>(j)][1]) << " ";
      }
      out << "\"/>\n";
    };
    emit_curve(traj_gt, "#1f5fbf", false);
    emit_curve(traj_pred, "#c23b22", true);
  }

  // legend
  out << "<text x=\"" << margin << "\" y=\"" << height - 8
      << "\" font-size=\"12\" font-family=\"sans-serif\">"
      << "<tspan fill=\"#1f5fbf\">ground truth</tspan>"
      << "  <tspan fill=\"#c23b22\">prediction (dashed)</tspan></text>\n";
  out << "</svg>\n";
  if (!out) throw ValidationError("write failed for " + args.out_path);
  std::cout << "wrote " << args.out_path << "\n";
  return 0;
}

}  // namespace t4d::cli
