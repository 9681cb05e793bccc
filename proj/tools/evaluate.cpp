#include <algorithm>
#include <filesystem>
#include <iostream>
#include <vector>

#include "commands.hpp"
#include "t4d/errors.hpp"
#include "t4d/mesh_io.hpp"
#include "t4d/metric_report.hpp"
#include "t4d/parallel.hpp"
#include "t4d/registered_metrics.hpp"
#include "t4d/sequence_losses.hpp"
#include "t4d/unregistered_metrics.hpp"
#include "t4d/version.hpp"

namespace fs = std::filesystem;

namespace t4d::cli {

namespace {

// A sequence pair is either the directory itself or one matching
// subdirectory per sequence.
std::vector<std::string> sequence_ids(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("not a directory: " + dir.string());
  }
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  if (ids.empty()) return {"."};
  std::sort(ids.begin(), ids.end(), natural_less);
  return ids;
}

FrameAggregation parse_aggregation(const std::string& text, const char* flag) {
  if (text == "mean") return FrameAggregation::Mean;
  if (text == "max") return FrameAggregation::Max;
  throw ValidationError(std::string(flag) + ": expected 'mean' or 'max', got '" +
                        text + "'");
}

void apply_conventions_file(EvaluateArgs& args) {
  const Json prior = load_json(args.conventions_from);
  if (!prior.contains("metadata") || !prior["metadata"].contains("conventions")) {
    throw ValidationError(args.conventions_from +
                          ": no metadata.conventions to adopt");
  }
  const Json& conv = prior["metadata"]["conventions"];
  if (conv.contains("lve_frame_aggregation")) {
    args.lve_frames = conv["lve_frame_aggregation"].get<std::string>();
  }
  if (conv.contains("mve_frame_aggregation")) {
    args.mve_frames = conv["mve_frame_aggregation"].get<std::string>();
  }
  if (conv.contains("dtw_band")) args.dtw_band = conv["dtw_band"].get<int>();
  if (conv.contains("sigma_mm")) args.sigma = conv["sigma_mm"].get<double>();
  if (conv.contains("varifold_truncation_factor")) {
    const double factor = conv["varifold_truncation_factor"].get<double>();
    args.exact_varifold = factor <= 0.0;
    if (factor > 0.0) args.truncation_factor = factor;
  }
}

Json conventions_json(const EvaluateArgs& args) {
  Json conv = Json::object();
  conv["loss_normalization"] = "mean_over_summed_terms";
  conv["cosine_zero_norm_epsilon_mm"] = kZeroDisplacementEps;
  conv["lve_frame_aggregation"] = args.lve_frames;
  conv["mve_frame_aggregation"] = args.mve_frames;
  conv["fdd_dispersion"] = "population_std_of_displacement_from_first_frame";
  conv["fdd_sign"] = "gt_minus_pred";
  conv["trajectory_aggregation"] = "unweighted_mean_over_6_landmarks";
  conv["dtw_band"] = args.dtw_band;
  conv["nn_tie_break"] = "lowest_index";
  conv["hausdorff_definition"] = "vertex_set";
  conv["sigma_mm"] = args.sigma;
  conv["varifold_truncation_factor"] =
      args.exact_varifold ? 0.0 : args.truncation_factor;
  conv["alignment"] = "none";
  return conv;
}

}  // namespace

int run_evaluate(EvaluateArgs args) {
  if (!args.conventions_from.empty()) apply_conventions_file(args);
  if (args.mode != "registered" && args.mode != "unregistered") {
    throw ValidationError("evaluate: --mode must be registered or unregistered");
  }
  const bool registered = args.mode == "registered";
  if (registered &&
      (args.mouth_mask_path.empty() || args.upper_mask_path.empty() ||
       args.lips_path.empty())) {
    throw ValidationError(
        "evaluate: registered mode needs --mouth-mask, --upper-mask and --lips");
  }

  const std::vector<std::string> gt_ids = sequence_ids(args.gt_dir);
  const std::vector<std::string> pred_ids = sequence_ids(args.pred_dir);
  if (gt_ids != pred_ids) {
    std::string msg = "evaluate: sequence sets differ (gt has " +
                      std::to_string(gt_ids.size()) + ", pred has " +
                      std::to_string(pred_ids.size()) + ")";
    for (const auto& id : gt_ids) {
      if (std::find(pred_ids.begin(), pred_ids.end(), id) == pred_ids.end()) {
        msg += "; missing in pred: " + id;
        break;
      }
    }
    for (const auto& id : pred_ids) {
      if (std::find(gt_ids.begin(), gt_ids.end(), id) == gt_ids.end()) {
        msg += "; missing in gt: " + id;
        break;
      }
    }
    throw ValidationError(msg);
  }

  RegisteredOptions reg_options;
  VarifoldOptions var_options;
  if (registered) {
    reg_options.lve_frames = parse_aggregation(args.lve_frames, "--lve-frames");
    reg_options.mve_frames = parse_aggregation(args.mve_frames, "--mve-frames");
    if (args.dtw_band >= 0) reg_options.dtw.band = args.dtw_band;
  } else {
    var_options.sigma = args.sigma;
    var_options.truncate = !args.exact_varifold;
    var_options.radius_factor = args.truncation_factor;
  }

  std::vector<MetricReport::Entry> entries(gt_ids.size());
  parallel_for(
      0, static_cast<int>(gt_ids.size()),
      [&](int i) {
        const std::string& id = gt_ids[static_cast<size_t>(i)];
        const fs::path gt_seq_dir =
            id == "." ? fs::path(args.gt_dir) : fs::path(args.gt_dir) / id;
        const fs::path pred_seq_dir =
            id == "." ? fs::path(args.pred_dir) : fs::path(args.pred_dir) / id;

        MeshSequence gt, pred;
        try {
          gt = load_sequence(gt_seq_dir, args.pattern, args.fps);
          pred = load_sequence(pred_seq_dir, args.pattern, args.fps);
        } catch (const ValidationError& e) {
          throw ValidationError("sequence '" + id + "': " + e.what());
        }

        MetricReport::Entry& entry = entries[static_cast<size_t>(i)];
        entry.id = id;
        entry.mode = args.mode;
        try {
          if (registered) {
            const int v = gt.frames[0].vertex_count();
            const VertexMask mouth = load_mask(args.mouth_mask_path, v);
            const VertexMask upper = load_mask(args.upper_mask_path, v);
            const LipLandmarkSet lips = load_lip_landmarks(args.lips_path, v);
            const RegisteredMetrics m =
                evaluate_registered(gt, pred, mouth, upper, lips, reg_options);
            entry.values = {{"lve", m.lve},         {"mve", m.mve},
                            {"fdd", m.fdd},         {"fdd_abs", m.fdd_abs},
                            {"dtw", m.dtw},         {"frechet", m.frechet},
                            {"delta_m", m.delta_m}, {"delta_cd", m.delta_cd}};
            if (args.with_losses) {
              entry.values.emplace_back("loss_mse", loss_mse(gt, pred));
              entry.values.emplace_back("loss_masked_mse",
                                        loss_masked_mse(gt, pred, mouth));
              entry.values.emplace_back("loss_velocity", loss_velocity(gt, pred));
              entry.values.emplace_back("loss_cosine", loss_cosine(gt, pred));
              entry.values.emplace_back("loss_chamfer", dynamic_chamfer(gt, pred));
            }
          } else {
            const UnregisteredMetrics m =
                evaluate_unregistered(gt, pred, var_options, 1);
            entry.values = {{"hausdorff", m.mean.hausdorff},
                            {"chamfer", m.mean.chamfer},
                            {"varifold", m.mean.varifold}};
            if (args.with_losses) {
              entry.values.emplace_back("loss_chamfer", m.mean.chamfer);
            }
            std::vector<double> hd, cd, vf;
            for (const auto& frame : m.per_frame) {
              hd.push_back(frame.hausdorff);
              cd.push_back(frame.chamfer);
              vf.push_back(frame.varifold);
            }
            entry.per_frame = {{"hausdorff", hd}, {"chamfer", cd}, {"varifold", vf}};
          }
        } catch (const ValidationError& e) {
          throw ValidationError("sequence '" + id + "': " + e.what());
        }
      },
      args.jobs);

  MetricReport report;
  report.sequences = std::move(entries);
  report.metadata["tool"] = "t4d";
  report.metadata["version"] = kVersion;
  report.metadata["mode"] = args.mode;
  Json inputs = Json::object();
  inputs["gt"] = args.gt_dir;
  inputs["pred"] = args.pred_dir;
  inputs["pattern"] = args.pattern;
  inputs["fps"] = args.fps;
  if (registered) {
    inputs["mouth_mask"] = args.mouth_mask_path;
    inputs["upper_mask"] = args.upper_mask_path;
    inputs["lips"] = args.lips_path;
  }
  report.metadata["inputs"] = inputs;
  report.metadata["conventions"] = conventions_json(args);
  Json scales = Json::object();
  scales["dtw"] = metric_scale("dtw");
  scales["frechet"] = metric_scale("frechet");
  scales["delta_m"] = metric_scale("delta_m");
  report.metadata["scale_factors"] = scales;
  report.metadata["seed"] = nullptr;

  write_report_json(args.out_path, report);
  if (!args.csv_path.empty()) write_report_csv(args.csv_path, report);
  std::cout << "wrote " << args.out_path << " (" << report.sequences.size()
            << " sequence" << (report.sequences.size() == 1 ? "" : "s") << ")\n";
  return 0;
}

}  // namespace t4d::cli
