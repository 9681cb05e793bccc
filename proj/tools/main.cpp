#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "commands.hpp"
#include "t4d/errors.hpp"
#include "t4d/version.hpp"

using namespace t4d::cli;

int main(int argc, char** argv) {
  CLI::App app{"t4d: evaluation toolkit for 4D face mesh sequences"};
  app.set_version_flag("--version", t4d::kVersion);
  app.require_subcommand(1);

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand(
      "evaluate", "Evaluate prediction sequences against ground truth");
  eval->add_option("--mode", eval_args.mode, "registered | unregistered")
      ->capture_default_str();
  eval->add_option("--gt", eval_args.gt_dir, "Ground-truth directory")->required();
  eval->add_option("--pred", eval_args.pred_dir, "Prediction directory")->required();
  eval->add_option("--pattern", eval_args.pattern, "Frame filename glob")
      ->capture_default_str();
  eval->add_option("--fps", eval_args.fps, "Frames per second")
      ->capture_default_str();
  eval->add_option("--mouth-mask", eval_args.mouth_mask_path,
                   "Mouth mask JSON (registered mode)");
  eval->add_option("--upper-mask", eval_args.upper_mask_path,
                   "Upper-face mask JSON (registered mode)");
  eval->add_option("--lips", eval_args.lips_path,
                   "Lip landmark JSON (registered mode)");
  eval->add_option("--out", eval_args.out_path, "Report JSON path")
      ->capture_default_str();
  eval->add_option("--csv", eval_args.csv_path,
                   "Optional CSV table with paper-style scaled columns");
  eval->add_flag("--losses", eval_args.with_losses,
                 "Also report the training losses");
  eval->add_option("--jobs", eval_args.jobs,
                   "Concurrent sequence evaluations (0 = hardware)");
  eval->add_option("--lve-frames", eval_args.lve_frames,
                   "LVE reduction across frames: mean | max")
      ->capture_default_str();
  eval->add_option("--mve-frames", eval_args.mve_frames,
                   "MVE reduction across frames: max | mean")
      ->capture_default_str();
  eval->add_option("--dtw-band", eval_args.dtw_band,
                   "Sakoe-Chiba band half-width (frames), <0 = off")
      ->capture_default_str();
  eval->add_option("--sigma", eval_args.sigma,
                   "Varifold position kernel scale (mm)")
      ->capture_default_str();
  eval->add_flag("--exact-varifold", eval_args.exact_varifold,
                 "Disable the 4-sigma kd-tree truncation");
  eval->add_option("--truncation-factor", eval_args.truncation_factor,
                   "Varifold truncation radius in sigmas")
      ->capture_default_str();
  eval->add_option("--conventions-from", eval_args.conventions_from,
                   "Adopt conventions from a prior report's metadata");

  OperatorsArgs ops_args;
  auto* ops = app.add_subcommand(
      "operators", "Precompute surface operators for a mesh");
  ops->add_option("--mesh", ops_args.mesh_path, "Input mesh")->required();
  ops->add_option("--k", ops_args.k, "Eigenpair count")->capture_default_str();
  ops->add_option("--out", ops_args.out_path, "Binary cache output path");
  ops->add_flag("--clamp-cot", ops_args.clamp_cotangents,
                "Clamp negative cotangent weights at 0");

  AlignArgs align_args;
  auto* align = app.add_subcommand(
      "align", "Rigidly align a mesh or sequence to a reference");
  align->add_option("--source", align_args.source_path, "Source mesh");
  align->add_option("--seq-dir", align_args.seq_dir,
                    "Source sequence directory (instead of --source)");
  align->add_option("--pattern", align_args.pattern, "Frame filename glob")
      ->capture_default_str();
  align->add_option("--fps", align_args.fps, "Sequence fps")
      ->capture_default_str();
  align->add_option("--target", align_args.target_path, "Reference mesh")
      ->required();
  align->add_option("--out", align_args.out_path, "Aligned mesh output");
  align->add_option("--out-dir", align_args.out_dir,
                    "Aligned sequence output directory");
  align->add_flag("--with-scale", align_args.with_scale,
                  "Estimate a uniform scale too");

  RemeshArgs remesh_args;
  auto* remesh = app.add_subcommand(
      "remesh", "Randomly remesh by subdivision and edge collapse");
  remesh->add_option("--mesh", remesh_args.mesh_path, "Input mesh")->required();
  remesh->add_option("--out", remesh_args.out_path, "Output mesh")->required();
  remesh->add_option("--up", remesh_args.up, "Fraction of faces to subdivide")
      ->capture_default_str();
  remesh->add_option("--down", remesh_args.down,
                     "Target vertex ratio of the original")
      ->capture_default_str();
  remesh->add_option("--seed", remesh_args.seed, "RNG seed")
      ->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic talking sequence");
  synth->add_option("--template", synth_args.template_path, "Template mesh");
  synth->add_option("--lips", synth_args.lips_path, "Lip landmark JSON");
  synth->add_option("--out-dir", synth_args.out_dir, "Output frame directory")
      ->required();
  synth->add_option("--frames", synth_args.frames, "Frame count")
      ->capture_default_str();
  synth->add_option("--fps", synth_args.fps, "Frames per second")
      ->capture_default_str();
  synth->add_option("--amplitude", synth_args.amplitude,
                    "Peak lip displacement (mm)")
      ->capture_default_str();
  synth->add_option("--frequency", synth_args.frequency, "Syllable rate (Hz)")
      ->capture_default_str();
  synth->add_option("--falloff", synth_args.falloff,
                    "Spatial falloff radius (mm)")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Phase seed")
      ->capture_default_str();
  synth->add_flag("--emit-head", synth_args.emit_head,
                  "Write the built-in synthetic head, masks and landmarks");
  synth->add_option("--head-resolution", synth_args.head_resolution,
                    "Grid resolution of the built-in head")
      ->capture_default_str();

  PlotLipsArgs plot_args;
  auto* plot = app.add_subcommand(
      "plot-lips", "Chart lip y-trajectories of gt vs pred into an SVG");
  plot->add_option("--gt", plot_args.gt_dir, "Ground-truth directory")->required();
  plot->add_option("--pred", plot_args.pred_dir, "Prediction directory")
      ->required();
  plot->add_option("--pattern", plot_args.pattern, "Frame filename glob")
      ->capture_default_str();
  plot->add_option("--fps", plot_args.fps, "Frames per second")
      ->capture_default_str();
  plot->add_option("--lips", plot_args.lips_path, "Lip landmark JSON")
      ->required();
  plot->add_option("--out", plot_args.out_path, "SVG output path")
      ->capture_default_str();

  MdsArgs mds_args;
  auto* mds = app.add_subcommand(
      "mds", "Classical MDS embedding of a distance matrix");
  mds->add_option("--input", mds_args.input_csv, "Distance matrix CSV")
      ->required();
  mds->add_option("--out", mds_args.out_csv, "Coordinates CSV")->required();
  mds->add_option("--dims", mds_args.dims, "Embedding dimensions")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (eval->parsed()) return run_evaluate(eval_args);
    if (ops->parsed()) return run_operators(ops_args);
    if (align->parsed()) return run_align(align_args);
    if (remesh->parsed()) return run_remesh(remesh_args);
    if (synth->parsed()) return run_synth(synth_args);
    if (plot->parsed()) return run_plot_lips(plot_args);
    if (mds->parsed()) return run_mds(mds_args);
  } catch (const t4d::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const t4d::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
