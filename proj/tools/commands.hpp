#pragma once

#include <optional>
#include <string>

namespace t4d::cli {

struct EvaluateArgs {
  std::string mode = "registered";
  std::string gt_dir;
  std::string pred_dir;
  std::string pattern = "*.obj";
  double fps = 30.0;
  std::string mouth_mask_path;
  std::string upper_mask_path;
  std::string lips_path;
  std::string out_path = "report.json";
  std::string csv_path;  // optional
  bool with_losses = false;
  int jobs = 0;

  // flag-switchable conventions, echoed into report metadata
  std::string lve_frames = "mean";
  std::string mve_frames = "max";
  int dtw_band = -1;  // <0 = unconstrained
  double sigma = 0.1;
  bool exact_varifold = false;  // default truncates at 4 sigma
  double truncation_factor = 4.0;

  std::string conventions_from;  // prior report to copy conventions from
};

int run_evaluate(EvaluateArgs args);

struct OperatorsArgs {
  std::string mesh_path;
  int k = 128;
  std::string out_path;
  bool clamp_cotangents = false;
};

int run_operators(const OperatorsArgs& args);

struct AlignArgs {
  std::string source_path;   // single mesh mode
  std::string seq_dir;       // sequence mode
  std::string pattern = "*.obj";
  double fps = 30.0;
  std::string target_path;
  std::string out_path;
  std::string out_dir;
  bool with_scale = false;
};

int run_align(const AlignArgs& args);

struct RemeshArgs {
  std::string mesh_path;
  std::string out_path;
  double up = 0.3;
  double down = 0.8;
  std::uint64_t seed = 0;
};

int run_remesh(const RemeshArgs& args);

struct SynthArgs {
  std::string template_path;
  std::string lips_path;
  std::string out_dir;
  int frames = 120;
  double fps = 30.0;
  double amplitude = 2.0;
  double frequency = 2.5;
  double falloff = 8.0;
  std::uint64_t seed = 0;
  bool emit_head = false;  // write the built-in head + masks instead
  int head_resolution = 71;
};

int run_synth(const SynthArgs& args);

struct PlotLipsArgs {
  std::string gt_dir;
  std::string pred_dir;
  std::string pattern = "*.obj";
  double fps = 30.0;
  std::string lips_path;
  std::string out_path = "lips.svg";
};

int run_plot_lips(const PlotLipsArgs& args);

struct MdsArgs {
  std::string input_csv;
  std::string out_csv;
  int dims = 2;
};

int run_mds(const MdsArgs& args);

}  // namespace t4d::cli
