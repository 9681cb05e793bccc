#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "commands.hpp"
#include "t4d/errors.hpp"
#include "t4d/mesh_io.hpp"
#include "t4d/sequence_tools.hpp"
#include "t4d/shape_primitives.hpp"
#include "t4d/surface_operators.hpp"

namespace fs = std::filesystem;

namespace t4d::cli {

int run_operators(const OperatorsArgs& args) {
  const Mesh mesh = load_mesh(args.mesh_path);
  const std::uint64_t hash = mesh_content_hash(mesh);

  OperatorOptions options;
  options.clamp_cotangents = args.clamp_cotangents;
  const int k = std::min(args.k, mesh.vertex_count());

  // cache key: content hash + eigenpair count + cotangent convention
  fs::path cache_file;
  if (const char* cache_dir = std::getenv("T4D_CACHE_DIR")) {
    char name[64];
    std::snprintf(name, sizeof(name), "%016llx_k%d%s.t4dops",
                  static_cast<unsigned long long>(hash), k,
                  args.clamp_cotangents ? "_clamped" : "");
    cache_file = fs::path(cache_dir) / name;
  }

  SurfaceOperators ops;
  bool from_cache = false;
  if (!cache_file.empty() && fs::exists(cache_file)) {
    ops = load_operators(cache_file, hash);
    from_cache = true;
  } else {
    ops = precompute_operators(mesh, k, options);
    if (!cache_file.empty()) {
      fs::create_directories(cache_file.parent_path());
      save_operators(cache_file, ops, hash);
    }
  }
  if (!args.out_path.empty()) save_operators(args.out_path, ops, hash);

  std::cout << "V=" << ops.vertex_count() << " k=" << ops.eigenpair_count()
            << " lambda=[" << ops.eigenvalues[0] << ", "
            << ops.eigenvalues[ops.eigenpair_count() - 1] << "]"
            << (from_cache ? " (cache hit)" : "") << "\n";
  return 0;
}

int run_align(const AlignArgs& args) {
  const Mesh target = load_mesh(args.target_path);

  if (!args.seq_dir.empty()) {
    if (args.out_dir.empty()) {
      throw ValidationError("align: sequence mode needs --out-dir");
    }
    const MeshSequence seq = load_sequence(args.seq_dir, args.pattern, args.fps);
    const MeshSequence aligned = align_sequence(seq, target, args.with_scale);
    save_sequence(args.out_dir, aligned);
    std::cout << "aligned " << aligned.frame_count() << " frames into "
              << args.out_dir << "\n";
    return 0;
  }

  if (args.source_path.empty()) {
    throw ValidationError("align: need --source or --seq-dir");
  }
  const Mesh source = load_mesh(args.source_path);
  const AlignmentResult result = align_rigid(source, target, args.with_scale);
  if (args.out_path.empty()) {
    throw ValidationError("align: need --out for the aligned mesh");
  }
  save_mesh(args.out_path, result.aligned);
  std::cout << "scale=" << result.transform.scale
            << " translation=[" << result.transform.translation.transpose()
            << "] residual=" << result.residual << "\n";
  return 0;
}

int run_remesh(const RemeshArgs& args) {
  const Mesh mesh = load_mesh(args.mesh_path);
  RemeshOptions options;
  options.up_fraction = args.up;
  options.down_target_ratio = args.down;
  options.seed = args.seed;
  const RemeshResult result = remesh_random(mesh, options);
  save_mesh(args.out_path, result.mesh);
  std::cout << "V " << mesh.vertex_count() << " -> " << result.mesh.vertex_count()
            << ", F " << mesh.face_count() << " -> " << result.mesh.face_count()
            << " (subdivided " << result.subdivided_faces << ", collapsed "
            << result.collapsed_edges << ")\n";
  if (!result.reached_target) {
    std::cerr << "warning: no legal collapse left before reaching the vertex "
                 "target; returning best effort\n";
  }
  return 0;
}

int run_synth(const SynthArgs& args) {
  fs::create_directories(args.out_dir);

  if (args.emit_head) {
    const SyntheticHead head = make_synthetic_head(args.head_resolution);
    save_mesh(fs::path(args.out_dir) / "head.obj", head.mesh);
    save_mask(fs::path(args.out_dir) / "mouth_mask.json", head.mouth);
    save_mask(fs::path(args.out_dir) / "upper_face_mask.json", head.upper_face);
    save_lip_landmarks(fs::path(args.out_dir) / "lips.json", head.lips);
    std::cout << "wrote synthetic head (V=" << head.mesh.vertex_count()
              << ") with masks into " << args.out_dir << "\n";
    return 0;
  }

  if (args.template_path.empty() || args.lips_path.empty()) {
    throw ValidationError("synth: need --template and --lips (or --emit-head)");
  }
  const Mesh template_mesh = load_mesh(args.template_path);
  const LipLandmarkSet lips =
      load_lip_landmarks(args.lips_path, template_mesh.vertex_count());

  SynthOptions options;
  options.frames = args.frames;
  options.fps = args.fps;
  options.amplitude = args.amplitude;
  options.frequency = args.frequency;
  options.falloff_radius = args.falloff;
  options.seed = args.seed;
  const MeshSequence seq = synth_talking_sequence(template_mesh, lips, options);
  save_sequence(args.out_dir, seq);
  std::cout << "wrote " << seq.frame_count() << " frames into " << args.out_dir
            << "\n";
  return 0;
}

namespace {

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& c : line) {
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    double value = 0.0;
    while (ls >> value) row.push_back(value);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(path.string() + ": empty matrix");
  const size_t cols = rows[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw ValidationError(path.string() + ": ragged row " + std::to_string(i));
    }
    for (size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

}  // namespace

int run_mds(const MdsArgs& args) {
  const Eigen::MatrixXd distances = read_matrix_csv(args.input_csv);
  const Eigen::MatrixXd coords = mds_project(distances, args.dims);
  std::ofstream out(args.out_csv);
  if (!out) throw ValidationError("cannot write " + args.out_csv);
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    for (Eigen::Index j = 0; j < coords.cols(); ++j) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.12g", coords(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  std::cout << "embedded " << coords.rows() << " points into " << args.dims
            << "D\n";
  return 0;
}

}  // namespace t4d::cli
