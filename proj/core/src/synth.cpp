#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "t4d/errors.hpp"
#include "t4d/sequence_tools.hpp"

namespace t4d {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

double synth_phase(std::uint64_t seed) {
  const double u = static_cast<double>(mix64(seed ^ 0x51a7b2c4d8e9f013ULL) >> 11) *
                   0x1.0p-53;
  return 2.0 * std::numbers::pi * u;
}

double synth_envelope(const SynthOptions& options, int frame) {
  const double t = frame / options.fps;
  return std::abs(std::sin(2.0 * std::numbers::pi * options.frequency * t +
                           synth_phase(options.seed)));
}

MeshSequence synth_talking_sequence(const Mesh& template_mesh,
                                    const LipLandmarkSet& lips,
                                    const SynthOptions& options) {
  require_valid(template_mesh, "synth_talking_sequence");
  require_landmarks_bound(lips, template_mesh.vertex_count(),
                          "synth_talking_sequence");
  if (options.frames < 2) {
    throw ValidationError("synth_talking_sequence: needs at least 2 frames");
  }
  if (!(options.fps > 0.0)) {
    throw ValidationError("synth_talking_sequence: fps must be positive");
  }

  const int v_count = template_mesh.vertex_count();

  // spatial weight: 1 at the lower-lip landmarks, smooth falloff to 0 at
  // falloff_radius, so vertices beyond it (the upper face) stay static
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(v_count);
  for (int k = 0; k < v_count; ++k) {
    const Vec3 p = template_mesh.vertex(k);
    double w = 0.0;
    for (int l : lips.lower) {
      const double d = (p - template_mesh.vertex(l)).norm();
      w = std::max(w, smoothstep(1.0 - d / options.falloff_radius));
    }
    weight[k] = w;
  }

  std::vector<Mesh> frames(static_cast<size_t>(options.frames), template_mesh);
  for (int j = 0; j < options.frames; ++j) {
    const double drop = options.amplitude * synth_envelope(options, j);
    if (drop == 0.0) continue;
    Mesh& frame = frames[static_cast<size_t>(j)];
    for (int k = 0; k < v_count; ++k) {
      if (weight[k] > 0.0) {
        frame.vertices(k, 1) -= drop * weight[k];
      }
    }
  }
  return make_sequence(std::move(frames), options.fps, template_mesh);
}

}  // namespace t4d
