#pragma once

#include "t4d/mesh.hpp"

namespace t4d {

// Procedural meshes used by the demo CLI flows, the test fixtures and the
// benchmarks. All coordinates in mm.

// Regular grid in the z=0 plane, nx*ny vertices, origin-cornered.
Mesh make_plane_grid(int nx, int ny, double spacing);

// Subdivided icosahedron projected to the given radius; V = 10*4^s + 2.
Mesh make_icosphere(int subdivisions, double radius);

// Open dome-like patch, a face without features: grid-parameterized,
// curved, with boundary. resolution^2 vertices.
Mesh make_face_patch(int resolution, double scale = 85.0);

// Face patch plus the region masks and lip landmarks the evaluation
// protocol needs. The mouth/upper-face extents follow the patch
// parameterization, so they are consistent for any resolution.
struct SyntheticHead {
  Mesh mesh;
  VertexMask mouth;
  VertexMask upper_face;
  LipLandmarkSet lips;
};

SyntheticHead make_synthetic_head(int resolution, double scale = 85.0);

}  // namespace t4d
