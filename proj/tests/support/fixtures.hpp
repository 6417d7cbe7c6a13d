#pragma once

#include <cstdint>

#include "ppm/ilp.hpp"
#include "ppm/mesh.hpp"
#include "ppm/rng.hpp"

namespace ppm::testing {

// Canonical tiny meshes. Positions are generic (no two vertices coincide)
// so cost ties are rare under random features.
TriangleMesh single_triangle();
TriangleMesh two_triangle_strip();
TriangleMesh tetrahedron();
TriangleMesh tetrahedron_missing_face();
TriangleMesh triangle_fan(int n);  // n triangles around a centre vertex, open
TriangleMesh triangle_strip(int n);
TriangleMesh icosahedron();

/// Open rectangular grid patch with 2*nx*ny faces and deterministic height
/// bumps so the geometry is generic.
TriangleMesh grid_patch(int nx, int ny);

/// Random micro mesh with at most 4 faces, positions jittered by the rng.
TriangleMesh random_micro_mesh(Rng& rng, int max_faces = 4);

/// Random feature rows with unit-ish norms, never zero.
Eigen::MatrixXd random_features(Rng& rng, int rows, int cols = 4);

OverlapPrior random_prior(Rng& rng, int num_x, int num_y);

}  // namespace ppm::testing
