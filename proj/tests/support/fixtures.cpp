#include "fixtures.hpp"

#include <cmath>

namespace ppm::testing {

TriangleMesh single_triangle() {
    return TriangleMesh::build({{0.0, 0.0, 0.0}, {1.0, 0.1, 0.0}, {0.4, 0.9, 0.2}},
                               {{0, 1, 2}});
}

TriangleMesh two_triangle_strip() {
    return TriangleMesh::build(
        {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.1}, {0.5, 0.9, 0.0}, {1.6, 0.8, 0.2}},
        {{0, 1, 2}, {2, 1, 3}});
}

TriangleMesh tetrahedron() {
    return TriangleMesh::build(
        {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.05}, {0.5, 0.95, 0.0}, {0.45, 0.35, 1.0}},
        {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}});
}

TriangleMesh tetrahedron_missing_face() {
    return TriangleMesh::build(
        {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.05}, {0.5, 0.95, 0.0}, {0.45, 0.35, 1.0}},
        {{0, 1, 3}, {1, 2, 3}, {2, 0, 3}});
}

TriangleMesh triangle_fan(int n) {
    std::vector<Eigen::Vector3d> positions{{0.0, 0.0, 0.0}};
    std::vector<std::array<int, 3>> triangles;
    for (int i = 0; i <= n; ++i) {
        const double a = 0.8 * M_PI * i / n;
        positions.push_back({std::cos(a), std::sin(a), 0.05 * i});
    }
    for (int i = 1; i <= n; ++i) triangles.push_back({0, i, i + 1});
    return TriangleMesh::build(std::move(positions), std::move(triangles));
}

TriangleMesh triangle_strip(int n) {
    std::vector<Eigen::Vector3d> positions;
    std::vector<std::array<int, 3>> triangles;
    for (int i = 0; i < n + 2; ++i)
        positions.push_back({0.5 * i, i % 2 ? 0.9 : 0.0, 0.03 * i});
    for (int i = 0; i < n; ++i) {
        if (i % 2 == 0)
            triangles.push_back({i, i + 1, i + 2});
        else
            triangles.push_back({i + 1, i, i + 2});
    }
    return TriangleMesh::build(std::move(positions), std::move(triangles));
}

TriangleMesh icosahedron() {
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> v = {{-1, p, 0}, {1, p, 0},   {-1, -p, 0}, {1, -p, 0},
                                      {0, -1, p}, {0, 1, p},   {0, -1, -p}, {0, 1, -p},
                                      {p, 0, -1}, {p, 0, 1},   {-p, 0, -1}, {-p, 0, 1}};
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
        {5, 11, 4},  {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
        {3, 2, 6},   {3, 6, 8},   {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
        {8, 6, 7},   {9, 8, 1}};
    return TriangleMesh::build(std::move(v), std::move(f));
}

TriangleMesh grid_patch(int nx, int ny) {
    std::vector<Eigen::Vector3d> positions;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            positions.push_back({static_cast<double>(i), static_cast<double>(j),
                                 0.15 * std::sin(1.3 * i + 0.7 * j)});
    std::vector<std::array<int, 3>> triangles;
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh::build(std::move(positions), std::move(triangles));
}

TriangleMesh random_micro_mesh(Rng& rng, int max_faces) {
    TriangleMesh base;
    const int pick = static_cast<int>(rng.uniform_int(6));
    switch (pick) {
        case 0: base = single_triangle(); break;
        case 1: base = two_triangle_strip(); break;
        case 2: base = triangle_fan(3); break;
        case 3: base = triangle_strip(4); break;
        case 4: base = triangle_fan(4); break;
        default: base = tetrahedron(); break;
    }
    if (base.num_faces() > max_faces) base = tetrahedron();
    std::vector<Eigen::Vector3d> positions = base.positions;
    for (auto& p : positions)
        for (int d = 0; d < 3; ++d) p[d] += 0.08 * rng.normal();
    return TriangleMesh::build(std::move(positions), base.triangles);
}

Eigen::MatrixXd random_features(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd feat(rows, cols);
    for (int r = 0; r < rows; ++r) {
        double norm2 = 0.0;
        do {
            for (int c = 0; c < cols; ++c) feat(r, c) = rng.normal();
            norm2 = feat.row(r).squaredNorm();
        } while (norm2 < 1e-6);
    }
    return feat;
}

OverlapPrior random_prior(Rng& rng, int num_x, int num_y) {
    OverlapPrior prior;
    prior.vertex_probs_x.resize(num_x);
    for (auto& p : prior.vertex_probs_x) p = rng.uniform();
    prior.vertex_probs_y.resize(num_y);
    for (auto& p : prior.vertex_probs_y) p = rng.uniform();
    return prior;
}

}  // namespace ppm::testing
