#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "ppm/mesh.hpp"

namespace ppm {

/// One oriented triangle of the source shape viewed as a directed 3-cycle.
/// Local edge l runs vertices[l] -> vertices[(l+1)%3] and coincides with
/// source halfedge 3*face_index + l.
struct SurfaceCycle {
    int face_index = -1;
    std::array<int, 3> vertices{};
};

/// Which directed edge set of the target enters the product graphs:
/// Halfedges uses only triangle-induced directed edges, Full uses both
/// directions of every undirected edge. Self-edges are always appended.
enum class YEdgeMode { Halfedges, Full };

/// A target-side matching move: a directed edge of Y, or a self-edge
/// (src == dst) for degenerate images.
struct YStep {
    int src = -1;
    int dst = -1;
    bool is_self() const { return src == dst; }
};

struct ProductEdge {
    int cycle_index;
    int x_local;      // 0..2
    int x_halfedge;   // 3*face + x_local in X
    int y_step;       // index into ProductGraphCollection::y_steps
    bool interior;    // all four endpoint vertices are interior
    double cost = 0.0;
};

/// The union of the per-triangle product graphs between the source surface
/// cycles and the target shape. Product edge k with cycle i, local edge l
/// and step (y, ybar) runs from product vertex (i, l, y) to
/// (i, (l+1)%3, ybar). Edges are laid out as
/// k = (3*cycle + x_local) * |y_steps| + y_step.
struct ProductGraphCollection {
    std::vector<SurfaceCycle> cycles;
    std::vector<YStep> y_steps;     // E_Y^+ under the chosen mode
    std::vector<int> y_step_reverse;  // index of the reversed step, -1 if absent
    std::vector<ProductEdge> edges;
    std::vector<std::array<int, 2>> opposite_pairs;  // (k, j) with k < j

    // Snapshots of the underlying meshes' structure so downstream model
    // assembly does not need the meshes themselves.
    int num_x_vertices = 0;
    int num_y_vertices = 0;
    std::vector<bool> x_vertex_interior;
    std::vector<bool> y_vertex_interior;
    std::vector<std::array<int, 2>> x_halfedges;
    std::vector<int> x_halfedge_opposite;

    int num_cycles() const { return static_cast<int>(cycles.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_product_vertices() const { return 3 * num_cycles() * num_y_vertices; }
    int product_vertex_id(int cycle, int local, int y) const {
        return (3 * cycle + local) * num_y_vertices + y;
    }
    int edge_id(int cycle, int x_local, int y_step) const {
        return (3 * cycle + x_local) * static_cast<int>(y_steps.size()) + y_step;
    }
    /// Product vertex ids (tail, head) of edge k.
    std::array<int, 2> edge_endpoints(int k) const {
        const ProductEdge& e = edges[k];
        const YStep& s = y_steps[e.y_step];
        return {product_vertex_id(e.cycle_index, e.x_local, s.src),
                product_vertex_id(e.cycle_index, (e.x_local + 1) % 3, s.dst)};
    }
    /// Source-shape vertices (tail, head) under edge k's endpoints.
    std::array<int, 2> edge_x_vertices(int k) const {
        const ProductEdge& e = edges[k];
        const auto& cyc = cycles[e.cycle_index];
        return {cyc.vertices[e.x_local], cyc.vertices[(e.x_local + 1) % 3]};
    }
};

/// One cycle per triangle, in face order.
std::vector<SurfaceCycle> build_cycles(const TriangleMesh& mesh_x);

/// The step list E_Y^+: directed edges sorted by (src, dst), then
/// self-edges in vertex order.
std::vector<YStep> build_y_steps(const TriangleMesh& mesh_y, YEdgeMode mode);

ProductGraphCollection build_product_collection(const std::vector<SurfaceCycle>& cycles,
                                                const TriangleMesh& mesh_x,
                                                const TriangleMesh& mesh_y,
                                                YEdgeMode mode = YEdgeMode::Full);

/// Per-edge matching cost: mean of the cosine feature distances at the two
/// endpoint pairs. Features are one row per vertex.
void compute_costs(ProductGraphCollection& collection, const Eigen::MatrixXd& feat_x,
                   const Eigen::MatrixXd& feat_y);

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace ppm
