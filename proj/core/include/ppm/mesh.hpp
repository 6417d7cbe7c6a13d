#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace ppm {

/// Oriented manifold triangle mesh with boundary.
///
/// Directed halfedges are exactly the triangle-induced directed edges:
/// halfedge h = 3*t + c runs from triangles[t][c] to triangles[t][(c+1)%3].
/// An undirected edge shared by two triangles contributes two opposite
/// halfedges; a boundary edge contributes exactly one.
struct TriangleMesh {
    std::vector<Eigen::Vector3d> positions;
    std::vector<std::array<int, 3>> triangles;

    // Derived connectivity (filled by finalize()).
    std::vector<std::array<int, 2>> halfedges;
    std::vector<int> opposite_halfedge;              // -1 on boundary edges
    std::vector<bool> boundary_flags;                // per vertex
    std::vector<std::array<int, 2>> undirected_edges;  // canonical (min,max), sorted
    std::vector<std::vector<int>> neighbors;         // per-vertex sorted adjacency

    int num_vertices() const { return static_cast<int>(positions.size()); }
    int num_faces() const { return static_cast<int>(triangles.size()); }
    int num_halfedges() const { return static_cast<int>(halfedges.size()); }
    int num_undirected_edges() const { return static_cast<int>(undirected_edges.size()); }

    int halfedge_src(int h) const { return halfedges[h][0]; }
    int halfedge_dst(int h) const { return halfedges[h][1]; }
    bool is_boundary_vertex(int v) const { return boundary_flags[v]; }
    bool is_interior_vertex(int v) const { return !boundary_flags[v]; }
    bool has_undirected_edge(int a, int b) const;
    double edge_length(int a, int b) const { return (positions[a] - positions[b]).norm(); }
    double surface_area() const;
    bool is_closed() const;
    bool is_connected() const;

    /// Builds connectivity and validates all mesh invariants. Throws
    /// ParseError / NonManifoldError / OrientationError.
    static TriangleMesh build(std::vector<Eigen::Vector3d> positions,
                              std::vector<std::array<int, 3>> triangles);
};

/// Total map from the vertices of a higher-resolution mesh onto the
/// vertices of a lower-resolution one.
struct ResolutionMap {
    std::vector<int> high_to_low;

    int operator()(int high_vertex) const { return high_to_low[high_vertex]; }
    int size() const { return static_cast<int>(high_to_low.size()); }
    static ResolutionMap identity(int n);
    bool is_surjective_onto(int low_count) const;
};

struct DecimateResult {
    TriangleMesh mesh;
    ResolutionMap map;             // input vertex -> output vertex
    std::vector<int> kept_origin;  // output vertex -> input vertex it survived from
};

/// Shortest-edge-collapse decimation. Keeps the mesh manifold and
/// consistently oriented; boundary vertices are only ever merged into
/// boundary vertices, and only along boundary edges. The returned face
/// count lies in [target_faces, target_faces + 2].
DecimateResult decimate(const TriangleMesh& mesh, int target_faces);

/// Vertices at graph-hop distance <= n from v (always contains v). Sorted.
std::vector<int> n_ring(const TriangleMesh& mesh, int v, int n);

/// Dijkstra over the undirected edge graph weighted by Euclidean edge
/// length. Unreachable vertices get +infinity.
std::vector<double> geodesic_from(const TriangleMesh& mesh, int source);

/// Max pairwise graph geodesic distance. Throws DisconnectedMeshError.
double diameter(const TriangleMesh& mesh);

// mesh_io.cpp
TriangleMesh load_mesh(const std::string& path);
void save_mesh_off(const TriangleMesh& mesh, const std::string& path);
/// ASCII PLY with optional per-vertex RGB (one colour triple per vertex).
void save_mesh_ply(const TriangleMesh& mesh, const std::string& path,
                   const std::vector<std::array<unsigned char, 3>>* colors = nullptr);

}  // namespace ppm
