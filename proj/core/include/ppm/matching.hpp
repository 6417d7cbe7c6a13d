#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "ppm/mesh.hpp"
#include "ppm/product_graph.hpp"

namespace ppm {

struct Solution;  // solver.hpp

/// Vertex-level correspondence decoded from a solver assignment (or built
/// by upsampling). Unmatched entries are -1.
struct Matching {
    std::vector<int> sigma;                       // per source vertex
    std::vector<std::uint8_t> matched_x_edges;    // per source halfedge, 1 - s_inj
    std::vector<std::uint8_t> matched_y_vertices; // per target vertex, 1 - s_sur
    std::vector<std::array<int, 3>> face_images;  // per source triangle, all -1 if unmatched
    int num_divergent_vertices = 0;  // vertices whose cycles proposed different images
    int num_empty_candidates = 0;    // upsampling: matched vertices left without a candidate

    int num_matched() const;
    bool is_matched(int x) const { return sigma[x] >= 0; }
    std::vector<std::uint8_t> overlap_x() const;  // sigma defined
    std::vector<std::uint8_t> overlap_y() const;  // matched_y_vertices
};

struct ConsistencyReport {
    std::vector<int> violations;  // source halfedge indices failing the adjacency test
    bool is_consistent() const { return violations.empty(); }
};

/// Reads the vertex map off the active product edges. Each source vertex
/// takes the majority candidate over its incident cycles, ties broken by
/// smallest target index. Throws InconsistentSolution if active edges do
/// not form one closed path per matched cycle.
Matching decode(const ProductGraphCollection& collection, const Solution& solution);

/// Neighbourhood preservation check: an interior source edge whose both
/// endpoints are matched to interior target vertices must map to equal or
/// adjacent target vertices. All other edges are exempt.
ConsistencyReport check_consistency(const Matching& matching, const TriangleMesh& mesh_x,
                                    const TriangleMesh& mesh_y);

/// Lifts a low-resolution matching to high resolution. A high-res source
/// vertex x with matched low-res image maps to the best-ranked high-res
/// target vertex whose gamma_y image lies in the ring-neighbourhood (on the
/// low-res target mesh) of sigma_lr(gamma_x(x)). Ranking uses feature
/// cosine distance when features are given, Euclidean distance otherwise.
Matching upsample_matching(const Matching& sigma_lr, const ResolutionMap& gamma_x,
                           const ResolutionMap& gamma_y, const TriangleMesh& mesh_x_hr,
                           const TriangleMesh& mesh_y_hr, const TriangleMesh& mesh_y_lr,
                           int ring, const Eigen::MatrixXd* feat_x_hr = nullptr,
                           const Eigen::MatrixXd* feat_y_hr = nullptr);

// --- files -----------------------------------------------------------

/// One line per source vertex: "x_index y_index", -1 when unmatched.
void write_matching(const Matching& matching, const std::string& path);
std::vector<int> read_matching_sigma(const std::string& path, int num_x_vertices);

/// One 0/1 per line.
void write_overlap(const std::vector<std::uint8_t>& flags, const std::string& path);
std::vector<std::uint8_t> read_overlap(const std::string& path, int expected);

/// Colour-transfer export: the target mesh gets a position-based colour
/// ramp and each matched source vertex copies the colour of its image.
void write_color_transfer_ply(const Matching& matching, const TriangleMesh& mesh_x,
                              const TriangleMesh& mesh_y, const std::string& path_x,
                              const std::string& path_y);

}  // namespace ppm
