#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppm/matching.hpp"
#include "ppm/mesh.hpp"

namespace ppm {

struct GroundTruth {
    std::vector<int> gt_map;  // per source vertex, target index or -1
    std::vector<std::uint8_t> gt_overlap_x;
    std::vector<std::uint8_t> gt_overlap_y;
    double full_diameter = 0.0;  // geodesic diameter of the underlying full shape

    static GroundTruth from_map(std::vector<int> gt_map, int num_y_vertices,
                                double full_diameter);
};

/// Memoised per-source geodesic fields for one mesh.
class GeodesicCache {
public:
    explicit GeodesicCache(const TriangleMesh& mesh) : mesh_(&mesh) {}
    const std::vector<double>& from(int source);
    double distance(int a, int b) { return from(a)[b]; }

private:
    const TriangleMesh* mesh_;
    std::unordered_map<int, std::vector<double>> fields_;
};

/// Intersection over union of two indicator vectors; 1 when both are empty.
double iou(const std::vector<std::uint8_t>& predicted, const std::vector<std::uint8_t>& truth);

struct GeodesicErrorResult {
    std::vector<double> per_vertex;  // aligned with the evaluation set
    std::vector<int> vertices;       // evaluation set (predicted AND gt overlap)
    std::optional<double> mean;      // empty evaluation set -> nullopt
};

/// Normalised geodesic error d_Y(sigma(x), gt(x)) / full_diameter over the
/// intersection of the predicted and ground-truth overlap regions.
GeodesicErrorResult geodesic_error(const Matching& matching, const GroundTruth& gt,
                                   const TriangleMesh& mesh_y);

/// Smoothness of the deformation field between GT-rigidly-aligned shapes,
/// summed with uniform weights over source edges with both endpoints
/// matched. Returns nullopt when fewer than 3 vertices are matched or no
/// edge qualifies; throws DegenerateAlignment when the GT pairs are not
/// full rank.
std::optional<double> dirichlet_energy(const Matching& matching, const TriangleMesh& mesh_x,
                                       const TriangleMesh& mesh_y, const GroundTruth& gt);

/// Mean target-side geodesic distance between the images of source edge
/// endpoints, normalised by the target diameter. nullopt when no edge has
/// both endpoints matched.
std::optional<double> geoed(const Matching& matching, const TriangleMesh& mesh_x,
                            const TriangleMesh& mesh_y);

/// All four measures of one pair, reported x100. iou is the mean of the
/// per-shape values.
struct MetricReport {
    double iou = 0.0;
    double iou_x = 0.0;
    double iou_y = 0.0;
    std::optional<double> mean_geo_error;
    std::optional<double> dirichlet;
    std::optional<double> geoed;
    int eval_vertices = 0;  // |predicted overlap ∩ gt overlap| on the source
    int matched_vertices = 0;
    int matched_edges = 0;  // source edges with both endpoints matched
};

MetricReport evaluate_pair(const Matching& matching, const GroundTruth& gt,
                           const TriangleMesh& mesh_x, const TriangleMesh& mesh_y);

}  // namespace ppm
