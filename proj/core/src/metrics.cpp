#include "ppm/metrics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

#include "ppm/errors.hpp"

namespace ppm {

GroundTruth GroundTruth::from_map(std::vector<int> gt_map, int num_y_vertices,
                                  double full_diameter) {
    GroundTruth gt;
    gt.gt_overlap_x.resize(gt_map.size());
    gt.gt_overlap_y.assign(num_y_vertices, 0);
    for (std::size_t x = 0; x < gt_map.size(); ++x) {
        const int y = gt_map[x];
        gt.gt_overlap_x[x] = y >= 0 ? 1 : 0;
        if (y >= 0) {
            if (y >= num_y_vertices) throw IndexOutOfRange("ground-truth target index");
            gt.gt_overlap_y[y] = 1;
        }
    }
    gt.gt_map = std::move(gt_map);
    if (!(full_diameter > 0.0)) throw RangeError("full diameter must be positive");
    gt.full_diameter = full_diameter;
    return gt;
}

const std::vector<double>& GeodesicCache::from(int source) {
    auto it = fields_.find(source);
    if (it == fields_.end()) it = fields_.emplace(source, geodesic_from(*mesh_, source)).first;
    return it->second;
}

double iou(const std::vector<std::uint8_t>& predicted, const std::vector<std::uint8_t>& truth) {
    if (predicted.size() != truth.size()) throw LengthMismatch("iou vector lengths differ");
    int inter = 0, uni = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0, t = truth[i] != 0;
        inter += p && t;
        uni += p || t;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / uni;
}

GeodesicErrorResult geodesic_error(const Matching& matching, const GroundTruth& gt,
                                   const TriangleMesh& mesh_y) {
    if (matching.sigma.size() != gt.gt_map.size())
        throw LengthMismatch("matching and ground truth sizes differ");
    GeodesicErrorResult result;
    GeodesicCache cache(mesh_y);
    for (std::size_t x = 0; x < matching.sigma.size(); ++x) {
        const int pred = matching.sigma[x];
        const int truth = gt.gt_map[x];
        if (pred < 0 || truth < 0) continue;
        result.vertices.push_back(static_cast<int>(x));
        result.per_vertex.push_back(cache.distance(truth, pred) / gt.full_diameter);
    }
    if (!result.per_vertex.empty()) {
        double sum = 0.0;
        for (double e : result.per_vertex) sum += e;
        result.mean = sum / static_cast<double>(result.per_vertex.size());
    }
    return result;
}

std::optional<double> dirichlet_energy(const Matching& matching, const TriangleMesh& mesh_x,
                                       const TriangleMesh& mesh_y, const GroundTruth& gt) {
    // Rigid alignment over the ground-truth pairs (Kabsch).
    std::vector<int> pairs;
    for (std::size_t x = 0; x < gt.gt_map.size(); ++x)
        if (gt.gt_map[x] >= 0) pairs.push_back(static_cast<int>(x));
    if (pairs.size() < 3) throw DegenerateAlignment("fewer than 3 ground-truth pairs");

    Eigen::Vector3d cx = Eigen::Vector3d::Zero(), cy = Eigen::Vector3d::Zero();
    for (int x : pairs) {
        cx += mesh_x.positions[x];
        cy += mesh_y.positions[gt.gt_map[x]];
    }
    cx /= static_cast<double>(pairs.size());
    cy /= static_cast<double>(pairs.size());
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (int x : pairs)
        h += (mesh_x.positions[x] - cx) * (mesh_y.positions[gt.gt_map[x]] - cy).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.rank() < 2) throw DegenerateAlignment("ground-truth pairs are collinear");
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Eigen::Matrix3d rot = svd.matrixV() * d * svd.matrixU().transpose();
    const Eigen::Vector3d trans = cy - rot * cx;

    if (matching.num_matched() < 3) return std::nullopt;
    std::vector<Eigen::Vector3d> deform(mesh_x.num_vertices(), Eigen::Vector3d::Zero());
    std::vector<char> defined(mesh_x.num_vertices(), 0);
    for (int x = 0; x < mesh_x.num_vertices(); ++x) {
        const int y = matching.sigma[x];
        if (y < 0) continue;
        deform[x] = mesh_y.positions[y] - (rot * mesh_x.positions[x] + trans);
        defined[x] = 1;
    }
    double energy = 0.0;
    int edges = 0;
    for (const auto& e : mesh_x.undirected_edges) {
        if (!defined[e[0]] || !defined[e[1]]) continue;
        energy += (deform[e[0]] - deform[e[1]]).squaredNorm();
        ++edges;
    }
    if (edges == 0) return std::nullopt;
    return energy;
}

std::optional<double> geoed(const Matching& matching, const TriangleMesh& mesh_x,
                            const TriangleMesh& mesh_y) {
    GeodesicCache cache(mesh_y);
    double sum = 0.0;
    int count = 0;
    for (const auto& e : mesh_x.undirected_edges) {
        const int ya = matching.sigma[e[0]];
        const int yb = matching.sigma[e[1]];
        if (ya < 0 || yb < 0) continue;
        sum += cache.distance(ya, yb);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count / diameter(mesh_y);
}

MetricReport evaluate_pair(const Matching& matching, const GroundTruth& gt,
                           const TriangleMesh& mesh_x, const TriangleMesh& mesh_y) {
    MetricReport report;
    report.iou_x = 100.0 * iou(matching.overlap_x(), gt.gt_overlap_x);
    report.iou_y = 100.0 * iou(matching.overlap_y(), gt.gt_overlap_y);
    report.iou = 0.5 * (report.iou_x + report.iou_y);

    const auto geo = geodesic_error(matching, gt, mesh_y);
    if (geo.mean) report.mean_geo_error = 100.0 * *geo.mean;
    report.eval_vertices = static_cast<int>(geo.vertices.size());
    report.matched_vertices = matching.num_matched();

    if (const auto d = dirichlet_energy(matching, mesh_x, mesh_y, gt))
        report.dirichlet = 100.0 * *d;
    if (const auto g = geoed(matching, mesh_x, mesh_y)) report.geoed = 100.0 * *g;

    for (const auto& e : mesh_x.undirected_edges)
        if (matching.sigma[e[0]] >= 0 && matching.sigma[e[1]] >= 0) ++report.matched_edges;
    return report;
}

}  // namespace ppm
