#include "ppm/product_graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ppm/errors.hpp"

namespace ppm {

std::vector<SurfaceCycle> build_cycles(const TriangleMesh& mesh_x) {
    std::vector<SurfaceCycle> cycles(mesh_x.num_faces());
    for (int f = 0; f < mesh_x.num_faces(); ++f) {
        cycles[f].face_index = f;
        cycles[f].vertices = mesh_x.triangles[f];
    }
    return cycles;
}

std::vector<YStep> build_y_steps(const TriangleMesh& mesh_y, YEdgeMode mode) {
    std::vector<YStep> steps;
    if (mode == YEdgeMode::Full) {
        for (const auto& e : mesh_y.undirected_edges) {
            steps.push_back({e[0], e[1]});
            steps.push_back({e[1], e[0]});
        }
    } else {
        for (int h = 0; h < mesh_y.num_halfedges(); ++h)
            steps.push_back({mesh_y.halfedge_src(h), mesh_y.halfedge_dst(h)});
    }
    std::sort(steps.begin(), steps.end(), [](const YStep& a, const YStep& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (int v = 0; v < mesh_y.num_vertices(); ++v) steps.push_back({v, v});
    return steps;
}

ProductGraphCollection build_product_collection(const std::vector<SurfaceCycle>& cycles,
                                                const TriangleMesh& mesh_x,
                                                const TriangleMesh& mesh_y, YEdgeMode mode) {
    ProductGraphCollection pc;
    pc.cycles = cycles;
    pc.y_steps = build_y_steps(mesh_y, mode);
    pc.num_x_vertices = mesh_x.num_vertices();
    pc.num_y_vertices = mesh_y.num_vertices();
    pc.x_vertex_interior.resize(mesh_x.num_vertices());
    for (int v = 0; v < mesh_x.num_vertices(); ++v)
        pc.x_vertex_interior[v] = mesh_x.is_interior_vertex(v);
    pc.y_vertex_interior.resize(mesh_y.num_vertices());
    for (int v = 0; v < mesh_y.num_vertices(); ++v)
        pc.y_vertex_interior[v] = mesh_y.is_interior_vertex(v);
    pc.x_halfedges = mesh_x.halfedges;
    pc.x_halfedge_opposite = mesh_x.opposite_halfedge;

    std::map<std::pair<int, int>, int> step_index;
    for (int s = 0; s < static_cast<int>(pc.y_steps.size()); ++s)
        step_index[{pc.y_steps[s].src, pc.y_steps[s].dst}] = s;
    pc.y_step_reverse.resize(pc.y_steps.size());
    for (int s = 0; s < static_cast<int>(pc.y_steps.size()); ++s) {
        const auto it = step_index.find({pc.y_steps[s].dst, pc.y_steps[s].src});
        pc.y_step_reverse[s] = it == step_index.end() ? -1 : it->second;
    }

    const int num_steps = static_cast<int>(pc.y_steps.size());
    pc.edges.resize(static_cast<std::size_t>(3) * cycles.size() * num_steps);
    for (int i = 0; i < static_cast<int>(cycles.size()); ++i) {
        for (int l = 0; l < 3; ++l) {
            const int xa = cycles[i].vertices[l];
            const int xb = cycles[i].vertices[(l + 1) % 3];
            const bool x_int = pc.x_vertex_interior[xa] && pc.x_vertex_interior[xb];
            for (int s = 0; s < num_steps; ++s) {
                ProductEdge& e = pc.edges[pc.edge_id(i, l, s)];
                e.cycle_index = i;
                e.x_local = l;
                e.x_halfedge = 3 * cycles[i].face_index + l;
                e.y_step = s;
                e.interior = x_int && pc.y_vertex_interior[pc.y_steps[s].src] &&
                             pc.y_vertex_interior[pc.y_steps[s].dst];
            }
        }
    }

    // Opposite interior product edges. Each interior source halfedge pair is
    // visited once (h < opp) and combined with every interior step and its
    // reverse, so each unordered pair lands in the list exactly once.
    for (int h = 0; h < mesh_x.num_halfedges(); ++h) {
        const int opp = mesh_x.opposite_halfedge[h];
        if (opp < 0 || opp < h) continue;
        const int xa = mesh_x.halfedge_src(h);
        const int xb = mesh_x.halfedge_dst(h);
        if (!pc.x_vertex_interior[xa] || !pc.x_vertex_interior[xb]) continue;
        const int ci = h / 3, li = h % 3;
        const int cj = opp / 3, lj = opp % 3;
        for (int s = 0; s < num_steps; ++s) {
            if (!pc.y_vertex_interior[pc.y_steps[s].src] ||
                !pc.y_vertex_interior[pc.y_steps[s].dst])
                continue;
            const int sr = pc.y_step_reverse[s];
            const int k = pc.edge_id(ci, li, s);
            const int j = pc.edge_id(cj, lj, sr);
            pc.opposite_pairs.push_back({std::min(k, j), std::max(k, j)});
        }
    }
    std::sort(pc.opposite_pairs.begin(), pc.opposite_pairs.end());
    return pc;
}

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 1.0 - a.dot(b) / (a.norm() * b.norm());
}

void compute_costs(ProductGraphCollection& collection, const Eigen::MatrixXd& feat_x,
                   const Eigen::MatrixXd& feat_y) {
    if (feat_x.rows() != collection.num_x_vertices)
        throw DimensionMismatch("feature rows != source vertex count");
    if (feat_y.rows() != collection.num_y_vertices)
        throw DimensionMismatch("feature rows != target vertex count");
    if (feat_x.cols() != feat_y.cols())
        throw DimensionMismatch("feature dimensions differ between shapes");

    // Row-normalised copies turn cosine distance into a dot product.
    auto normalise = [](const Eigen::MatrixXd& m, const char* which) {
        Eigen::MatrixXd out = m;
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            const double n = out.row(r).norm();
            if (n == 0.0) {
                std::ostringstream os;
                os << which << " feature row " << r;
                throw ZeroFeatureVector(os.str());
            }
            out.row(r) /= n;
        }
        return out;
    };
    const Eigen::MatrixXd nx = normalise(feat_x, "source");
    const Eigen::MatrixXd ny = normalise(feat_y, "target");

    for (auto& e : collection.edges) {
        const auto& cyc = collection.cycles[e.cycle_index];
        const int xa = cyc.vertices[e.x_local];
        const int xb = cyc.vertices[(e.x_local + 1) % 3];
        const YStep& s = collection.y_steps[e.y_step];
        const double d0 = 1.0 - nx.row(xa).dot(ny.row(s.src));
        const double d1 = 1.0 - nx.row(xb).dot(ny.row(s.dst));
        e.cost = std::max(0.0, 0.5 * (d0 + d1));
    }
}

}  // namespace ppm
