#include "ppm/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ppm/errors.hpp"
#include "ppm/solver.hpp"

namespace ppm {

int Matching::num_matched() const {
    int n = 0;
    for (int y : sigma)
        if (y >= 0) ++n;
    return n;
}

std::vector<std::uint8_t> Matching::overlap_x() const {
    std::vector<std::uint8_t> out(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = sigma[i] >= 0 ? 1 : 0;
    return out;
}

std::vector<std::uint8_t> Matching::overlap_y() const { return matched_y_vertices; }

Matching decode(const ProductGraphCollection& pc, const Solution& solution) {
    if (!solution.has_assignment()) throw InconsistentSolution("solution carries no assignment");
    const Assignment& a = solution.assignment;
    const int num_x = pc.num_edges();
    const int num_sinj = static_cast<int>(pc.x_halfedges.size());
    if (static_cast<int>(a.size()) != num_x + num_sinj + pc.num_y_vertices)
        throw DimensionMismatch("assignment does not match the collection");

    Matching m;
    m.sigma.assign(pc.num_x_vertices, -1);
    m.matched_x_edges.resize(num_sinj);
    for (int j = 0; j < num_sinj; ++j) m.matched_x_edges[j] = a[num_x + j] ? 0 : 1;
    m.matched_y_vertices.resize(pc.num_y_vertices);
    for (int j = 0; j < pc.num_y_vertices; ++j)
        m.matched_y_vertices[j] = a[num_x + num_sinj + j] ? 0 : 1;
    m.face_images.assign(pc.num_cycles(), {-1, -1, -1});

    // Per cycle, the active edges must form one closed path winding once.
    std::vector<std::array<int, 3>> active(pc.num_cycles(), {-1, -1, -1});
    std::vector<int> active_count(pc.num_cycles(), 0);
    for (int k = 0; k < num_x; ++k) {
        if (!a[k]) continue;
        const ProductEdge& e = pc.edges[k];
        if (active[e.cycle_index][e.x_local] >= 0)
            throw InconsistentSolution("two active edges over one cycle edge");
        active[e.cycle_index][e.x_local] = k;
        ++active_count[e.cycle_index];
    }

    // Candidate target images per source vertex.
    std::vector<std::map<int, int>> votes(pc.num_x_vertices);
    for (int i = 0; i < pc.num_cycles(); ++i) {
        if (active_count[i] == 0) continue;
        if (active_count[i] != 3) throw InconsistentSolution("open path in a cycle");
        std::array<int, 3> img{};
        for (int l = 0; l < 3; ++l) {
            const YStep& s = pc.y_steps[pc.edges[active[i][l]].y_step];
            img[l] = s.src;
            const YStep& prev = pc.y_steps[pc.edges[active[i][(l + 2) % 3]].y_step];
            if (prev.dst != s.src) throw InconsistentSolution("path does not close on the target");
        }
        m.face_images[i] = img;
        for (int l = 0; l < 3; ++l) ++votes[pc.cycles[i].vertices[l]][img[l]];
    }

    for (int v = 0; v < pc.num_x_vertices; ++v) {
        if (votes[v].empty()) continue;
        int best_y = -1, best_votes = 0;
        for (const auto& [y, n] : votes[v]) {
            if (n > best_votes) {  // map order ensures smallest index on ties
                best_votes = n;
                best_y = y;
            }
        }
        m.sigma[v] = best_y;
        if (votes[v].size() > 1) ++m.num_divergent_vertices;
    }
    return m;
}

ConsistencyReport check_consistency(const Matching& matching, const TriangleMesh& mesh_x,
                                    const TriangleMesh& mesh_y) {
    ConsistencyReport report;
    for (int h = 0; h < mesh_x.num_halfedges(); ++h) {
        const int xa = mesh_x.halfedge_src(h);
        const int xb = mesh_x.halfedge_dst(h);
        if (mesh_x.is_boundary_vertex(xa) || mesh_x.is_boundary_vertex(xb)) continue;
        const int ya = matching.sigma[xa];
        const int yb = matching.sigma[xb];
        if (ya < 0 || yb < 0) continue;
        if (mesh_y.is_boundary_vertex(ya) || mesh_y.is_boundary_vertex(yb)) continue;
        if (ya == yb || mesh_y.has_undirected_edge(ya, yb)) continue;
        report.violations.push_back(h);
    }
    return report;
}

Matching upsample_matching(const Matching& sigma_lr, const ResolutionMap& gamma_x,
                           const ResolutionMap& gamma_y, const TriangleMesh& mesh_x_hr,
                           const TriangleMesh& mesh_y_hr, const TriangleMesh& mesh_y_lr,
                           int ring, const Eigen::MatrixXd* feat_x_hr,
                           const Eigen::MatrixXd* feat_y_hr) {
    if (gamma_x.size() != mesh_x_hr.num_vertices() || gamma_y.size() != mesh_y_hr.num_vertices())
        throw DimensionMismatch("resolution maps do not match the high-res meshes");
    for (int v : gamma_x.high_to_low)
        if (v < 0 || v >= static_cast<int>(sigma_lr.sigma.size()))
            throw DimensionMismatch("gamma_x does not target the low-res matching");
    for (int v : gamma_y.high_to_low)
        if (v < 0 || v >= mesh_y_lr.num_vertices())
            throw DimensionMismatch("gamma_y does not target the low-res target mesh");
    const bool use_features = feat_x_hr && feat_y_hr;
    if (use_features && feat_x_hr->cols() != feat_y_hr->cols())
        throw DimensionMismatch("feature dimensions differ between shapes");

    // Group high-res target vertices by their low-res image.
    std::vector<std::vector<int>> preimage_y(mesh_y_lr.num_vertices());
    for (int y = 0; y < mesh_y_hr.num_vertices(); ++y) preimage_y[gamma_y(y)].push_back(y);

    Matching out;
    out.sigma.assign(mesh_x_hr.num_vertices(), -1);
    out.face_images.assign(mesh_x_hr.num_faces(), {-1, -1, -1});

    std::vector<std::vector<int>> ring_cache(mesh_y_lr.num_vertices());
    int empty_candidates = 0;
    for (int x = 0; x < mesh_x_hr.num_vertices(); ++x) {
        const int target_lr = sigma_lr.sigma[gamma_x(x)];
        if (target_lr < 0) continue;
        if (ring_cache[target_lr].empty())
            ring_cache[target_lr] = n_ring(mesh_y_lr, target_lr, ring);

        int best = -1;
        double best_score = std::numeric_limits<double>::infinity();
        for (int lr : ring_cache[target_lr]) {
            for (int y : preimage_y[lr]) {
                double score;
                if (use_features) {
                    score = cosine_distance(feat_x_hr->row(x), feat_y_hr->row(y));
                } else {
                    score = (mesh_x_hr.positions[x] - mesh_y_hr.positions[y]).norm();
                }
                if (score < best_score - 1e-15 || (score < best_score + 1e-15 && y < best)) {
                    best_score = score;
                    best = y;
                }
            }
        }
        if (best < 0) {
            ++empty_candidates;
            continue;
        }
        out.sigma[x] = best;
    }
    out.num_empty_candidates = empty_candidates;

    out.matched_x_edges.assign(mesh_x_hr.num_halfedges(), 0);
    for (int h = 0; h < mesh_x_hr.num_halfedges(); ++h) {
        out.matched_x_edges[h] =
            out.sigma[mesh_x_hr.halfedge_src(h)] >= 0 && out.sigma[mesh_x_hr.halfedge_dst(h)] >= 0
                ? 1
                : 0;
    }
    out.matched_y_vertices.assign(mesh_y_hr.num_vertices(), 0);
    for (int y : out.sigma)
        if (y >= 0) out.matched_y_vertices[y] = 1;
    return out;
}

void write_matching(const Matching& matching, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t x = 0; x < matching.sigma.size(); ++x)
        out << x << " " << matching.sigma[x] << "\n";
    if (!out) throw IoError("write failed for " + path);
}

std::vector<int> read_matching_sigma(const std::string& path, int num_x_vertices) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matching file " + path);
    std::vector<int> sigma(num_x_vertices, -1);
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int x, y;
        if (!(ls >> x >> y)) throw ParseError(path + ": bad matching line '" + line + "'");
        if (x < 0 || x >= num_x_vertices) throw IndexOutOfRange(path + ": source index");
        sigma[x] = y;
        ++count;
    }
    if (count != num_x_vertices) throw LengthMismatch(path + ": matching line count");
    return sigma;
}

void write_overlap(const std::vector<std::uint8_t>& flags, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (auto f : flags) out << (f ? 1 : 0) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

std::vector<std::uint8_t> read_overlap(const std::string& path, int expected) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open overlap file " + path);
    std::vector<std::uint8_t> flags;
    int v;
    while (in >> v) {
        if (v != 0 && v != 1) throw RangeError(path + ": overlap entries must be 0/1");
        flags.push_back(static_cast<std::uint8_t>(v));
    }
    if (static_cast<int>(flags.size()) != expected)
        throw LengthMismatch(path + ": overlap line count");
    return flags;
}

void write_color_transfer_ply(const Matching& matching, const TriangleMesh& mesh_x,
                              const TriangleMesh& mesh_y, const std::string& path_x,
                              const std::string& path_y) {
    Eigen::Vector3d lo = mesh_y.positions[0], hi = mesh_y.positions[0];
    for (const auto& p : mesh_y.positions) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Eigen::Vector3d span = (hi - lo).cwiseMax(1e-12);
    std::vector<std::array<unsigned char, 3>> colors_y(mesh_y.num_vertices());
    for (int v = 0; v < mesh_y.num_vertices(); ++v) {
        const Eigen::Vector3d t = (mesh_y.positions[v] - lo).cwiseQuotient(span);
        colors_y[v] = {static_cast<unsigned char>(55 + 200 * t[0]),
                       static_cast<unsigned char>(55 + 200 * t[1]),
                       static_cast<unsigned char>(55 + 200 * t[2])};
    }
    std::vector<std::array<unsigned char, 3>> colors_x(mesh_x.num_vertices(), {128, 128, 128});
    for (int x = 0; x < mesh_x.num_vertices(); ++x)
        if (matching.sigma[x] >= 0) colors_x[x] = colors_y[matching.sigma[x]];
    save_mesh_ply(mesh_x, path_x, &colors_x);
    save_mesh_ply(mesh_y, path_y, &colors_y);
}

}  // namespace ppm
