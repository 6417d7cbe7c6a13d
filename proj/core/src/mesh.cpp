#include "ppm/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

#include "ppm/errors.hpp"

namespace ppm {

bool TriangleMesh::has_undirected_edge(int a, int b) const {
    const auto& nb = neighbors[a];
    return std::binary_search(nb.begin(), nb.end(), b);
}

double TriangleMesh::surface_area() const {
    double area = 0.0;
    for (const auto& t : triangles) {
        const Eigen::Vector3d u = positions[t[1]] - positions[t[0]];
        const Eigen::Vector3d v = positions[t[2]] - positions[t[0]];
        area += 0.5 * u.cross(v).norm();
    }
    return area;
}

bool TriangleMesh::is_closed() const {
    for (bool b : boundary_flags)
        if (b) return false;
    return true;
}

bool TriangleMesh::is_connected() const {
    if (positions.empty()) return true;
    std::vector<char> seen(positions.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int u : neighbors[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++count;
                q.push(u);
            }
        }
    }
    return count == num_vertices();
}

TriangleMesh TriangleMesh::build(std::vector<Eigen::Vector3d> positions,
                                 std::vector<std::array<int, 3>> triangles) {
    TriangleMesh m;
    m.positions = std::move(positions);
    m.triangles = std::move(triangles);

    const int nv = m.num_vertices();
    const int nf = m.num_faces();
    if (nv < 3) throw ParseError("mesh needs at least 3 vertices");
    if (nf < 1) throw ParseError("mesh needs at least 1 triangle");
    for (const auto& p : m.positions) {
        if (!p.allFinite()) throw ParseError("non-finite vertex position");
    }

    std::vector<char> referenced(nv, 0);
    for (int t = 0; t < nf; ++t) {
        const auto& tri = m.triangles[t];
        for (int c = 0; c < 3; ++c) {
            if (tri[c] < 0 || tri[c] >= nv) {
                std::ostringstream os;
                os << "triangle " << t << " references vertex " << tri[c];
                throw ParseError(os.str());
            }
            referenced[tri[c]] = 1;
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            std::ostringstream os;
            os << "degenerate triangle " << t;
            throw ParseError(os.str());
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (!referenced[v]) {
            std::ostringstream os;
            os << "unreferenced vertex " << v;
            throw ParseError(os.str());
        }
    }

    m.halfedges.resize(3 * static_cast<std::size_t>(nf));
    for (int t = 0; t < nf; ++t) {
        for (int c = 0; c < 3; ++c) {
            m.halfedges[3 * t + c] = {m.triangles[t][c], m.triangles[t][(c + 1) % 3]};
        }
    }

    // Group halfedges by undirected edge; check manifoldness and orientation.
    std::map<std::array<int, 2>, std::vector<int>> edge_map;
    for (int h = 0; h < m.num_halfedges(); ++h) {
        const auto [a, b] = m.halfedges[h];
        edge_map[{std::min(a, b), std::max(a, b)}].push_back(h);
    }

    m.opposite_halfedge.assign(m.num_halfedges(), -1);
    m.boundary_flags.assign(nv, false);
    m.undirected_edges.reserve(edge_map.size());
    for (const auto& [key, hs] : edge_map) {
        if (hs.size() > 2) {
            std::ostringstream os;
            os << "edge (" << key[0] << "," << key[1] << ") belongs to " << hs.size()
               << " triangles";
            throw NonManifoldError(os.str());
        }
        if (hs.size() == 2) {
            if (m.halfedges[hs[0]][0] == m.halfedges[hs[1]][0]) {
                std::ostringstream os;
                os << "edge (" << key[0] << "," << key[1]
                   << ") induced twice in the same direction";
                throw OrientationError(os.str());
            }
            m.opposite_halfedge[hs[0]] = hs[1];
            m.opposite_halfedge[hs[1]] = hs[0];
        } else {
            m.boundary_flags[key[0]] = true;
            m.boundary_flags[key[1]] = true;
        }
        m.undirected_edges.push_back(key);
    }

    m.neighbors.assign(nv, {});
    for (const auto& e : m.undirected_edges) {
        m.neighbors[e[0]].push_back(e[1]);
        m.neighbors[e[1]].push_back(e[0]);
    }
    for (auto& nb : m.neighbors) std::sort(nb.begin(), nb.end());

    return m;
}

ResolutionMap ResolutionMap::identity(int n) {
    ResolutionMap r;
    r.high_to_low.resize(n);
    for (int i = 0; i < n; ++i) r.high_to_low[i] = i;
    return r;
}

bool ResolutionMap::is_surjective_onto(int low_count) const {
    std::vector<char> hit(low_count, 0);
    for (int v : high_to_low) {
        if (v < 0 || v >= low_count) return false;
        hit[v] = 1;
    }
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

std::vector<int> n_ring(const TriangleMesh& mesh, int v, int n) {
    if (v < 0 || v >= mesh.num_vertices()) throw IndexOutOfRange("n_ring vertex");
    std::vector<int> dist(mesh.num_vertices(), -1);
    std::vector<int> out;
    std::queue<int> q;
    dist[v] = 0;
    q.push(v);
    out.push_back(v);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        if (dist[u] == n) continue;
        for (int w : mesh.neighbors[u]) {
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                out.push_back(w);
                q.push(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> geodesic_from(const TriangleMesh& mesh, int source) {
    if (source < 0 || source >= mesh.num_vertices()) throw IndexOutOfRange("geodesic source");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(mesh.num_vertices(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (int w : mesh.neighbors[u]) {
            const double nd = d + mesh.edge_length(u, w);
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.emplace(nd, w);
            }
        }
    }
    return dist;
}

double diameter(const TriangleMesh& mesh) {
    double best = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto dist = geodesic_from(mesh, v);
        for (double d : dist) {
            if (std::isinf(d)) throw DisconnectedMeshError("diameter undefined");
            best = std::max(best, d);
        }
    }
    return best;
}

}  // namespace ppm
