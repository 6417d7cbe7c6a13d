#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/mesh.hpp"

namespace ppm {

namespace {

// Mutable collapse state. Vertex positions never move: a collapse (u -> v)
// re-targets u's faces at v, so every surviving vertex is an input vertex.
struct CollapseState {
    const TriangleMesh* input;
    std::vector<std::array<int, 3>> faces;
    std::vector<char> face_alive;
    std::vector<std::set<int>> vertex_faces;
    std::vector<int> merged_into;  // -1 while alive
    int alive_count;

    explicit CollapseState(const TriangleMesh& mesh)
        : input(&mesh),
          faces(mesh.triangles),
          face_alive(mesh.num_faces(), 1),
          vertex_faces(mesh.num_vertices()),
          merged_into(mesh.num_vertices(), -1),
          alive_count(mesh.num_faces()) {
        for (int f = 0; f < mesh.num_faces(); ++f)
            for (int c = 0; c < 3; ++c) vertex_faces[faces[f][c]].insert(f);
    }

    bool vertex_alive(int v) const { return merged_into[v] < 0; }

    std::vector<int> edge_faces(int u, int v) const {
        std::vector<int> out;
        for (int f : vertex_faces[u]) {
            const auto& t = faces[f];
            if (t[0] == v || t[1] == v || t[2] == v) out.push_back(f);
        }
        return out;
    }

    std::set<int> neighbor_set(int v) const {
        std::set<int> nb;
        for (int f : vertex_faces[v]) {
            for (int c = 0; c < 3; ++c)
                if (faces[f][c] != v) nb.insert(faces[f][c]);
        }
        return nb;
    }

    bool is_boundary_now(int v) const {
        // v is boundary iff some incident undirected edge lies in exactly
        // one alive face.
        std::vector<int> occ;
        for (int f : vertex_faces[v]) {
            for (int c = 0; c < 3; ++c)
                if (faces[f][c] != v) occ.push_back(faces[f][c]);
        }
        std::sort(occ.begin(), occ.end());
        for (std::size_t i = 0; i < occ.size();) {
            std::size_t j = i;
            while (j < occ.size() && occ[j] == occ[i]) ++j;
            if (j - i == 1) return true;
            i = j;
        }
        return occ.empty();
    }

    // Collapse u into v. Caller must have verified the guards.
    void apply(int u, int v, const std::vector<int>& dying) {
        for (int f : dying) {
            face_alive[f] = 0;
            --alive_count;
            for (int c = 0; c < 3; ++c) vertex_faces[faces[f][c]].erase(f);
        }
        const std::vector<int> remaining(vertex_faces[u].begin(), vertex_faces[u].end());
        for (int f : remaining) {
            for (int c = 0; c < 3; ++c)
                if (faces[f][c] == u) faces[f][c] = v;
            vertex_faces[u].erase(f);
            vertex_faces[v].insert(f);
        }
        merged_into[u] = v;
    }
};

// Guards for collapsing u into v. Returns the dying faces on success.
bool collapse_allowed(const CollapseState& st, int u, int v, int target_faces,
                      std::vector<int>* dying_out) {
    if (!st.vertex_alive(u) || !st.vertex_alive(v)) return false;
    const auto dying = st.edge_faces(u, v);
    if (dying.empty()) return false;
    if (st.alive_count - static_cast<int>(dying.size()) < target_faces) return false;

    // The survivor must keep at least one face (its post-collapse star is
    // faces(u) union faces(v) minus the dying ones, which lie in both).
    if (st.vertex_faces[u].size() + st.vertex_faces[v].size() < 2 * dying.size() + 1)
        return false;

    const bool bu = st.is_boundary_now(u);
    const bool bv = st.is_boundary_now(v);
    if (bu && !bv) return false;                  // never merge boundary into interior
    if (bu && bv && dying.size() != 1) return false;  // both boundary: boundary edges only

    // Link condition: the common neighbourhood must be exactly the apex
    // vertices of the faces spanning the edge.
    std::set<int> apexes;
    for (int f : dying) {
        for (int c = 0; c < 3; ++c)
            if (st.faces[f][c] != u && st.faces[f][c] != v) apexes.insert(st.faces[f][c]);
    }
    const auto nu = st.neighbor_set(u);
    const auto nv = st.neighbor_set(v);
    std::set<int> shared;
    std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(),
                          std::inserter(shared, shared.begin()));
    if (shared != apexes) return false;

    // An apex whose whole star dies would become unreferenced.
    for (int w : apexes) {
        int dying_at_w = 0;
        for (int f : dying) {
            const auto& t = st.faces[f];
            if (t[0] == w || t[1] == w || t[2] == w) ++dying_at_w;
        }
        if (static_cast<int>(st.vertex_faces[w].size()) <= dying_at_w) return false;
    }

    *dying_out = dying;
    return true;
}

}  // namespace

DecimateResult decimate(const TriangleMesh& mesh, int target_faces) {
    if (target_faces >= mesh.num_faces()) {
        // Already at or past the target.
        if (target_faces > mesh.num_faces()) {
            std::ostringstream os;
            os << "target " << target_faces << " exceeds face count " << mesh.num_faces();
            throw DecimationFailure(os.str());
        }
        DecimateResult r;
        r.mesh = mesh;
        r.map = ResolutionMap::identity(mesh.num_vertices());
        r.kept_origin.resize(mesh.num_vertices());
        for (int v = 0; v < mesh.num_vertices(); ++v) r.kept_origin[v] = v;
        return r;
    }
    if (target_faces < 4) {
        std::ostringstream os;
        os << "target " << target_faces << " below the 4-face floor";
        throw DecimationFailure(os.str());
    }

    CollapseState st(mesh);

    using Cand = std::tuple<double, int, int>;  // (edge length, u, v): collapse u into v
    std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;
    auto push_edge = [&](int a, int b) {
        const double len = mesh.edge_length(a, b);
        heap.emplace(len, a, b);
        heap.emplace(len, b, a);
    };
    for (const auto& e : mesh.undirected_edges) push_edge(e[0], e[1]);

    // Rejected candidates may become legal after nearby collapses, so they
    // are stashed and retried whenever progress was made.
    std::vector<Cand> stash;
    bool progress = false;
    while (st.alive_count > target_faces) {
        if (heap.empty()) {
            if (progress && !stash.empty()) {
                for (const auto& c : stash) heap.push(c);
                stash.clear();
                progress = false;
                continue;
            }
            break;
        }
        const auto [len, u, v] = heap.top();
        heap.pop();
        std::vector<int> dying;
        if (!collapse_allowed(st, u, v, target_faces, &dying)) {
            if (st.vertex_alive(u) && st.vertex_alive(v)) stash.emplace_back(len, u, v);
            continue;
        }
        st.apply(u, v, dying);
        progress = true;
        for (int w : st.neighbor_set(v)) push_edge(v, w);
    }

    if (st.alive_count > target_faces + 2) {
        std::ostringstream os;
        os << "stuck at " << st.alive_count << " faces, target " << target_faces;
        throw DecimationFailure(os.str());
    }

    // Compact surviving vertices in ascending original order.
    std::vector<char> used(mesh.num_vertices(), 0);
    for (int f = 0; f < static_cast<int>(st.faces.size()); ++f) {
        if (!st.face_alive[f]) continue;
        for (int c = 0; c < 3; ++c) used[st.faces[f][c]] = 1;
    }
    std::vector<int> new_index(mesh.num_vertices(), -1);
    std::vector<int> kept_origin;
    std::vector<Eigen::Vector3d> positions;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (used[v]) {
            new_index[v] = static_cast<int>(kept_origin.size());
            kept_origin.push_back(v);
            positions.push_back(mesh.positions[v]);
        }
    }
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(st.alive_count);
    for (int f = 0; f < static_cast<int>(st.faces.size()); ++f) {
        if (!st.face_alive[f]) continue;
        triangles.push_back({new_index[st.faces[f][0]], new_index[st.faces[f][1]],
                             new_index[st.faces[f][2]]});
    }

    DecimateResult result;
    try {
        result.mesh = TriangleMesh::build(std::move(positions), std::move(triangles));
    } catch (const Error& e) {
        throw DecimationFailure(std::string("result mesh invalid: ") + e.what());
    }

    result.map.high_to_low.resize(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        int r = v;
        while (st.merged_into[r] >= 0) r = st.merged_into[r];
        result.map.high_to_low[v] = new_index[r];
    }
    result.kept_origin = std::move(kept_origin);
    return result;
}

}  // namespace ppm
