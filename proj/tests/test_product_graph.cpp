#include <doctest.h>

#include <map>
#include <set>

#include "ppm/errors.hpp"
#include "ppm/product_graph.hpp"
#include "ppm/rng.hpp"
#include "support/fixtures.hpp"

using namespace ppm;
using namespace ppm::testing;

namespace {

int expected_y_plus(const TriangleMesh& y, YEdgeMode mode) {
    return mode == YEdgeMode::Full ? 2 * y.num_undirected_edges() + y.num_vertices()
                                   : y.num_halfedges() + y.num_vertices();
}

}  // namespace

TEST_CASE("build_cycles covers every halfedge exactly once") {
    for (const auto& mesh : {single_triangle(), tetrahedron(), two_triangle_strip()}) {
        const auto cycles = build_cycles(mesh);
        REQUIRE(static_cast<int>(cycles.size()) == mesh.num_faces());
        std::multiset<std::pair<int, int>> cycle_edges;
        for (const auto& c : cycles)
            for (int l = 0; l < 3; ++l)
                cycle_edges.emplace(c.vertices[l], c.vertices[(l + 1) % 3]);
        std::multiset<std::pair<int, int>> halfedges;
        for (int h = 0; h < mesh.num_halfedges(); ++h)
            halfedges.emplace(mesh.halfedge_src(h), mesh.halfedge_dst(h));
        CHECK(cycle_edges == halfedges);
    }
}

TEST_CASE("two triangles sharing an edge traverse it oppositely") {
    const auto mesh = two_triangle_strip();
    const auto cycles = build_cycles(mesh);
    REQUIRE(cycles.size() == 2);
    int shared = 0;
    for (int l0 = 0; l0 < 3; ++l0) {
        const std::pair e0{cycles[0].vertices[l0], cycles[0].vertices[(l0 + 1) % 3]};
        for (int l1 = 0; l1 < 3; ++l1) {
            const std::pair e1{cycles[1].vertices[l1], cycles[1].vertices[(l1 + 1) % 3]};
            if (e0.first == e1.second && e0.second == e1.first) ++shared;
        }
    }
    CHECK(shared == 1);
}

TEST_CASE("product sizes: one triangle against a tetrahedron") {
    const auto x = single_triangle();
    const auto y = tetrahedron();
    const auto pc = build_product_collection(build_cycles(x), x, y);
    CHECK(pc.num_product_vertices() == 12);  // 3 * 1 * 4
    // E_Y+ has both directions of all 6 undirected edges plus 4 self-edges.
    CHECK(static_cast<int>(pc.y_steps.size()) == 16);
    CHECK(pc.num_edges() == 48);  // 3 * 1 * 16
    // All source vertices lie on the boundary: no coupled pairs.
    CHECK(pc.opposite_pairs.empty());
}

TEST_CASE("edge count formula holds on random mesh pairs") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_micro_mesh(rng);
        const auto y = random_micro_mesh(rng);
        for (const auto mode : {YEdgeMode::Full, YEdgeMode::Halfedges}) {
            const auto pc = build_product_collection(build_cycles(x), x, y, mode);
            CHECK(static_cast<int>(pc.y_steps.size()) == expected_y_plus(y, mode));
            CHECK(pc.num_edges() == 3 * x.num_faces() * expected_y_plus(y, mode));
            CHECK(pc.num_product_vertices() == 3 * x.num_faces() * y.num_vertices());
        }
    }
}

TEST_CASE("closed-closed pair: every non-self edge is interior and paired") {
    const auto x = tetrahedron();
    const auto y = tetrahedron();
    const auto pc = build_product_collection(build_cycles(x), x, y);

    // Brute-force pairing by the defining property.
    std::vector<int> partner(pc.num_edges(), -1);
    for (int k = 0; k < pc.num_edges(); ++k) {
        if (!pc.edges[k].interior) continue;
        const auto [ka, kb] = pc.edge_x_vertices(k);
        const YStep& ks = pc.y_steps[pc.edges[k].y_step];
        for (int j = 0; j < pc.num_edges(); ++j) {
            if (j == k || !pc.edges[j].interior) continue;
            const auto [ja, jb] = pc.edge_x_vertices(j);
            const YStep& js = pc.y_steps[pc.edges[j].y_step];
            if (ka == jb && kb == ja && ks.src == js.dst && ks.dst == js.src) {
                REQUIRE(partner[k] == -1);  // at most one partner
                partner[k] = j;
            }
        }
    }
    std::set<std::array<int, 2>> brute;
    for (int k = 0; k < pc.num_edges(); ++k) {
        if (partner[k] < 0) continue;
        CHECK(partner[partner[k]] == k);  // involution
        brute.insert({std::min(k, partner[k]), std::max(k, partner[k])});
    }
    const std::set<std::array<int, 2>> built(pc.opposite_pairs.begin(), pc.opposite_pairs.end());
    CHECK(brute == built);

    for (const auto& e : pc.edges) {
        const bool self = pc.y_steps[e.y_step].is_self();
        CHECK(e.interior == true);  // closed meshes: everything interior
        if (!self) {
            const int k = pc.edge_id(e.cycle_index, e.x_local, e.y_step);
            CHECK(partner[k] >= 0);
        }
    }
}

TEST_CASE("boundary-touching edges are never interior") {
    Rng rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = random_micro_mesh(rng);
        const auto y = random_micro_mesh(rng);
        const auto pc = build_product_collection(build_cycles(x), x, y);
        for (int k = 0; k < pc.num_edges(); ++k) {
            const auto [xa, xb] = pc.edge_x_vertices(k);
            const YStep& s = pc.y_steps[pc.edges[k].y_step];
            const bool touches_boundary =
                x.is_boundary_vertex(xa) || x.is_boundary_vertex(xb) ||
                y.is_boundary_vertex(s.src) || y.is_boundary_vertex(s.dst);
            if (touches_boundary) CHECK_FALSE(pc.edges[k].interior);
        }
        // Pairing is an involution and no edge appears twice.
        std::set<int> seen;
        for (const auto& [k, j] : pc.opposite_pairs) {
            CHECK(pc.edges[k].interior);
            CHECK(pc.edges[j].interior);
            CHECK(seen.insert(k).second);
            CHECK(seen.insert(j).second);
        }
    }
}

TEST_CASE("cost formula examples") {
    const auto x = single_triangle();
    const auto y = single_triangle();
    auto pc = build_product_collection(build_cycles(x), x, y);

    SUBCASE("identical features give zero cost") {
        Eigen::MatrixXd f(3, 2);
        f << 1, 0, 1, 0, 1, 0;
        compute_costs(pc, f, f);
        for (const auto& e : pc.edges) CHECK(e.cost == doctest::Approx(0.0));
    }
    SUBCASE("orthogonal endpoints cost one") {
        Eigen::MatrixXd fx(3, 2), fy(3, 2);
        fx << 1, 0, 1, 0, 1, 0;
        fy << 0, 1, 0, 1, 0, 1;
        compute_costs(pc, fx, fy);
        for (const auto& e : pc.edges) CHECK(e.cost == doctest::Approx(1.0));
    }
    SUBCASE("antipodal at one endpoint, identical at the other") {
        // cost = (2 + 0) / 2 = 1 on edges pairing vertex 0 with target 0
        // and vertex 1 with target 1.
        Eigen::MatrixXd fx(3, 2), fy(3, 2);
        fx << 1, 0, 1, 0, 1, 0;
        fy << -1, 0, 1, 0, 1, 0;
        compute_costs(pc, fx, fy);
        int k = -1;
        for (int e = 0; e < pc.num_edges(); ++e) {
            const auto [xa, xb] = pc.edge_x_vertices(e);
            const YStep& s = pc.y_steps[pc.edges[e].y_step];
            if (xa == 0 && s.src == 0 && s.dst == 1) k = e;
        }
        REQUIRE(k >= 0);
        CHECK(pc.edges[k].cost == doctest::Approx(1.0));
    }
    SUBCASE("zero feature row is rejected") {
        Eigen::MatrixXd fx = Eigen::MatrixXd::Ones(3, 2);
        Eigen::MatrixXd fy = Eigen::MatrixXd::Ones(3, 2);
        fy.row(1).setZero();
        CHECK_THROWS_AS(compute_costs(pc, fx, fy), ZeroFeatureVector);
    }
    SUBCASE("dimension mismatches are rejected") {
        CHECK_THROWS_AS(compute_costs(pc, Eigen::MatrixXd::Ones(2, 2),
                                      Eigen::MatrixXd::Ones(3, 2)),
                        DimensionMismatch);
        CHECK_THROWS_AS(compute_costs(pc, Eigen::MatrixXd::Ones(3, 2),
                                      Eigen::MatrixXd::Ones(3, 3)),
                        DimensionMismatch);
    }
}

TEST_CASE("opposite edges carry equal cost") {
    Rng rng(31);
    const auto x = tetrahedron();
    const auto y = tetrahedron_missing_face();
    auto pc = build_product_collection(build_cycles(x), x, y);
    compute_costs(pc, random_features(rng, x.num_vertices()),
                  random_features(rng, y.num_vertices()));
    for (const auto& [k, j] : pc.opposite_pairs)
        CHECK(pc.edges[k].cost == doctest::Approx(pc.edges[j].cost));
}
