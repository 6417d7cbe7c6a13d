#include "oracle.hpp"

#include <array>
#include <functional>
#include <limits>
#include <map>

namespace ppm::testing {

namespace {

using ppm::Assignment;
using ppm::OverlapPrior;
using ppm::ProductGraphCollection;
using ppm::YStep;

struct Choice {
    std::array<int, 3> edge_ids;  // product edge per local cycle edge
    std::array<int, 3> images;    // target vertex per local cycle corner
    double cost = 0.0;
};

struct Enumerator {
    const ProductGraphCollection& pc;
    const OverlapPrior& prior;
    double lambda;
    const std::vector<std::uint8_t>* eliminated;

    std::vector<std::vector<Choice>> choices;      // per cycle
    std::vector<double> unmatched_cost;            // per cycle
    std::vector<const Choice*> current;            // nullptr = unmatched
    std::vector<int> cover;                        // per target vertex
    double running = 0.0;

    double best = std::numeric_limits<double>::infinity();
    std::vector<const Choice*> best_choice;
    long long leaves = 0;
    long long max_leaves = -1;
    bool aborted = false;
    std::function<void(const std::vector<const Choice*>&, double)> on_leaf;

    void build() {
        const int nc = pc.num_cycles();
        choices.resize(nc);
        unmatched_cost.assign(nc, 0.0);
        // Collect edges by (cycle, local, source image).
        std::vector<std::array<std::multimap<int, int>, 3>> from(nc);
        for (int k = 0; k < pc.num_edges(); ++k) {
            if (eliminated && (*eliminated)[k]) continue;
            const auto& e = pc.edges[k];
            from[e.cycle_index][e.x_local].emplace(pc.y_steps[e.y_step].src, k);
        }
        for (int i = 0; i < nc; ++i) {
            for (int l = 0; l < 3; ++l) {
                const auto [va, vb] = pc.x_halfedges[3 * pc.cycles[i].face_index + l];
                unmatched_cost[i] += lambda * prior.edge_prob_x(va, vb);
            }
            for (const auto& [y0, k0] : from[i][0]) {
                const int y1 = pc.y_steps[pc.edges[k0].y_step].dst;
                auto r1 = from[i][1].equal_range(y1);
                for (auto i1 = r1.first; i1 != r1.second; ++i1) {
                    const int y2 = pc.y_steps[pc.edges[i1->second].y_step].dst;
                    auto r2 = from[i][2].equal_range(y2);
                    for (auto i2 = r2.first; i2 != r2.second; ++i2) {
                        if (pc.y_steps[pc.edges[i2->second].y_step].dst != y0) continue;
                        Choice c;
                        c.edge_ids = {k0, i1->second, i2->second};
                        c.images = {y0, y1, y2};
                        c.cost = pc.edges[k0].cost + pc.edges[i1->second].cost +
                                 pc.edges[i2->second].cost;
                        choices[i].push_back(c);
                    }
                }
            }
        }
        current.assign(nc, nullptr);
        cover.assign(pc.num_y_vertices, 0);
    }

    bool interior_x_edge(int halfedge) const {
        const auto [a, b] = pc.x_halfedges[halfedge];
        return pc.x_vertex_interior[a] && pc.x_vertex_interior[b];
    }

    // Checks cycle i's tentative choice against every already-fixed
    // neighbour across shared interior source edges.
    bool feasible_against_fixed(int i, const Choice* mine) const {
        for (int l = 0; l < 3; ++l) {
            const int h = 3 * pc.cycles[i].face_index + l;
            const int opp = pc.x_halfedge_opposite[h];
            if (opp < 0 || !interior_x_edge(h)) continue;
            const int ni = opp / 3;
            if (ni >= i) continue;  // cycles are fixed in index order
            const int nl = opp % 3;
            const Choice* theirs = current[ni];
            const bool mine_interior =
                mine && pc.y_vertex_interior[mine->images[l]] &&
                pc.y_vertex_interior[mine->images[(l + 1) % 3]];
            const bool theirs_interior =
                theirs && pc.y_vertex_interior[theirs->images[nl]] &&
                pc.y_vertex_interior[theirs->images[(nl + 1) % 3]];
            if (mine_interior &&
                !(theirs && theirs->images[nl] == mine->images[(l + 1) % 3] &&
                  theirs->images[(nl + 1) % 3] == mine->images[l]))
                return false;
            if (theirs_interior &&
                !(mine && mine->images[l] == theirs->images[(nl + 1) % 3] &&
                  mine->images[(l + 1) % 3] == theirs->images[nl]))
                return false;
        }
        return true;
    }

    void leaf() {
        ++leaves;
        if (max_leaves >= 0 && leaves > max_leaves) {
            aborted = true;
            return;
        }
        double obj = running;
        for (int y = 0; y < pc.num_y_vertices; ++y)
            if (cover[y] == 0) obj += lambda * prior.vertex_probs_y[y];
        if (on_leaf) on_leaf(current, obj);
        if (obj < best) {
            best = obj;
            best_choice = current;
        }
    }

    void recurse(int i) {
        if (aborted) return;
        if (i == pc.num_cycles()) {
            leaf();
            return;
        }
        if (feasible_against_fixed(i, nullptr)) {
            current[i] = nullptr;
            running += unmatched_cost[i];
            recurse(i + 1);
            running -= unmatched_cost[i];
        }
        for (const Choice& c : choices[i]) {
            if (aborted) return;
            if (!feasible_against_fixed(i, &c)) continue;
            current[i] = &c;
            running += c.cost;
            for (int v : c.images) ++cover[v];
            recurse(i + 1);
            for (int v : c.images) --cover[v];
            running -= c.cost;
            current[i] = nullptr;
        }
    }

    Assignment to_assignment(const std::vector<const Choice*>& pick) const {
        const int num_sinj = static_cast<int>(pc.x_halfedges.size());
        Assignment a(pc.num_edges() + num_sinj + pc.num_y_vertices, 0);
        std::vector<char> covered(pc.num_y_vertices, 0);
        for (int i = 0; i < pc.num_cycles(); ++i) {
            if (pick[i]) {
                for (int k : pick[i]->edge_ids) a[k] = 1;
                for (int v : pick[i]->images) covered[v] = 1;
            } else {
                for (int l = 0; l < 3; ++l)
                    a[pc.num_edges() + 3 * pc.cycles[i].face_index + l] = 1;
            }
        }
        for (int y = 0; y < pc.num_y_vertices; ++y)
            if (!covered[y]) a[pc.num_edges() + num_sinj + y] = 1;
        return a;
    }
};

}  // namespace

OracleResult enumerate_optimal(const ProductGraphCollection& collection,
                               const OverlapPrior& prior, double lambda,
                               const std::vector<std::uint8_t>* eliminated,
                               long long max_leaves) {
    Enumerator e{collection, prior, lambda, eliminated, {}, {}, {}, {}, 0.0};
    e.max_leaves = max_leaves;
    e.build();
    e.recurse(0);
    OracleResult out;
    out.feasible_leaves = e.leaves;
    if (!e.best_choice.empty() || collection.num_cycles() == 0 ||
        e.best < std::numeric_limits<double>::infinity()) {
        out.found = !e.aborted;
        out.objective = e.best;
        out.assignment = e.to_assignment(e.best_choice.empty()
                                             ? std::vector<const Choice*>(
                                                   collection.num_cycles(), nullptr)
                                             : e.best_choice);
    }
    return out;
}

long long for_each_feasible(const ProductGraphCollection& collection, const OverlapPrior& prior,
                            double lambda,
                            const std::function<void(const Assignment&, double)>& fn) {
    Enumerator e{collection, prior, lambda, nullptr, {}, {}, {}, {}, 0.0};
    e.build();
    e.on_leaf = [&](const std::vector<const Choice*>& pick, double obj) {
        fn(e.to_assignment(pick), obj);
    };
    e.recurse(0);
    return e.leaves;
}

}  // namespace ppm::testing
