#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/solver.hpp"

namespace ppm {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleTimeLimit: return "feasible_timelimit";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NoSolutionFound: return "nosolution";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One admissible closed path for a cycle: the images of its three corners
// and the three edge variables realising the steps between them.
struct CycleOption {
    std::array<int, 3> vars;
    std::array<int, 3> images;
    double cost = 0.0;
    std::array<int, 3> covered{};  // deduplicated images, -1 padded
    int num_covered = 0;
};

// Coupling relation of one cycle edge: the neighbouring cycle and its
// local edge across an interior source edge.
struct EdgeLink {
    int neighbor = -1;
    int neighbor_local = -1;
};

struct CycleData {
    std::vector<CycleOption> options;  // cost-sorted
    double unmatched_cost = 0.0;
    double min_contrib = 0.0;          // min over options and unmatched
    std::array<EdgeLink, 3> links{};
    // Option indices grouped by the step taken over one local edge, and
    // conditioned cost minima used for lower bounds.
    std::array<std::map<std::pair<int, int>, std::vector<int>>, 3> by_step;
    std::array<std::map<std::pair<int, int>, double>, 3> min_given_step;
    std::array<double, 3> min_noninterior{};  // includes the unmatched branch
    std::vector<int> coverable;               // target vertices any option covers
};

struct Searcher {
    const IlpModel& model;
    const IlpStructure& st;
    std::vector<CycleData> cycles;

    std::vector<double> y_weight;

    // search state
    std::vector<const CycleOption*> chosen;
    std::vector<char> assigned;
    std::vector<int> cover_count;        // from chosen options
    std::vector<int> coverable_count;    // unassigned cycles that could cover y
    std::vector<double> current_min;     // per-cycle conditioned bound
    double unassigned_bound = 0.0;       // sum of current_min over unassigned
    double uncovered_weight = 0.0;
    double committed = 0.0;
    std::vector<char> impossible;        // unassigned cycle has no admissible choice
    int dead_count = 0;
    int num_unassigned = 0;
    std::vector<std::vector<std::pair<int, double>>> undo;  // per depth
    std::vector<std::vector<int>> undo_dead;

    double best_obj = kInf;
    std::vector<const CycleOption*> best_choice;
    long long nodes = 0;
    bool timed_out = false;
    std::chrono::steady_clock::time_point deadline;

    explicit Searcher(const IlpModel& m) : model(m), st(m.structure) {}

    bool x_edge_interior(int h) const {
        const auto [a, b] = st.x_halfedges[h];
        return st.x_vertex_interior[a] && st.x_vertex_interior[b];
    }

    bool step_interior(int src, int dst) const {
        return st.y_vertex_interior[src] && st.y_vertex_interior[dst];
    }

    void build(long long max_option_slots) {
        const int nc = st.num_cycles;
        cycles.resize(nc);

        std::vector<std::array<std::multimap<int, int>, 3>> by_src(nc);
        for (int k = 0; k < model.num_x; ++k) {
            if (model.eliminated(k)) continue;
            const auto& v = st.vars[k];
            by_src[v.cycle][v.x_local].emplace(v.y_src, k);
        }

        long long total_slots = 0;
        for (int i = 0; i < nc; ++i) {
            CycleData& cd = cycles[i];
            for (int l = 0; l < 3; ++l) {
                cd.unmatched_cost += model.objective[model.sinj_index(3 * i + l)];
                const int opp = st.x_halfedge_opposite[3 * i + l];
                if (opp >= 0 && x_edge_interior(3 * i + l))
                    cd.links[l] = {opp / 3, opp % 3};
            }
            for (const auto& [y0, k0] : by_src[i][0]) {
                const int y1 = st.vars[k0].y_dst;
                const auto r1 = by_src[i][1].equal_range(y1);
                for (auto it1 = r1.first; it1 != r1.second; ++it1) {
                    const int k1 = it1->second;
                    const int y2 = st.vars[k1].y_dst;
                    const auto r2 = by_src[i][2].equal_range(y2);
                    for (auto it2 = r2.first; it2 != r2.second; ++it2) {
                        const int k2 = it2->second;
                        if (st.vars[k2].y_dst != y0) continue;
                        CycleOption opt;
                        opt.vars = {k0, k1, k2};
                        opt.images = {y0, y1, y2};
                        opt.cost = model.objective[k0] + model.objective[k1] +
                                   model.objective[k2];
                        opt.covered = {y0, -1, -1};
                        opt.num_covered = 1;
                        if (y1 != y0) opt.covered[opt.num_covered++] = y1;
                        if (y2 != y0 && y2 != y1) opt.covered[opt.num_covered++] = y2;
                        cd.options.push_back(opt);
                    }
                }
            }
            std::sort(cd.options.begin(), cd.options.end(),
                      [](const CycleOption& a, const CycleOption& b) {
                          if (a.cost != b.cost) return a.cost < b.cost;
                          return a.images < b.images;
                      });
            cd.min_contrib = cd.unmatched_cost;
            if (!cd.options.empty()) cd.min_contrib = std::min(cd.min_contrib, cd.options[0].cost);
            total_slots += static_cast<long long>(cd.options.size()) + 1;

            cd.min_noninterior = {cd.unmatched_cost, cd.unmatched_cost, cd.unmatched_cost};
            std::vector<char> seen_y(st.num_y_vertices, 0);
            for (int oi = 0; oi < static_cast<int>(cd.options.size()); ++oi) {
                const CycleOption& opt = cd.options[oi];
                for (int c = 0; c < opt.num_covered; ++c) {
                    if (!seen_y[opt.covered[c]]) {
                        seen_y[opt.covered[c]] = 1;
                        cd.coverable.push_back(opt.covered[c]);
                    }
                }
                for (int l = 0; l < 3; ++l) {
                    const std::pair<int, int> step{opt.images[l], opt.images[(l + 1) % 3]};
                    cd.by_step[l][step].push_back(oi);
                    auto [it, fresh] = cd.min_given_step[l].try_emplace(step, opt.cost);
                    if (!fresh) it->second = std::min(it->second, opt.cost);
                    if (!step_interior(step.first, step.second))
                        cd.min_noninterior[l] = std::min(cd.min_noninterior[l], opt.cost);
                }
            }
        }
        if (total_slots > max_option_slots) {
            std::ostringstream os;
            os << total_slots << " per-cycle options exceed the budget of " << max_option_slots;
            throw BudgetExceeded(os.str());
        }

        y_weight.resize(st.num_y_vertices);
        for (int y = 0; y < st.num_y_vertices; ++y)
            y_weight[y] = model.objective[model.ssur_index(y)];

        chosen.assign(nc, nullptr);
        assigned.assign(nc, 0);
        cover_count.assign(st.num_y_vertices, 0);
        coverable_count.assign(st.num_y_vertices, 0);
        for (const auto& cd : cycles)
            for (int y : cd.coverable) ++coverable_count[y];
        for (double w : y_weight) uncovered_weight += w;
        current_min.resize(nc);
        for (int i = 0; i < nc; ++i) {
            current_min[i] = cycles[i].min_contrib;
            unassigned_bound += current_min[i];
        }
        impossible.assign(nc, 0);
        num_unassigned = nc;
        undo.resize(nc + 1);
        undo_dead.resize(nc + 1);
    }

    bool compatible(int i, const CycleOption* opt) const {
        for (int l = 0; l < 3; ++l) {
            const auto& link = cycles[i].links[l];
            if (link.neighbor < 0 || !assigned[link.neighbor]) continue;
            const CycleOption* nopt = chosen[link.neighbor];
            const int nl = link.neighbor_local;
            int my_src = -1, my_dst = -1, their_src = -1, their_dst = -1;
            if (opt) {
                my_src = opt->images[l];
                my_dst = opt->images[(l + 1) % 3];
            }
            if (nopt) {
                their_src = nopt->images[nl];
                their_dst = nopt->images[(nl + 1) % 3];
            }
            const bool mine_interior = opt && step_interior(my_src, my_dst);
            const bool theirs_interior = nopt && step_interior(their_src, their_dst);
            if (mine_interior && !(nopt && their_src == my_dst && their_dst == my_src))
                return false;
            if (theirs_interior && !(opt && my_src == their_dst && my_dst == their_src))
                return false;
        }
        return true;
    }

    // Slack weight of target vertices that are neither covered nor
    // reachable by any remaining cycle.
    double surjy_lower_bound() const {
        double loss = 0.0;
        for (int y = 0; y < st.num_y_vertices; ++y) {
            if (cover_count[y] == 0 && coverable_count[y] == 0 && y_weight[y] > 0.0)
                loss += y_weight[y];
        }
        return loss;
    }

    void apply_cover(const CycleOption& opt, int delta) {
        for (int c = 0; c < opt.num_covered; ++c) {
            const int y = opt.covered[c];
            if (delta > 0) {
                if (cover_count[y]++ == 0) uncovered_weight -= y_weight[y];
            } else {
                if (--cover_count[y] == 0) uncovered_weight += y_weight[y];
            }
        }
    }

    // Tightens a neighbour's conditioned minimum after assigning cycle i.
    void raise_neighbor_bound(int depth, int j, double cond) {
        if (cond == kInf) {
            // The neighbour has no admissible choice under this assignment.
            if (!impossible[j]) {
                impossible[j] = 1;
                ++dead_count;
                undo_dead[depth].push_back(j);
            }
            return;
        }
        if (cond <= current_min[j]) return;
        undo[depth].emplace_back(j, current_min[j]);
        unassigned_bound += cond - current_min[j];
        current_min[j] = cond;
    }

    void assign(int depth, int i, const CycleOption* opt) {
        chosen[i] = opt;
        assigned[i] = 1;
        --num_unassigned;
        unassigned_bound -= current_min[i];
        for (int y : cycles[i].coverable) --coverable_count[y];
        if (opt) {
            committed += opt->cost;
            apply_cover(*opt, +1);
        } else {
            committed += cycles[i].unmatched_cost;
        }
        undo[depth].clear();
        undo_dead[depth].clear();
        for (int l = 0; l < 3; ++l) {
            const auto& link = cycles[i].links[l];
            if (link.neighbor < 0 || assigned[link.neighbor]) continue;
            const CycleData& nd = cycles[link.neighbor];
            const int nl = link.neighbor_local;
            double cond;
            if (opt && step_interior(opt->images[l], opt->images[(l + 1) % 3])) {
                const std::pair<int, int> forced{opt->images[(l + 1) % 3], opt->images[l]};
                const auto it = nd.min_given_step[nl].find(forced);
                cond = it == nd.min_given_step[nl].end() ? kInf : it->second;
            } else {
                cond = nd.min_noninterior[nl];
            }
            raise_neighbor_bound(depth, link.neighbor, cond);
        }
    }

    void unassign(int depth, int i, const CycleOption* opt) {
        for (int j : undo_dead[depth]) {
            impossible[j] = 0;
            --dead_count;
        }
        undo_dead[depth].clear();
        for (auto it = undo[depth].rbegin(); it != undo[depth].rend(); ++it) {
            unassigned_bound += it->second - current_min[it->first];
            current_min[it->first] = it->second;
        }
        undo[depth].clear();
        if (opt) {
            apply_cover(*opt, -1);
            committed -= opt->cost;
        } else {
            committed -= cycles[i].unmatched_cost;
        }
        for (int y : cycles[i].coverable) ++coverable_count[y];
        unassigned_bound += current_min[i];
        ++num_unassigned;
        assigned[i] = 0;
        chosen[i] = nullptr;
    }

    // Forced candidate list of an unassigned cycle, when a neighbour pins
    // one of its steps. Returns nullptr if unconstrained; sets dead when
    // the pin admits no option.
    const std::vector<int>* forced_candidates(int i, bool* dead) const {
        const std::vector<int>* narrowest = nullptr;
        for (int l = 0; l < 3; ++l) {
            const auto& link = cycles[i].links[l];
            if (link.neighbor < 0 || !assigned[link.neighbor]) continue;
            const CycleOption* nopt = chosen[link.neighbor];
            if (!nopt) continue;
            const int nl = link.neighbor_local;
            const int ns = nopt->images[nl], nt = nopt->images[(nl + 1) % 3];
            if (!step_interior(ns, nt)) continue;
            const auto it = cycles[i].by_step[l].find({nt, ns});
            if (it == cycles[i].by_step[l].end()) {
                *dead = true;
                return nullptr;
            }
            if (!narrowest || it->second.size() < narrowest->size()) narrowest = &it->second;
        }
        return narrowest;
    }

    // Picks the next cycle: a forced one with the fewest candidates if any
    // exists, otherwise the unassigned cycle with the fewest options.
    int select_cycle(const std::vector<int>** forced, bool* dead) const {
        int best_forced = -1;
        std::size_t forced_width = SIZE_MAX;
        int best_free = -1;
        std::size_t free_width = SIZE_MAX;
        for (int i = 0; i < st.num_cycles; ++i) {
            if (assigned[i]) continue;
            bool local_dead = false;
            const std::vector<int>* cand = forced_candidates(i, &local_dead);
            if (local_dead) {
                *dead = true;
                return i;
            }
            if (cand) {
                if (cand->size() < forced_width) {
                    forced_width = cand->size();
                    best_forced = i;
                    *forced = cand;
                }
            } else if (best_forced < 0 && cycles[i].options.size() < free_width) {
                free_width = cycles[i].options.size();
                best_free = i;
            }
        }
        if (best_forced >= 0) return best_forced;
        *forced = nullptr;
        return best_free;
    }

    void dfs(int depth) {
        if (timed_out) return;
        if ((++nodes & 1023) == 0 && std::chrono::steady_clock::now() > deadline) {
            timed_out = true;
            return;
        }
        if (num_unassigned == 0) {
            const double obj = committed + uncovered_weight;
            if (obj < best_obj - 1e-12) {
                best_obj = obj;
                best_choice = chosen;
            }
            return;
        }
        if (dead_count > 0) return;
        if (committed + unassigned_bound + surjy_lower_bound() >= best_obj - 1e-12) return;

        const std::vector<int>* forced = nullptr;
        bool dead = false;
        const int i = select_cycle(&forced, &dead);
        if (dead || i < 0) return;
        const CycleData& cd = cycles[i];

        auto try_option = [&](const CycleOption& opt) {
            if (timed_out) return;
            if (committed + opt.cost + (unassigned_bound - current_min[i]) >= best_obj - 1e-12)
                return;
            if (!compatible(i, &opt)) return;
            assign(depth, i, &opt);
            dfs(depth + 1);
            unassign(depth, i, &opt);
        };
        auto try_unmatched = [&] {
            if (timed_out) return;
            if (committed + cd.unmatched_cost + (unassigned_bound - current_min[i]) >=
                best_obj - 1e-12)
                return;
            if (!compatible(i, nullptr)) return;
            assign(depth, i, nullptr);
            dfs(depth + 1);
            unassign(depth, i, nullptr);
        };

        if (forced) {
            // The pinned step is interior, so staying unmatched is not an
            // option for this cycle.
            for (int oi : *forced) try_option(cd.options[oi]);
            return;
        }
        const bool unmatched_first =
            cd.unmatched_cost < (cd.options.empty() ? kInf : cd.options[0].cost);
        if (unmatched_first) try_unmatched();
        for (const auto& opt : cd.options) {
            if (timed_out) return;
            if (committed + opt.cost + (unassigned_bound - current_min[i]) >= best_obj - 1e-12)
                break;  // options are cost-sorted
            try_option(opt);
        }
        if (!unmatched_first) try_unmatched();
    }

    Assignment emit(const std::vector<const CycleOption*>& choice) const {
        Assignment a(model.num_vars(), 0);
        std::vector<char> covered(st.num_y_vertices, 0);
        for (int i = 0; i < st.num_cycles; ++i) {
            if (const CycleOption* opt = choice[i]) {
                for (int v : opt->vars) a[v] = 1;
                for (int c = 0; c < opt->num_covered; ++c) covered[opt->covered[c]] = 1;
            } else {
                for (int l = 0; l < 3; ++l) a[model.sinj_index(3 * i + l)] = 1;
            }
        }
        for (int y = 0; y < st.num_y_vertices; ++y)
            if (!covered[y]) a[model.ssur_index(y)] = 1;
        return a;
    }
};

}  // namespace

Solution solve_exact(const IlpModel& model, double time_limit_s,
                     const ExactSolveOptions& options) {
    if (!model.structure.prose_signs)
        throw ValidationError("exact solver requires the default sign convention");
    if (3 * model.structure.num_cycles != model.num_sinj)
        throw ValidationError("model structure does not describe a PP-ILP instance");

    const auto start = std::chrono::steady_clock::now();
    Searcher search(model);
    const double capped_limit = std::min(std::max(time_limit_s, 0.0), 1e9);
    search.deadline = start + std::chrono::microseconds(static_cast<long long>(capped_limit * 1e6));
    search.build(options.max_option_slots);

    // The all-slack assignment is always feasible and seeds the incumbent.
    std::vector<const CycleOption*> all_slack(model.structure.num_cycles, nullptr);
    double slack_obj = search.uncovered_weight;
    for (const auto& cd : search.cycles) slack_obj += cd.unmatched_cost;
    search.best_obj = slack_obj;
    search.best_choice = all_slack;

    search.dfs(0);

    Solution sol;
    sol.assignment = search.emit(search.best_choice);
    sol.objective = assignment_objective(model, sol.assignment);
    sol.status = search.timed_out ? SolveStatus::FeasibleTimeLimit : SolveStatus::Optimal;
    sol.nodes_explored = search.nodes;
    sol.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

}  // namespace ppm
