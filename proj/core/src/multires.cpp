#include "ppm/multires.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "ppm/errors.hpp"

namespace ppm {

const char* to_string(Direction d) {
    switch (d) {
        case Direction::XToY: return "x_to_y";
        case Direction::YToX: return "y_to_x";
        case Direction::BothPickBetter: return "both_pick_better";
    }
    return "unknown";
}

void PipelineConfig::validate() const {
    if (resolutions.empty()) throw RangeError("resolutions must be non-empty");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1])
            throw RangeError("resolutions must be strictly increasing");
    if (time_limits_s.empty()) throw RangeError("at least one time limit required");
    for (double t : time_limits_s)
        if (!(t > 0.0)) throw RangeError("time limits must be positive");
    if (ring < 0) throw RangeError("ring must be >= 0");
    if (upsample_ring < 0) throw RangeError("upsample ring must be >= 0");
    if (lambda < 0.0) throw RangeError("lambda must be >= 0");
}

namespace {

std::pair<int, int> split_budget(int total, double area_x, double area_y, int faces_x,
                                 int faces_y) {
    int bx = static_cast<int>(std::lround(total * area_x / (area_x + area_y)));
    bx = std::clamp(bx, 4, total - 4);
    bx = std::min(bx, faces_x);
    int by = std::min(total - bx, faces_y);
    bx = std::min(std::max(total - by, 4), faces_x);
    return {bx, by};
}

}  // namespace

Hierarchy build_hierarchy(const TriangleMesh& mesh_x, const TriangleMesh& mesh_y,
                          std::vector<int> combined_budgets) {
    std::sort(combined_budgets.begin(), combined_budgets.end());
    const int total_faces = mesh_x.num_faces() + mesh_y.num_faces();
    for (int b : combined_budgets) {
        if (b < 8) throw RangeError("combined budget must be >= 8");
        if (b > total_faces) throw RangeError("combined budget exceeds input face count");
    }

    const double area_x = mesh_x.surface_area();
    const double area_y = mesh_y.surface_area();

    Hierarchy h;
    h.levels.resize(combined_budgets.size());

    // Build finest first, then decimate level to level.
    const TriangleMesh* prev_x = &mesh_x;
    const TriangleMesh* prev_y = &mesh_y;
    std::vector<int> prev_origin_x, prev_origin_y;  // empty = identity
    bool prev_is_full = true;
    for (int li = static_cast<int>(combined_budgets.size()) - 1; li >= 0; --li) {
        HierarchyLevel& lvl = h.levels[li];
        lvl.combined_budget = combined_budgets[li];
        const auto [bx, by] = split_budget(combined_budgets[li], area_x, area_y,
                                           prev_x->num_faces(), prev_y->num_faces());
        if (prev_is_full && bx >= prev_x->num_faces() && by >= prev_y->num_faces()) {
            lvl.mesh_x = *prev_x;
            lvl.mesh_y = *prev_y;
            lvl.origin_x.resize(prev_x->num_vertices());
            for (int v = 0; v < prev_x->num_vertices(); ++v) lvl.origin_x[v] = v;
            lvl.origin_y.resize(prev_y->num_vertices());
            for (int v = 0; v < prev_y->num_vertices(); ++v) lvl.origin_y[v] = v;
            if (li == static_cast<int>(combined_budgets.size()) - 1) {
                h.full_to_finest_x = ResolutionMap::identity(prev_x->num_vertices());
                h.full_to_finest_y = ResolutionMap::identity(prev_y->num_vertices());
                h.finest_is_full = true;
            } else {
                h.levels[li + 1].gamma_x_to_coarser =
                    ResolutionMap::identity(prev_x->num_vertices());
                h.levels[li + 1].gamma_y_to_coarser =
                    ResolutionMap::identity(prev_y->num_vertices());
            }
        } else {
            DecimateResult dx = decimate(*prev_x, std::min(bx, prev_x->num_faces()));
            DecimateResult dy = decimate(*prev_y, std::min(by, prev_y->num_faces()));
            lvl.mesh_x = std::move(dx.mesh);
            lvl.mesh_y = std::move(dy.mesh);
            lvl.origin_x.resize(dx.kept_origin.size());
            for (std::size_t v = 0; v < dx.kept_origin.size(); ++v)
                lvl.origin_x[v] = prev_origin_x.empty() ? dx.kept_origin[v]
                                                        : prev_origin_x[dx.kept_origin[v]];
            lvl.origin_y.resize(dy.kept_origin.size());
            for (std::size_t v = 0; v < dy.kept_origin.size(); ++v)
                lvl.origin_y[v] = prev_origin_y.empty() ? dy.kept_origin[v]
                                                        : prev_origin_y[dy.kept_origin[v]];
            if (li == static_cast<int>(combined_budgets.size()) - 1) {
                h.full_to_finest_x = dx.map;
                h.full_to_finest_y = dy.map;
            } else {
                h.levels[li + 1].gamma_x_to_coarser = dx.map;
                h.levels[li + 1].gamma_y_to_coarser = dy.map;
            }
        }
        prev_x = &lvl.mesh_x;
        prev_y = &lvl.mesh_y;
        prev_origin_x = lvl.origin_x;
        prev_origin_y = lvl.origin_y;
        prev_is_full = false;
    }
    return h;
}

AllowedSet allowed_set(const Matching& sigma_lr, const ResolutionMap& gamma_x,
                       const ResolutionMap& gamma_y, const TriangleMesh& mesh_x_hr,
                       const TriangleMesh& mesh_y_hr, int ring) {
    if (gamma_x.size() != mesh_x_hr.num_vertices() || gamma_y.size() != mesh_y_hr.num_vertices())
        throw DimensionMismatch("resolution maps do not match the high-res meshes");
    const int num_low_x = static_cast<int>(sigma_lr.sigma.size());
    int num_low_y = 0;
    for (int v : gamma_y.high_to_low) num_low_y = std::max(num_low_y, v + 1);
    for (int y : sigma_lr.sigma) num_low_y = std::max(num_low_y, y + 1);

    AllowedSet set(mesh_x_hr.num_vertices(), mesh_y_hr.num_vertices(), num_low_y);
    for (int x = 0; x < mesh_x_hr.num_vertices(); ++x) {
        for (int u : n_ring(mesh_x_hr, x, ring)) {
            const int lx = gamma_x(u);
            if (lx < 0 || lx >= num_low_x)
                throw DimensionMismatch("gamma_x does not target the low-res matching");
            const int ly = sigma_lr.sigma[lx];
            if (ly >= 0) set.add_x_reach(x, ly);
        }
    }
    for (int y = 0; y < mesh_y_hr.num_vertices(); ++y) {
        for (int w : n_ring(mesh_y_hr, y, ring)) set.add_y_reach(y, gamma_y(w));
    }
    return set;
}

Matching invert_matching(const Matching& reverse, int num_x, int num_y) {
    Matching out;
    out.sigma.assign(num_x, -1);
    for (int y = 0; y < static_cast<int>(reverse.sigma.size()); ++y) {
        const int x = reverse.sigma[y];
        if (x < 0) continue;
        if (x >= num_x) throw IndexOutOfRange("reverse matching image");
        if (out.sigma[x] < 0 || y < out.sigma[x]) out.sigma[x] = y;
    }
    out.matched_y_vertices.assign(num_y, 0);
    for (int y = 0; y < static_cast<int>(reverse.sigma.size()); ++y)
        if (reverse.sigma[y] >= 0) out.matched_y_vertices[y] = 1;
    return out;
}

namespace {

Eigen::MatrixXd subsample_rows(const Eigen::MatrixXd& full, const std::vector<int>& origin) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(origin.size()), full.cols());
    for (std::size_t i = 0; i < origin.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = full.row(origin[i]);
    return out;
}

std::vector<double> subsample(const std::vector<double>& full, const std::vector<int>& origin) {
    std::vector<double> out(origin.size());
    for (std::size_t i = 0; i < origin.size(); ++i) out[i] = full[origin[i]];
    return out;
}

struct DirectionRun {
    std::vector<StageRecord> stages;
    Matching matching_full;   // source-to-target of this run, full resolution
    Matching matching_finest;
    double final_objective = 0.0;
    IlpModel final_model;
    Solution final_solution;
    int finest_faces_x = 0, finest_faces_y = 0;
};

DirectionRun run_direction(const TriangleMesh& src, const TriangleMesh& dst,
                           const Eigen::MatrixXd& feat_src, const Eigen::MatrixXd& feat_dst,
                           const OverlapPrior& prior, const PipelineConfig& config,
                           const char* tag) {
    std::vector<int> budgets = config.resolutions;
    const int total_faces = src.num_faces() + dst.num_faces();
    for (int& b : budgets) b = std::min(b, total_faces);
    std::sort(budgets.begin(), budgets.end());
    budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());

    Hierarchy hier = build_hierarchy(src, dst, budgets);

    DirectionRun run;
    Matching prev;
    std::string solver_cmd = config.solver_cmd;
    if (config.backend == SolverBackend::External && solver_cmd.empty())
        solver_cmd = default_solver_command();

    for (std::size_t li = 0; li < hier.levels.size(); ++li) {
        const HierarchyLevel& lvl = hier.levels[li];
        const Eigen::MatrixXd fx = subsample_rows(feat_src, lvl.origin_x);
        const Eigen::MatrixXd fy = subsample_rows(feat_dst, lvl.origin_y);
        OverlapPrior lvl_prior{subsample(prior.vertex_probs_x, lvl.origin_x),
                               subsample(prior.vertex_probs_y, lvl.origin_y)};

        auto collection = build_product_collection(build_cycles(lvl.mesh_x), lvl.mesh_x,
                                                   lvl.mesh_y, config.y_edge_mode);
        compute_costs(collection, fx, fy);

        std::optional<AllowedSet> allowed;
        if (li > 0)
            allowed = allowed_set(prev, lvl.gamma_x_to_coarser, lvl.gamma_y_to_coarser,
                                  lvl.mesh_x, lvl.mesh_y, config.ring);

        IlpModel model =
            assemble(collection, lvl_prior, config.lambda, allowed ? &*allowed : nullptr);

        const double time_limit =
            config.time_limits_s[std::min(li, config.time_limits_s.size() - 1)];
        Solution sol;
        if (config.backend == SolverBackend::Exact) {
            ExactSolveOptions opts;
            opts.max_option_slots = config.exact_budget;
            sol = solve_exact(model, time_limit, opts);
        } else {
            sol = solve_external(model, solver_cmd, time_limit);
        }

        StageRecord rec;
        rec.level = lvl.combined_budget;
        rec.faces_x = lvl.mesh_x.num_faces();
        rec.faces_y = lvl.mesh_y.num_faces();
        rec.objective = sol.objective;
        rec.status = sol.status;
        rec.seconds = sol.solve_seconds;
        rec.direction = tag;
        rec.ring = li > 0 ? config.ring : -1;
        rec.active_vars = model.num_vars();
        for (int k = 0; k < model.num_x; ++k)
            if (model.eliminated(k)) --rec.active_vars;
        run.stages.push_back(rec);

        if (!sol.has_assignment()) {
            std::ostringstream os;
            os << "stage " << lvl.combined_budget << " (" << tag << ") returned "
               << to_string(sol.status);
            throw Error(ErrorKind::Solver, os.str());
        }

        prev = decode(collection, sol);
        if (li + 1 == hier.levels.size()) {
            run.final_objective = sol.objective;
            run.final_model = std::move(model);
            run.final_solution = std::move(sol);
            run.finest_faces_x = lvl.mesh_x.num_faces();
            run.finest_faces_y = lvl.mesh_y.num_faces();
        }
    }

    run.matching_finest = prev;
    if (hier.finest_is_full) {
        run.matching_full = prev;
    } else {
        run.matching_full = upsample_matching(prev, hier.full_to_finest_x, hier.full_to_finest_y,
                                              src, dst, hier.levels.back().mesh_y,
                                              config.upsample_ring, &feat_src, &feat_dst);
    }
    return run;
}

}  // namespace

PipelineResult run_pipeline(const TriangleMesh& mesh_x, const TriangleMesh& mesh_y,
                            const Eigen::MatrixXd& feat_x, const Eigen::MatrixXd& feat_y,
                            const OverlapPrior& prior, const PipelineConfig& config) {
    config.validate();
    if (feat_x.rows() != mesh_x.num_vertices() || feat_y.rows() != mesh_y.num_vertices())
        throw DimensionMismatch("feature rows do not match mesh vertex counts");
    if (static_cast<int>(prior.vertex_probs_x.size()) != mesh_x.num_vertices() ||
        static_cast<int>(prior.vertex_probs_y.size()) != mesh_y.num_vertices())
        throw DimensionMismatch("prior sizes do not match mesh vertex counts");

    PipelineResult result;
    if (config.direction == Direction::XToY || config.direction == Direction::YToX) {
        const bool forward = config.direction == Direction::XToY;
        OverlapPrior p = forward ? prior : OverlapPrior{prior.vertex_probs_y, prior.vertex_probs_x};
        DirectionRun run = forward
                               ? run_direction(mesh_x, mesh_y, feat_x, feat_y, p, config, "x_to_y")
                               : run_direction(mesh_y, mesh_x, feat_y, feat_x, p, config, "y_to_x");
        result.stages = run.stages;
        result.chosen_direction = forward ? "x_to_y" : "y_to_x";
        result.final_objective = run.final_objective;
        result.matching = forward ? run.matching_full
                                  : invert_matching(run.matching_full, mesh_x.num_vertices(),
                                                    mesh_y.num_vertices());
        result.matching_finest = run.matching_finest;
        result.final_model = std::move(run.final_model);
        result.final_solution = std::move(run.final_solution);
        result.finest_faces_x = run.finest_faces_x;
        result.finest_faces_y = run.finest_faces_y;
        return result;
    }

    // Both directions run concurrently; the better final-stage objective wins.
    OverlapPrior reversed_prior{prior.vertex_probs_y, prior.vertex_probs_x};
    auto fwd_future = std::async(std::launch::async, [&] {
        return run_direction(mesh_x, mesh_y, feat_x, feat_y, prior, config, "x_to_y");
    });
    DirectionRun rev =
        run_direction(mesh_y, mesh_x, feat_y, feat_x, reversed_prior, config, "y_to_x");
    DirectionRun fwd = fwd_future.get();

    result.stages = fwd.stages;
    result.stages.insert(result.stages.end(), rev.stages.begin(), rev.stages.end());
    const bool forward_wins = fwd.final_objective <= rev.final_objective;
    DirectionRun& winner = forward_wins ? fwd : rev;
    result.chosen_direction = forward_wins ? "x_to_y" : "y_to_x";
    result.final_objective = winner.final_objective;
    result.matching = forward_wins ? winner.matching_full
                                   : invert_matching(winner.matching_full, mesh_x.num_vertices(),
                                                     mesh_y.num_vertices());
    result.matching_finest = winner.matching_finest;
    result.final_model = std::move(winner.final_model);
    result.final_solution = std::move(winner.final_solution);
    result.finest_faces_x = winner.finest_faces_x;
    result.finest_faces_y = winner.finest_faces_y;
    return result;
}

}  // namespace ppm
