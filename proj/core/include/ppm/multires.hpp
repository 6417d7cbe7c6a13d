#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppm/allowed_set.hpp"
#include "ppm/ilp.hpp"
#include "ppm/matching.hpp"
#include "ppm/mesh.hpp"
#include "ppm/product_graph.hpp"
#include "ppm/solver.hpp"

namespace ppm {

struct HierarchyLevel {
    int combined_budget = 0;
    TriangleMesh mesh_x, mesh_y;
    std::vector<int> origin_x, origin_y;  // level vertex -> full-mesh vertex
    // Maps from this level onto the next coarser one (empty on the coarsest).
    ResolutionMap gamma_x_to_coarser, gamma_y_to_coarser;
};

/// Resolution ladder, coarsest level first. Budgets are split between the
/// two shapes proportionally to surface area; decimation chains level to
/// level, so composing the per-level maps gives the map to the coarsest.
struct Hierarchy {
    std::vector<HierarchyLevel> levels;
    ResolutionMap full_to_finest_x, full_to_finest_y;
    bool finest_is_full = false;
};

Hierarchy build_hierarchy(const TriangleMesh& mesh_x, const TriangleMesh& mesh_y,
                          std::vector<int> combined_budgets);

/// Allowed pairs at the finer resolution: (x, y) is allowed iff
/// gamma_y(ring(y)) intersects sigma_lr(gamma_x(ring(x))), rings taken on
/// the finer meshes.
AllowedSet allowed_set(const Matching& sigma_lr, const ResolutionMap& gamma_x,
                       const ResolutionMap& gamma_y, const TriangleMesh& mesh_x_hr,
                       const TriangleMesh& mesh_y_hr, int ring);

enum class Direction { XToY, YToX, BothPickBetter };
enum class SolverBackend { Exact, External };

const char* to_string(Direction d);

struct PipelineConfig {
    std::vector<int> resolutions{600, 800, 1000};
    int ring = 2;
    double lambda = 0.5;
    std::vector<double> time_limits_s{3600.0, 1800.0, 1800.0};
    Direction direction = Direction::XToY;
    int upsample_ring = 1;  // final lift to full resolution
    SolverBackend backend = SolverBackend::Exact;
    std::string solver_cmd;          // empty -> default_solver_command()
    long long exact_budget = 200000;  // option-slot cap handed to solve_exact
    YEdgeMode y_edge_mode = YEdgeMode::Full;

    void validate() const;
};

struct StageRecord {
    int level = 0;  // combined face budget
    int faces_x = 0;
    int faces_y = 0;
    double objective = 0.0;
    SolveStatus status = SolveStatus::NoSolutionFound;
    double seconds = 0.0;
    std::string direction;
    int ring = -1;  // pruning ring, -1 when the stage ran unpruned
    long long active_vars = 0;
};

struct PipelineResult {
    Matching matching;  // source-to-target at full resolution
    std::vector<StageRecord> stages;
    std::string chosen_direction;
    double final_objective = 0.0;
    // Final solved stage of the chosen direction, for re-validation.
    IlpModel final_model;
    Solution final_solution;
    Matching matching_finest;
    int finest_faces_x = 0, finest_faces_y = 0;
};

/// Coarse-to-fine solve: unpruned at the coarsest level, then re-solved at
/// each finer level with PRUNE constraints from the previous stage. With
/// BothPickBetter both source/target assignments run end-to-end and the
/// final-stage objective decides.
PipelineResult run_pipeline(const TriangleMesh& mesh_x, const TriangleMesh& mesh_y,
                            const Eigen::MatrixXd& feat_x, const Eigen::MatrixXd& feat_y,
                            const OverlapPrior& prior, const PipelineConfig& config);

/// Inverts a target-to-source matching into source-to-target form: each
/// source vertex takes the smallest target vertex mapping to it.
Matching invert_matching(const Matching& reverse, int num_x, int num_y);

}  // namespace ppm
