#pragma once

#include <string>

#include "ppm/ilp.hpp"

namespace ppm {

enum class SolveStatus { Optimal, FeasibleTimeLimit, Infeasible, NoSolutionFound };

const char* to_string(SolveStatus status);

struct Solution {
    Assignment assignment;
    double objective = 0.0;
    SolveStatus status = SolveStatus::NoSolutionFound;
    double solve_seconds = 0.0;
    long long nodes_explored = 0;

    bool has_assignment() const {
        return status == SolveStatus::Optimal || status == SolveStatus::FeasibleTimeLimit;
    }
};

struct ExactSolveOptions {
    /// Cap on the summed per-cycle option counts. The default admits every
    /// instance with at most 6 source and 6 target triangles.
    long long max_option_slots = 800;
};

/// Depth-first branch-and-bound over per-cycle choices: each surface cycle
/// is either unmatched (its three injectivity slacks active) or carries one
/// closed product path winding once around the cycle. Requires a model
/// assembled with the default sign convention. Throws BudgetExceeded when
/// the instance is too large for exact enumeration.
Solution solve_exact(const IlpModel& model, double time_limit_s,
                     const ExactSolveOptions& options = {});

/// Writes the model in LP text format and invokes an external MILP solver
/// command. The command template substitutes {model}, {solution} and
/// {timelimit}; the solver must write "name value" lines (see README).
/// The returned assignment is re-validated before being accepted.
Solution solve_external(const IlpModel& model, const std::string& solver_cmd,
                        double time_limit_s);

/// Default external command: the PPM_SOLVER_CMD environment variable, or
/// the bundled MILP adapter script when it can be located. Empty if neither
/// is available.
std::string default_solver_command();

// --- LP / solution files ----------------------------------------------

/// Deterministic LP-format export. Variables are named x_<k>, si_<j>,
/// ss_<j> by their model indices; PRUNE-eliminated variables are omitted.
void export_lp(const IlpModel& model, const std::string& path);

/// Parses a "name value" solution file against the model's variable naming.
/// Missing variables default to 0. "#" starts a comment; a
/// "# status <word>" comment declares the solver status.
struct ParsedSolution {
    Assignment assignment;
    bool has_status = false;
    SolveStatus status = SolveStatus::Optimal;
};
ParsedSolution read_solution_file(const IlpModel& model, const std::string& path);

void write_solution_file(const IlpModel& model, const Assignment& assignment,
                         SolveStatus status, const std::string& path);

}  // namespace ppm
