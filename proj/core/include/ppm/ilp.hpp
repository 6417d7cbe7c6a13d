#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ppm/allowed_set.hpp"
#include "ppm/product_graph.hpp"

namespace ppm {

/// Per-vertex probabilities of lying inside the overlapping region.
/// Source-edge probabilities are the mean of the endpoint probabilities.
struct OverlapPrior {
    std::vector<double> vertex_probs_x;
    std::vector<double> vertex_probs_y;

    double edge_prob_x(int va, int vb) const {
        return 0.5 * (vertex_probs_x[va] + vertex_probs_x[vb]);
    }
    static OverlapPrior ones(int num_x, int num_y) {
        return {std::vector<double>(num_x, 1.0), std::vector<double>(num_y, 1.0)};
    }
};

enum class Relation { Equal, GreaterEqual };
enum class RowFamily { Cont, Coupl, Injy, Surjy };

struct ConstraintRow {
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    Relation relation = Relation::Equal;
    double rhs = 0.0;
    RowFamily family = RowFamily::Cont;
};

/// PP-ILP shape metadata retained by the assembled model so the built-in
/// exact solver can recover the per-cycle path structure without the
/// product graph collection.
struct IlpStructure {
    struct VarInfo {
        int cycle;
        int x_local;
        int x_halfedge;
        int y_src, y_dst;
    };
    int num_cycles = 0;
    int num_y_vertices = 0;
    std::vector<VarInfo> vars;
    std::vector<std::array<int, 2>> x_halfedges;
    std::vector<int> x_halfedge_opposite;
    std::vector<bool> x_vertex_interior;
    std::vector<bool> y_vertex_interior;
    bool prose_signs = true;
};

/// Binary linear program over edge variables x, injectivity slacks si (one
/// per source halfedge) and surjectivity slacks ss (one per target vertex).
/// Variable indices: x in [0, num_x), si in [num_x, num_x + num_sinj),
/// ss in [num_x + num_sinj, num_vars).
struct IlpModel {
    int num_x = 0;
    int num_sinj = 0;
    int num_ssur = 0;
    std::vector<double> objective;
    std::vector<ConstraintRow> rows;
    std::vector<std::uint8_t> fixed_zero;  // per x variable, eliminated before solving
    double lambda = 0.0;
    IlpStructure structure;

    int num_vars() const { return num_x + num_sinj + num_ssur; }
    int sinj_index(int halfedge) const { return num_x + halfedge; }
    int ssur_index(int y_vertex) const { return num_x + num_sinj + y_vertex; }
    bool eliminated(int x_var) const { return fixed_zero[x_var] != 0; }
    int count_rows(RowFamily family) const;
};

struct AssembleOptions {
    /// Assemble the printed sign convention (sum x - s = 1 / >= 1) instead
    /// of the default semantics (sum x + s). For export and external-solver
    /// comparison only.
    bool literal_signs = false;
};

IlpModel assemble(const ProductGraphCollection& collection, const OverlapPrior& prior,
                  double lambda, const AllowedSet* allowed = nullptr,
                  const AssembleOptions& options = {});

struct ValidationReport {
    std::vector<int> violated_rows;     // indices into model.rows
    std::vector<int> violated_fixed;    // eliminated x variables set to 1
    double objective = 0.0;

    bool feasible() const { return violated_rows.empty() && violated_fixed.empty(); }
};

using Assignment = std::vector<std::uint8_t>;

ValidationReport validate_assignment(const IlpModel& model, const Assignment& assignment);

double assignment_objective(const IlpModel& model, const Assignment& assignment);

}  // namespace ppm
