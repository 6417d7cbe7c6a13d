#include "ppm/ilp.hpp"

#include <cmath>
#include <sstream>

#include "ppm/errors.hpp"

namespace ppm {

int IlpModel::count_rows(RowFamily family) const {
    int n = 0;
    for (const auto& r : rows)
        if (r.family == family) ++n;
    return n;
}

IlpModel assemble(const ProductGraphCollection& pc, const OverlapPrior& prior, double lambda,
                  const AllowedSet* allowed, const AssembleOptions& options) {
    if (static_cast<int>(prior.vertex_probs_x.size()) != pc.num_x_vertices)
        throw DimensionMismatch("prior size != source vertex count");
    if (static_cast<int>(prior.vertex_probs_y.size()) != pc.num_y_vertices)
        throw DimensionMismatch("prior size != target vertex count");
    if (lambda < 0.0 || !std::isfinite(lambda)) throw RangeError("lambda must be >= 0");
    for (double p : prior.vertex_probs_x)
        if (!(p >= 0.0 && p <= 1.0)) throw RangeError("source prior outside [0,1]");
    for (double p : prior.vertex_probs_y)
        if (!(p >= 0.0 && p <= 1.0)) throw RangeError("target prior outside [0,1]");
    if (allowed &&
        (allowed->num_x() != pc.num_x_vertices || allowed->num_y() != pc.num_y_vertices))
        throw DimensionMismatch("allowed set does not match mesh sizes");

    IlpModel m;
    m.num_x = pc.num_edges();
    m.num_sinj = static_cast<int>(pc.x_halfedges.size());
    m.num_ssur = pc.num_y_vertices;
    m.lambda = lambda;

    m.fixed_zero.assign(m.num_x, 0);
    if (allowed) {
        for (int k = 0; k < m.num_x; ++k) {
            const auto [xa, xb] = pc.edge_x_vertices(k);
            const YStep& s = pc.y_steps[pc.edges[k].y_step];
            if (!allowed->contains(xa, s.src) && !allowed->contains(xb, s.dst))
                m.fixed_zero[k] = 1;
        }
    }

    m.objective.assign(m.num_vars(), 0.0);
    for (int k = 0; k < m.num_x; ++k) m.objective[k] = pc.edges[k].cost;
    for (int j = 0; j < m.num_sinj; ++j) {
        const auto [va, vb] = pc.x_halfedges[j];
        m.objective[m.sinj_index(j)] = lambda * prior.edge_prob_x(va, vb);
    }
    for (int j = 0; j < m.num_ssur; ++j)
        m.objective[m.ssur_index(j)] = lambda * prior.vertex_probs_y[j];

    // CONT: flow balance at every product vertex, one row per vertex that
    // still touches a live edge. Incoming +1, outgoing -1.
    {
        std::vector<ConstraintRow> cont(pc.num_product_vertices());
        for (int k = 0; k < m.num_x; ++k) {
            if (m.fixed_zero[k]) continue;
            const auto [tail, head] = pc.edge_endpoints(k);
            cont[tail].terms.emplace_back(k, -1.0);
            cont[head].terms.emplace_back(k, 1.0);
        }
        for (auto& row : cont) {
            if (row.terms.empty()) continue;
            row.relation = Relation::Equal;
            row.rhs = 0.0;
            row.family = RowFamily::Cont;
            m.rows.push_back(std::move(row));
        }
    }

    // COUPL: opposite interior product edges carry equal values. Opposite
    // edges share their endpoint vertex pairs, so PRUNE eliminates them
    // together.
    for (const auto& [k, j] : pc.opposite_pairs) {
        if (m.fixed_zero[k] || m.fixed_zero[j]) continue;
        ConstraintRow row;
        row.terms = {{k, 1.0}, {j, -1.0}};
        row.relation = Relation::Equal;
        row.rhs = 0.0;
        row.family = RowFamily::Coupl;
        m.rows.push_back(std::move(row));
    }

    const double slack_sign = options.literal_signs ? -1.0 : 1.0;

    // INJY: each source halfedge is matched exactly once unless its slack
    // marks it outside the overlap.
    {
        std::vector<ConstraintRow> injy(m.num_sinj);
        for (int k = 0; k < m.num_x; ++k) {
            if (m.fixed_zero[k]) continue;
            injy[pc.edges[k].x_halfedge].terms.emplace_back(k, 1.0);
        }
        for (int j = 0; j < m.num_sinj; ++j) {
            auto& row = injy[j];
            row.terms.emplace_back(m.sinj_index(j), slack_sign);
            row.relation = Relation::Equal;
            row.rhs = 1.0;
            row.family = RowFamily::Injy;
            m.rows.push_back(std::move(row));
        }
    }

    // SURJY: each target vertex is matched at least once unless its slack
    // marks it outside the overlap. A step covers both its endpoints; a
    // self-edge covers its vertex once.
    {
        std::vector<ConstraintRow> surjy(m.num_ssur);
        for (int k = 0; k < m.num_x; ++k) {
            if (m.fixed_zero[k]) continue;
            const YStep& s = pc.y_steps[pc.edges[k].y_step];
            surjy[s.src].terms.emplace_back(k, 1.0);
            if (s.dst != s.src) surjy[s.dst].terms.emplace_back(k, 1.0);
        }
        for (int j = 0; j < m.num_ssur; ++j) {
            auto& row = surjy[j];
            row.terms.emplace_back(m.ssur_index(j), slack_sign);
            row.relation = Relation::GreaterEqual;
            row.rhs = 1.0;
            row.family = RowFamily::Surjy;
            m.rows.push_back(std::move(row));
        }
    }

    m.structure.num_cycles = pc.num_cycles();
    m.structure.num_y_vertices = pc.num_y_vertices;
    m.structure.vars.resize(m.num_x);
    for (int k = 0; k < m.num_x; ++k) {
        const ProductEdge& e = pc.edges[k];
        const YStep& s = pc.y_steps[e.y_step];
        m.structure.vars[k] = {e.cycle_index, e.x_local, e.x_halfedge, s.src, s.dst};
    }
    m.structure.x_halfedges = pc.x_halfedges;
    m.structure.x_halfedge_opposite = pc.x_halfedge_opposite;
    m.structure.x_vertex_interior = pc.x_vertex_interior;
    m.structure.y_vertex_interior = pc.y_vertex_interior;
    m.structure.prose_signs = !options.literal_signs;
    return m;
}

double assignment_objective(const IlpModel& model, const Assignment& assignment) {
    if (static_cast<int>(assignment.size()) != model.num_vars())
        throw DimensionMismatch("assignment length != variable count");
    double obj = 0.0;
    for (int i = 0; i < model.num_vars(); ++i)
        if (assignment[i]) obj += model.objective[i];
    return obj;
}

ValidationReport validate_assignment(const IlpModel& model, const Assignment& assignment) {
    ValidationReport report;
    report.objective = assignment_objective(model, assignment);
    for (int k = 0; k < model.num_x; ++k)
        if (model.fixed_zero[k] && assignment[k]) report.violated_fixed.push_back(k);
    for (int r = 0; r < static_cast<int>(model.rows.size()); ++r) {
        const auto& row = model.rows[r];
        double lhs = 0.0;
        for (const auto& [var, coef] : row.terms)
            if (assignment[var]) lhs += coef;
        const bool ok = row.relation == Relation::Equal ? std::abs(lhs - row.rhs) <= 1e-9
                                                        : lhs >= row.rhs - 1e-9;
        if (!ok) report.violated_rows.push_back(r);
    }
    return report;
}

}  // namespace ppm
