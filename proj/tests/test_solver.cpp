#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "ppm/errors.hpp"
#include "ppm/matching.hpp"
#include "ppm/rng.hpp"
#include "ppm/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace ppm;
using namespace ppm::testing;

namespace {

std::string adapter_command() {
    return std::string("python3 ") + PPM_ADAPTER_PATH + " {model} {solution} {timelimit}";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ProductGraphCollection permute_edges(const ProductGraphCollection& pc, Rng& rng) {
    std::vector<int> perm(pc.num_edges());
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = pc.num_edges() - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    ProductGraphCollection out = pc;
    for (int k = 0; k < pc.num_edges(); ++k) out.edges[perm[k]] = pc.edges[k];
    for (auto& pair : out.opposite_pairs) {
        const int pa = perm[pair[0]], pb = perm[pair[1]];
        pair = {std::min(pa, pb), std::max(pa, pb)};
    }
    std::sort(out.opposite_pairs.begin(), out.opposite_pairs.end());
    return out;
}

struct MicroInstance {
    TriangleMesh x, y;
    ProductGraphCollection pc;
    OverlapPrior prior;
    double lambda = 0.0;
};

MicroInstance make_micro(Rng& rng, int max_faces = 4) {
    MicroInstance inst;
    inst.x = random_micro_mesh(rng, max_faces);
    inst.y = random_micro_mesh(rng, max_faces);
    inst.pc = build_product_collection(build_cycles(inst.x), inst.x, inst.y);
    compute_costs(inst.pc, random_features(rng, inst.x.num_vertices()),
                  random_features(rng, inst.y.num_vertices()));
    inst.prior = random_prior(rng, inst.x.num_vertices(), inst.y.num_vertices());
    const double lambdas[] = {0.0, 0.3, 0.5, 1.0};
    inst.lambda = lambdas[rng.uniform_int(4)];
    return inst;
}

}  // namespace

TEST_CASE("identity instance solves to zero with the identity path") {
    const auto x = single_triangle();
    auto pc = build_product_collection(build_cycles(x), x, x);
    for (auto& e : pc.edges) {
        const auto& cyc = pc.cycles[e.cycle_index];
        const YStep& s = pc.y_steps[e.y_step];
        const bool identity = s.src == cyc.vertices[e.x_local] &&
                              s.dst == cyc.vertices[(e.x_local + 1) % 3];
        e.cost = identity ? 0.0 : 1.0;
    }
    const auto model = assemble(pc, OverlapPrior::ones(3, 3), 1.0);
    const auto sol = solve_exact(model, 10.0);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(0.0));
    const auto m = decode(pc, sol);
    for (int v = 0; v < 3; ++v) CHECK(m.sigma[v] == v);
}

TEST_CASE("lambda zero yields the empty matching") {
    Rng rng(53);
    const auto inst = make_micro(rng);
    const auto model = assemble(inst.pc, inst.prior, 0.0);
    const auto sol = solve_exact(model, 10.0);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(0.0));
    const auto m = decode(inst.pc, sol);
    CHECK(m.num_matched() == 0);
}

TEST_CASE("seeded closed pair matches the exhaustive enumerator") {
    Rng rng(42);
    const auto x = tetrahedron();
    auto pc = build_product_collection(build_cycles(x), x, x);
    for (auto& e : pc.edges) e.cost = rng.uniform();
    const auto prior = random_prior(rng, 4, 4);
    const auto model = assemble(pc, prior, 0.5);
    const auto sol = solve_exact(model, 30.0);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(validate_assignment(model, sol.assignment).feasible());

    const auto oracle = enumerate_optimal(pc, prior, 0.5);
    REQUIRE(oracle.found);
    CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
}

TEST_CASE("exact solver agrees with the oracle on random micro instances") {
    Rng rng(1001);
    for (int trial = 0; trial < 12; ++trial) {
        const auto inst = make_micro(rng);
        const auto model = assemble(inst.pc, inst.prior, inst.lambda);
        const auto sol = solve_exact(model, 30.0);
        REQUIRE(sol.status == SolveStatus::Optimal);
        REQUIRE(validate_assignment(model, sol.assignment).feasible());
        const auto oracle = enumerate_optimal(inst.pc, inst.prior, inst.lambda);
        REQUIRE(oracle.found);
        CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
    }
}

TEST_CASE("optimal objective is invariant under edge reindexing") {
    Rng rng(59);
    const auto inst = make_micro(rng);
    const auto base = solve_exact(assemble(inst.pc, inst.prior, 0.5), 30.0);
    for (int trial = 0; trial < 3; ++trial) {
        const auto permuted = permute_edges(inst.pc, rng);
        const auto sol = solve_exact(assemble(permuted, inst.prior, 0.5), 30.0);
        CHECK(sol.objective == doctest::Approx(base.objective).epsilon(1e-9));
    }
}

TEST_CASE("budget gate") {
    Rng rng(61);
    const auto inst = make_micro(rng);
    ExactSolveOptions opts;
    opts.max_option_slots = 1;
    CHECK_THROWS_AS(solve_exact(assemble(inst.pc, inst.prior, 0.5), 10.0, opts), BudgetExceeded);
}

TEST_CASE("exact solver refuses the literal sign convention") {
    Rng rng(67);
    const auto inst = make_micro(rng);
    AssembleOptions opts;
    opts.literal_signs = true;
    const auto model = assemble(inst.pc, inst.prior, 0.5, nullptr, opts);
    CHECK_THROWS_AS(solve_exact(model, 10.0), ValidationError);
}

TEST_CASE("slack pressure is monotone in lambda") {
    Rng rng(71);
    for (int trial = 0; trial < 6; ++trial) {
        auto inst = make_micro(rng);
        // All-ones overlap probabilities isolate the slack pressure.
        const auto prior = OverlapPrior::ones(inst.x.num_vertices(), inst.y.num_vertices());
        int prev_slacks = INT32_MAX;
        int prev_matched_edges = -1;
        for (const double lambda : {0.0, 0.3, 0.5, 1.0, 2.0}) {
            const auto model = assemble(inst.pc, prior, lambda);
            const auto sol = solve_exact(model, 30.0);
            REQUIRE(sol.status == SolveStatus::Optimal);
            int slacks = 0;
            for (int i = model.num_x; i < model.num_vars(); ++i) slacks += sol.assignment[i];
            int matched_edges = 0;
            for (int j = 0; j < model.num_sinj; ++j)
                matched_edges += 1 - sol.assignment[model.sinj_index(j)];
            CHECK(slacks <= prev_slacks);
            CHECK(matched_edges >= prev_matched_edges);
            prev_slacks = slacks;
            prev_matched_edges = matched_edges;
        }
    }
}

TEST_CASE("LP export is deterministic and omits pruned names") {
    Rng rng(73);
    const auto inst = make_micro(rng);
    const auto model = assemble(inst.pc, inst.prior, 0.5);
    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = (dir / "ppm_m1.lp").string();
    const auto p2 = (dir / "ppm_m2.lp").string();
    export_lp(model, p1);
    export_lp(model, p2);
    CHECK(read_file(p1) == read_file(p2));

    // Identity-only allowed pairs prune most variables.
    AllowedSet allowed(inst.x.num_vertices(), inst.y.num_vertices(), inst.y.num_vertices());
    for (int v = 0; v < std::min(inst.x.num_vertices(), inst.y.num_vertices()); ++v) {
        allowed.add_x_reach(v, v);
        allowed.add_y_reach(v, v);
    }
    const auto pruned = assemble(inst.pc, inst.prior, 0.5, &allowed);
    const auto p3 = (dir / "ppm_m3.lp").string();
    export_lp(pruned, p3);
    const auto text = read_file(p3);
    int dead = -1;
    for (int k = 0; k < pruned.num_x; ++k)
        if (pruned.eliminated(k)) dead = k;
    REQUIRE(dead >= 0);
    CHECK(text.find("x_" + std::to_string(dead) + " ") == std::string::npos);
    CHECK(text.find("x_" + std::to_string(dead) + "\n") == std::string::npos);
}

TEST_CASE("solution file round trip") {
    Rng rng(79);
    const auto inst = make_micro(rng);
    const auto model = assemble(inst.pc, inst.prior, 0.5);
    const auto sol = solve_exact(model, 30.0);
    const auto path = (std::filesystem::temp_directory_path() / "ppm_sol.txt").string();
    write_solution_file(model, sol.assignment, sol.status, path);
    const auto parsed = read_solution_file(model, path);
    CHECK(parsed.assignment == sol.assignment);
    CHECK(parsed.has_status);
    CHECK(parsed.status == SolveStatus::Optimal);
    CHECK(assignment_objective(model, parsed.assignment) == doctest::Approx(sol.objective));
}

TEST_CASE("external solver matches the exact one") {
    Rng rng(83);
    for (int trial = 0; trial < 3; ++trial) {
        const auto inst = make_micro(rng);
        const auto model = assemble(inst.pc, inst.prior, inst.lambda);
        const auto exact = solve_exact(model, 30.0);
        const auto external = solve_external(model, adapter_command(), 60.0);
        REQUIRE(external.status == SolveStatus::Optimal);
        CHECK(external.objective == doctest::Approx(exact.objective).epsilon(1e-6));
        CHECK(validate_assignment(model, external.assignment).feasible());
    }
}

TEST_CASE("external solver reports infeasibility") {
    // Hand-built contradiction: x_0 = 1 and x_0 = 0.
    IlpModel model;
    model.num_x = 1;
    model.objective = {1.0};
    model.fixed_zero = {0};
    ConstraintRow r1;
    r1.terms = {{0, 1.0}};
    r1.rhs = 1.0;
    ConstraintRow r2;
    r2.terms = {{0, 1.0}};
    r2.rhs = 0.0;
    model.rows = {r1, r2};
    const auto sol = solve_external(model, adapter_command(), 30.0);
    CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("external solver launch failures surface as errors") {
    IlpModel model;
    model.num_x = 1;
    model.objective = {1.0};
    model.fixed_zero = {0};
    CHECK_THROWS_AS(solve_external(model, "definitely_not_a_solver_9f3 {model} {solution}", 5.0),
                    SolverLaunchError);
    CHECK_THROWS_AS(solve_external(model, "", 5.0), SolverLaunchError);
}

TEST_CASE("pruning soundness on a micro instance") {
    Rng rng(89);
    const auto inst = make_micro(rng);
    const auto unpruned = solve_exact(assemble(inst.pc, inst.prior, 0.5), 30.0);

    // An all-pairs allowed set keeps the optimum intact.
    AllowedSet all(inst.x.num_vertices(), inst.y.num_vertices(), 1);
    for (int x = 0; x < inst.x.num_vertices(); ++x) all.add_x_reach(x, 0);
    for (int y = 0; y < inst.y.num_vertices(); ++y) all.add_y_reach(y, 0);
    const auto full = solve_exact(assemble(inst.pc, inst.prior, 0.5, &all), 30.0);
    CHECK(full.objective == doctest::Approx(unpruned.objective).epsilon(1e-9));

    // Restricting pairs can only raise the objective.
    AllowedSet some(inst.x.num_vertices(), inst.y.num_vertices(), 1);
    some.add_x_reach(0, 0);
    some.add_y_reach(0, 0);
    const auto restricted = solve_exact(assemble(inst.pc, inst.prior, 0.5, &some), 30.0);
    CHECK(restricted.objective >= unpruned.objective - 1e-9);
}
