#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <deepc/harness.hpp>
#include <deepc/mpc.hpp>
#include <deepc/robustctl.hpp>

#include "doctest.h"

using namespace deepc;

namespace {

SystemModel di() { return SystemModel::preset("double_integrator"); }

CollectResult small_data(std::uint64_t seed, int N, double noise_std, int T_ini = 2, int T_f = 4,
                         int K = 8) {
    int T = (T_ini + T_f) * K;
    NoiseSpec noise = noise_std > 0 ? NoiseSpec::gaussian(noise_std, 1, seed + 100) : NoiseSpec::none();
    return collect_data(di(), noise, {seed, 1.0}, T, N, T_ini, T_f, MatrixStructure::Page);
}

CostSpec tracking_cost(int T_ini, int T_f) {
    CostSpec cost;
    cost.f1 = {CostTerm::tracking_norm2(0.1, Vector::Zero(T_f))};
    cost.f2 = {CostTerm::tracking_norm2(10.0, Vector::Constant(T_f, 1.0))};
    cost.f3 = {CostTerm::tracking_norm2(50.0, Vector::Zero(T_ini))};
    return cost;
}

ConstraintSpec input_box(int T_f, double bound) {
    ConstraintSpec cons;
    cons.u_lower = Vector::Constant(T_f, -bound);
    cons.u_upper = Vector::Constant(T_f, bound);
    return cons;
}

}  // namespace

TEST_CASE("a recorded trajectory is optimal for the feasibility-only program") {
    auto data = small_data(3, 1, 0.0);
    const auto& blocks = data.blocks;
    // initial window taken from a recorded column: g = e_2 is feasible with cost 0
    Vector u_ini = blocks.Up.col(2);
    Vector y_ini = blocks.Yp[0].col(2);
    auto prog = assemble_deterministic(blocks, CostSpec{}, ConstraintSpec{}, u_ini, y_ini);
    SolveResult r = solve(prog.program);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("deterministic program matches the model-based solution") {
    int T_ini = 2, T_f = 5;
    auto data = small_data(5, 1, 0.0, T_ini, T_f, 12);
    CostSpec cost;
    cost.f1 = {CostTerm::sq_norm2(0.1, Matrix::Identity(T_f, T_f), Vector::Zero(T_f))};
    cost.f2 = {CostTerm::tracking_sq(1.0, Vector::Constant(T_f, 1.0))};
    ConstraintSpec cons = input_box(T_f, 0.4);

    // drive the plant to a generic window
    Signal u_pre = Signal::scalar({0.2, -0.1, 0.3, 0.1});
    Signal y_pre = simulate(di(), Vector::Zero(2), u_pre);
    Signal u_ini = u_pre.segment(2, T_ini), y_ini = y_pre.segment(2, T_ini);
    Vector x_now = initial_state_from_data(di(), u_ini, y_ini);
    for (int t = 0; t < T_ini; ++t) x_now = di().A * x_now + di().B * u_ini.sample(t);

    auto prog = assemble_deterministic(data.blocks, cost, cons, u_ini.stacked(), y_ini.stacked());
    SolveResult raw = solve(prog.program);
    REQUIRE(raw.status == SolveStatus::Optimal);
    RobustSolution sol = extract_solution(prog, raw, data.blocks);
    MpcSolution mpc = mpc_solve(di(), x_now, cost, cons, T_f);
    CHECK((sol.u_star.stacked() - mpc.u.stacked()).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("an initial window off the data span is infeasible") {
    // only 3 columns: the 4 equality rows generically overdetermine g
    auto data = small_data(7, 1, 0.0, 2, 4, 3);
    Vector u_ini = Vector::Zero(2);
    Vector y_ini(2);
    y_ini << 5.0, -7.0;
    auto prog = assemble_deterministic(data.blocks, CostSpec{}, ConstraintSpec{}, u_ini, y_ini);
    SolveResult r = solve(prog.program);
    CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("robust variable and row census") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(9, 3, 0.05, T_ini, T_f, 10);
    const auto& blocks = data.blocks;
    REQUIRE(blocks.K == 10);
    REQUIRE(blocks.N == 3);
    CostSpec cost = tracking_cost(T_ini, T_f);
    ConstraintSpec cons = input_box(T_f, 2.0);
    cons.output = OutputBox{Vector::Constant(T_f, -1.0), Vector::Constant(T_f, 1.0)};
    cons.alpha = 0.1;
    AmbiguitySpec spec;
    spec.epsilon = 0.01;
    spec.r = NormIndex::Two;
    auto prog = assemble_robust(blocks, cost, cons, spec, Vector::Zero(T_ini), Vector::Zero(T_ini));

    int norm_terms = 1 + 3 * 2;  // f1 once, f2/f3 per batch
    CHECK(prog.program.var_count == 10 + 1 + 3 + norm_terms + 1);  // g, tau, s, epigraphs, ||g||_q
    CHECK(prog.program.eq_rows() == 1 * T_ini);                    // m * T_ini
    CHECK(prog.map.K == 10);
    CHECK(prog.map.tau >= 0);
    CHECK(prog.map.s_count == 3);

    // nonneg rows: input box (2 m T_f) + master (1) + s >= 0 (N) + pieces (N * 2 p T_f)
    int nonneg = 0;
    for (const auto& blk : prog.program.cone_rows)
        if (blk.cone == ConeType::Nonneg) nonneg += static_cast<int>(blk.A.rows());
    CHECK(nonneg == 2 * T_f + 1 + 3 + 3 * 2 * T_f);

    int soc_blocks = 0;
    for (const auto& blk : prog.program.cone_rows)
        if (blk.cone == ConeType::SecondOrder) ++soc_blocks;
    CHECK(soc_blocks == norm_terms + 1);
}

TEST_CASE("zero radius with one batch collapses to the regularizer-free program") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(11, 1, 0.0, T_ini, T_f);
    CostSpec cost = tracking_cost(T_ini, T_f);
    AmbiguitySpec spec;  // epsilon = 0
    auto prog = assemble_robust(data.blocks, cost, input_box(T_f, 2.0), spec, Vector::Zero(T_ini),
                                Vector::Zero(T_ini));
    // no dual-norm epigraph and no CVaR machinery without an output constraint
    CHECK(prog.map.tau == -1);
    CHECK(prog.program.var_count == data.blocks.K + 3);  // g plus one epigraph per norm term
    SolveResult r = solve(prog.program);
    CHECK(r.status == SolveStatus::Optimal);
}

TEST_CASE("squared terms are rejected in robust mode") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(13, 2, 0.05);
    CostSpec cost;
    cost.f2 = {CostTerm::tracking_sq(1.0, Vector::Zero(T_f))};
    AmbiguitySpec spec;
    spec.epsilon = 0.01;
    CHECK_THROWS_AS(assemble_robust(data.blocks, cost, input_box(T_f, 2.0), spec,
                                    Vector::Zero(T_ini), Vector::Zero(T_ini)),
                    SquaredTermInRobustMode);
}

TEST_CASE("case-study-scale configuration assembles and solves") {
    auto sys = SystemModel::preset("quad_lin");
    int T_ini = 6, T_f = 25, K = 40, T = (T_ini + T_f) * K;
    auto data = collect_data(sys, NoiseSpec::gaussian(0.01, sys.p, 7), {3, 0.5}, T, 1, T_ini, T_f,
                             MatrixStructure::Page);
    CostSpec cost;
    cost.f1 = {CostTerm::tracking_norm2(16.0, Vector::Zero(sys.m * T_f)),
               CostTerm::tracking_norm2(4.0, Vector::Zero(sys.m * T_f))};
    cost.f2 = {CostTerm::tracking_norm2(1600.0, Vector::Constant(sys.p * T_f, 1.0))};
    cost.f3 = {CostTerm::tracking_norm2(750000.0, Vector::Zero(sys.p * T_ini))};
    ConstraintSpec cons;
    cons.u_lower = Vector::Constant(sys.m * T_f, -5.0);
    cons.u_upper = Vector::Constant(sys.m * T_f, 5.0);
    cons.output = OutputBox{Vector::Constant(sys.p * T_f, -0.6), Vector::Constant(sys.p * T_f, 1.6)};
    cons.alpha = 0.1;
    AmbiguitySpec spec;
    spec.epsilon = 0.003;
    spec.alpha = 0.1;
    spec.r = NormIndex::Two;
    auto prog = assemble_robust(data.blocks, cost, cons, spec, Vector::Zero(sys.m * T_ini),
                                Vector::Zero(sys.p * T_ini));
    SolveResult r = solve(prog.program);
    CHECK(r.status == SolveStatus::Optimal);
}

TEST_CASE("piecewise affine variant with unrestricted support matches the box form") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(17, 3, 0.05);
    CostSpec cost = tracking_cost(T_ini, T_f);
    ConstraintSpec box_cons = input_box(T_f, 3.0);
    Vector lb = Vector::Constant(T_f, -0.8), ub = Vector::Constant(T_f, 0.8);
    box_cons.output = OutputBox{lb, ub};
    box_cons.alpha = 0.1;

    ConstraintSpec pw_cons = input_box(T_f, 3.0);
    pw_cons.alpha = 0.1;
    PiecewiseAffineOutput pw;
    int xi_dim = data.blocks.p * (T_ini + T_f) * data.blocks.K;
    pw.F = Matrix(0, xi_dim);
    pw.d = Vector(0);
    for (int j = 0; j < T_f; ++j) {
        Vector a = Vector::Zero(T_f);
        a(j) = 1.0;
        pw.pieces.push_back({a, -ub(j)});
        Vector b = Vector::Zero(T_f);
        b(j) = -1.0;
        pw.pieces.push_back({b, lb(j)});
    }
    pw_cons.output = pw;

    AmbiguitySpec spec;
    spec.epsilon = 0.01;
    spec.alpha = 0.1;
    spec.r = NormIndex::Two;
    Vector u_ini = Vector::Zero(T_ini), y_ini = Vector::Zero(T_ini);
    auto pa = assemble_robust(data.blocks, cost, box_cons, spec, u_ini, y_ini);
    auto pb = assemble_robust_affine(data.blocks, cost, pw_cons, spec, u_ini, y_ini);
    SolveResult ra = solve(pa.program), rb = solve(pb.program);
    REQUIRE(ra.status == SolveStatus::Optimal);
    REQUIRE(rb.status == SolveStatus::Optimal);
    CHECK(std::abs(ra.objective - rb.objective) < 1e-6);
}

TEST_CASE("zero radius enforces the empirical cvar constraint") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(19, 3, 0.05);
    CostSpec cost = tracking_cost(T_ini, T_f);
    ConstraintSpec cons = input_box(T_f, 3.0);
    cons.output = OutputBox{Vector::Constant(T_f, -100.0), Vector::Constant(T_f, 0.3)};
    cons.alpha = 0.1;
    AmbiguitySpec spec;  // epsilon = 0
    spec.alpha = 0.1;
    auto prog = assemble_robust(data.blocks, cost, cons, spec, Vector::Zero(T_ini),
                                Vector::Zero(T_ini));
    SolveResult r = solve(prog.program);
    REQUIRE(r.status == SolveStatus::Optimal);
    RobustSolution sol = extract_solution(prog, r, data.blocks);
    const auto& box = std::get<OutputBox>(cons.output);
    Vector h(3);
    for (int i = 0; i < 3; ++i) h(i) = box.h(data.blocks.Yf[i] * sol.g_star);
    CHECK(cvar(h, Vector::Constant(3, 1.0 / 3.0), cons.alpha) <= 1e-6);
}

TEST_CASE("a single very slack piece leaves the optimum unconstrained") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(23, 2, 0.05);
    CostSpec cost = tracking_cost(T_ini, T_f);
    ConstraintSpec pw_cons = input_box(T_f, 3.0);
    PiecewiseAffineOutput pw;
    int xi_dim = data.blocks.p * (T_ini + T_f) * data.blocks.K;
    pw.F = Matrix(0, xi_dim);
    pw.d = Vector(0);
    Vector a = Vector::Zero(T_f);
    a(0) = 1.0;
    pw.pieces.push_back({a, -1e6});  // effectively h = y_1 - 1e6 <= 0, never active
    pw_cons.output = pw;
    AmbiguitySpec spec;
    spec.epsilon = 0.01;
    spec.r = NormIndex::Two;

    ConstraintSpec free_cons = input_box(T_f, 3.0);
    Vector u_ini = Vector::Zero(T_ini), y_ini = Vector::Zero(T_ini);
    auto constrained = assemble_robust_affine(data.blocks, cost, pw_cons, spec, u_ini, y_ini);
    auto unconstrained = assemble_robust(data.blocks, cost, free_cons, spec, u_ini, y_ini);
    SolveResult rc = solve(constrained.program), ru = solve(unconstrained.program);
    REQUIRE(rc.status == SolveStatus::Optimal);
    REQUIRE(ru.status == SolveStatus::Optimal);
    CHECK(std::abs(rc.objective - ru.objective) < 1e-6);
}

TEST_CASE("empty support polyhedron is rejected") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(29, 1, 0.05);
    CostSpec cost = tracking_cost(T_ini, T_f);
    ConstraintSpec cons = input_box(T_f, 3.0);
    PiecewiseAffineOutput pw;
    int xi_dim = data.blocks.p * (T_ini + T_f) * data.blocks.K;
    pw.F = Matrix::Zero(2, xi_dim);
    pw.F(0, 0) = 1.0;
    pw.F(1, 0) = -1.0;
    pw.d = Vector(2);
    pw.d << -1.0, -1.0;  // xi_1 <= -1 and xi_1 >= 1
    Vector a = Vector::Zero(T_f);
    a(0) = 1.0;
    pw.pieces.push_back({a, 0.0});
    cons.output = pw;
    AmbiguitySpec spec;
    CHECK_THROWS_AS(assemble_robust_affine(data.blocks, cost, cons, spec, Vector::Zero(T_ini),
                                           Vector::Zero(T_ini)),
                    EmptySupport);
}

TEST_CASE("solution extraction round trip") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(31, 3, 0.05);
    CostSpec cost = tracking_cost(T_ini, T_f);
    AmbiguitySpec spec;
    spec.epsilon = 0.05;
    spec.r = NormIndex::Two;
    Vector y_ini = Vector::Zero(T_ini);
    auto prog = assemble_robust(data.blocks, cost, input_box(T_f, 3.0), spec, Vector::Zero(T_ini),
                                y_ini);
    SolveResult r = solve(prog.program);
    REQUIRE(r.status == SolveStatus::Optimal);
    RobustSolution sol = extract_solution(prog, r, data.blocks);
    CHECK(sol.u_star.stacked().size() == T_f);
    CHECK((sol.u_star.stacked() - data.blocks.Uf * sol.g_star).norm() == 0.0);
    CHECK(sol.y_pred.size() == 3);
    double recomputed = evaluate_robust_objective(data.blocks, cost, spec, y_ini, sol.g_star);
    CHECK(std::abs(sol.objective - recomputed) <= 1e-6 * (1.0 + std::abs(recomputed)));
}

TEST_CASE("optimal value grows with the radius") {
    int T_ini = 2, T_f = 4;
    auto data = small_data(37, 3, 0.05);
    CostSpec cost = tracking_cost(T_ini, T_f);
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps : {0.0, 0.01, 0.05, 0.2, 1.0}) {
        AmbiguitySpec spec;
        spec.epsilon = eps;
        spec.r = NormIndex::Two;
        auto prog = assemble_robust(data.blocks, cost, input_box(T_f, 3.0), spec,
                                    Vector::Zero(T_ini), Vector::Zero(T_ini));
        SolveResult r = solve(prog.program);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective >= prev - 1e-7);
        prev = r.objective;
    }
}

TEST_CASE("robust objective upper-bounds the oracle value at the optimizer") {
    int T_ini = 1, T_f = 2;
    auto data = small_data(41, 3, 0.05, T_ini, T_f, 2);
    CostSpec cost;
    cost.f2 = {CostTerm::tracking_norm2(2.0, Vector::Constant(T_f, 1.0))};
    cost.f3 = {CostTerm::tracking_norm2(3.0, Vector::Zero(T_ini))};
    AmbiguitySpec spec;
    spec.epsilon = 0.1;
    spec.r = NormIndex::Two;
    Vector y_ini = Vector::Zero(T_ini);
    auto prog = assemble_robust(data.blocks, cost, ConstraintSpec{}, spec, Vector::Zero(T_ini),
                                y_ini);
    SolveResult r = solve(prog.program);
    REQUIRE(r.status == SolveStatus::Optimal);
    RobustSolution sol = extract_solution(prog, r, data.blocks);

    Matrix samples(data.blocks.p * (T_ini + T_f) * data.blocks.K, 3);
    for (int i = 0; i < 3; ++i) samples.col(i) = data.blocks.xi_sample(i);
    auto P = EmpiricalDistribution::uniform(samples, spec.r);
    const int past = T_ini;
    SliceFunction phi;
    phi.value = [&, past](const Vector& v) {
        Vector vp = v.head(past), vf = v.tail(v.size() - past);
        return cost.evaluate(Vector::Zero(0), vf, vp - y_ini);
    };
    phi.lipschitz = cost.objective_lipschitz(spec.r);
    double oracle = worst_case_expectation_oracle(P, phi, sol.g_star, spec.epsilon);
    CHECK(sol.objective >= oracle - 0.01 * (1.0 + std::abs(oracle)));
}
