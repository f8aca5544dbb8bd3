#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <deepc/mpc.hpp>
#include <deepc/plant.hpp>

#include "doctest.h"

using namespace deepc;

namespace {

Signal random_signal(std::uint64_t seed, int dim, int T) {
    Matrix m(dim, T);
    for (int t = 0; t < T; ++t)
        for (int c = 0; c < dim; ++c)
            m(c, t) = gaussian_draw(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(c));
    return Signal(std::move(m));
}

SystemModel scalar_integrator() {
    return SystemModel::make(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                             Matrix::Zero(1, 1));
}

SystemModel double_chain() {
    Matrix A(2, 2), B(2, 1), C(1, 2);
    A << 1, 1, 0, 1;
    B << 0, 1;
    C << 1, 0;
    return SystemModel::make(A, B, C, Matrix::Zero(1, 1));
}

}  // namespace

TEST_CASE("pure feedthrough reproduces the input") {
    SystemModel sys = SystemModel::make(Matrix::Zero(2, 2), Matrix::Zero(2, 2),
                                        Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    Signal u = random_signal(3, 2, 7);
    Signal y = simulate(sys, Vector::Zero(2), u);
    CHECK((y.samples() - u.samples()).norm() == 0.0);
}

TEST_CASE("scalar integrator accumulates inputs") {
    Signal y = simulate(scalar_integrator(), Vector::Zero(1), Signal::scalar({1, 1, 1}));
    CHECK(y.sample(0)(0) == 0.0);
    CHECK(y.sample(1)(0) == 1.0);
    CHECK(y.sample(2)(0) == 2.0);
}

TEST_CASE("noisy simulation is bitwise reproducible per seed") {
    SystemModel sys = double_chain();
    Signal u = random_signal(5, 1, 20);
    NoiseSpec noise = NoiseSpec::gaussian(0.3, 1, 77);
    Signal a = simulate(sys, Vector::Zero(2), u, noise);
    Signal b = simulate(sys, Vector::Zero(2), u, noise);
    CHECK(a.samples() == b.samples());
    Signal c = simulate(sys, Vector::Zero(2), u, NoiseSpec::gaussian(0.3, 1, 78));
    CHECK(a.samples() != c.samples());
}

TEST_CASE("lag of full state output is one") {
    SystemModel sys = SystemModel::make(Matrix::Random(3, 3), Matrix::Random(3, 1),
                                        Matrix::Identity(3, 3), Matrix::Zero(3, 1));
    CHECK(lag(sys) == 1);
}

TEST_CASE("lag of an integrator chain observed at the head is two") {
    CHECK(lag(double_chain()) == 2);
}

TEST_CASE("zero output map is unobservable") {
    SystemModel sys = SystemModel::make(Matrix::Identity(2, 2), Matrix::Ones(2, 1),
                                        Matrix::Zero(1, 2), Matrix::Zero(1, 1));
    CHECK_THROWS_AS(lag(sys), Unobservable);
}

TEST_CASE("impulse toeplitz blocks") {
    SystemModel sys = double_chain();
    CHECK(toeplitz_impulse(sys, 1) == sys.D);

    Matrix t2 = toeplitz_impulse(sys, 2);
    CHECK(t2.rows() == 2);
    CHECK(t2.cols() == 2);
    CHECK(t2(0, 0) == sys.D(0, 0));
    CHECK(t2(0, 1) == 0.0);
    CHECK(t2(1, 0) == (sys.C * sys.B)(0, 0));
    CHECK(t2(1, 1) == sys.D(0, 0));

    SystemModel hollow = SystemModel::make(Matrix::Identity(2, 2), Matrix::Zero(2, 1),
                                           Matrix::Ones(1, 2), Matrix::Zero(1, 1));
    CHECK(toeplitz_impulse(hollow, 3).norm() == 0.0);
}

TEST_CASE("controllability verdicts") {
    CHECK(is_controllable(SystemModel::make(Matrix::Zero(2, 2), Matrix::Identity(2, 2),
                                            Matrix::Identity(2, 2), Matrix::Zero(2, 2))));
    CHECK_FALSE(is_controllable(SystemModel::make(Matrix::Identity(2, 2), Matrix::Zero(2, 1),
                                                  Matrix::Ones(1, 2), Matrix::Zero(1, 1))));
    CHECK(is_controllable(double_chain()));
}

TEST_CASE("initial state reconstruction round trip") {
    SystemModel sys = double_chain();
    Vector x0(2);
    x0 << 0.7, -1.3;
    Signal u = random_signal(9, 1, 4);
    Signal y = simulate(sys, x0, u);
    double residual = -1.0;
    Vector x = initial_state_from_data(sys, u, y, &residual);
    CHECK((x - x0).norm() < 1e-9);
    CHECK(residual < 1e-10);
}

TEST_CASE("full state output with one step reads the state directly") {
    SystemModel sys = SystemModel::make(Matrix::Random(2, 2), Matrix::Random(2, 1),
                                        Matrix::Identity(2, 2), Matrix::Zero(2, 1));
    Vector x0(2);
    x0 << 2.0, -0.5;
    Signal u = Signal::zeros(1, 1);
    Signal y = simulate(sys, x0, u);
    Vector x = initial_state_from_data(sys, u, y);
    CHECK((x - x0).norm() < 1e-12);
}

TEST_CASE("inconsistent window yields a positive residual") {
    SystemModel sys = double_chain();
    Signal u = random_signal(11, 1, 4);
    Signal y = simulate(sys, Vector::Zero(2), u, NoiseSpec::gaussian(0.2, 1, 13));
    double residual = 0.0;
    initial_state_from_data(sys, u, y, &residual);
    CHECK(residual > 1e-6);
}

TEST_CASE("simulation is linear in state and input without noise") {
    SystemModel sys = double_chain();
    Signal u1 = random_signal(15, 1, 10), u2 = random_signal(16, 1, 10);
    Vector x1(2), x2(2);
    x1 << 1, -1;
    x2 << 0.2, 0.9;
    double a = 1.7, b = -0.4;
    Signal mix(a * u1.samples() + b * u2.samples());
    Signal ya = simulate(sys, x1, u1), yb = simulate(sys, x2, u2);
    Signal ymix = simulate(sys, Vector(a * x1 + b * x2), mix);
    CHECK((ymix.samples() - a * ya.samples() - b * yb.samples()).norm() < 1e-10);
}

TEST_CASE("observability and toeplitz matrices reproduce the simulated output") {
    SystemModel sys = double_chain();
    int T_f = 6;
    Vector x0(2);
    x0 << -0.3, 0.8;
    Signal u = random_signal(17, 1, T_f);
    Signal y = simulate(sys, x0, u);
    Vector predicted = observability_matrix(sys, T_f) * x0 + toeplitz_impulse(sys, T_f) * u.stacked();
    CHECK((predicted - y.stacked()).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("unconstrained tracking matches the least squares optimum") {
    SystemModel sys = scalar_integrator();
    int T_f = 4;
    Vector x0 = Vector::Zero(1);
    CostSpec cost;
    cost.f1 = {CostTerm::sq_norm2(0.5, Matrix::Identity(T_f, T_f), Vector::Zero(T_f))};
    cost.f2 = {CostTerm::tracking_sq(1.0, Vector::Constant(T_f, 2.0))};
    MpcSolution sol = mpc_solve(sys, x0, cost, ConstraintSpec{}, T_f);
    REQUIRE(sol.status == SolveStatus::Optimal);

    // direct normal-equations solve of min 0.5||u||^2 + ||O x0 + T u - ref||^2
    Matrix T_mat = toeplitz_impulse(sys, T_f);
    Vector ref = Vector::Constant(T_f, 2.0);
    Matrix H = 0.5 * Matrix::Identity(T_f, T_f) + T_mat.transpose() * T_mat;
    Vector u_direct = H.ldlt().solve(T_mat.transpose() * ref);
    double obj_direct = 0.5 * u_direct.squaredNorm() + (T_mat * u_direct - ref).squaredNorm();
    CHECK((sol.u.stacked() - u_direct).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(sol.objective == doctest::Approx(obj_direct).epsilon(1e-7));
}

TEST_CASE("impossible output box reports infeasibility") {
    // no input authority: the free response is forced, the box excludes it
    SystemModel sys = SystemModel::make(Matrix::Ones(1, 1), Matrix::Zero(1, 1),
                                        Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    Vector x0 = Vector::Ones(1);
    ConstraintSpec cons;
    cons.output = OutputBox{Vector::Constant(2, 2.0), Vector::Constant(2, 3.0)};
    CostSpec cost;
    cost.f2 = {CostTerm::tracking_sq(1.0, Vector::Zero(2))};
    CHECK_THROWS_AS(mpc_solve(sys, x0, cost, cons, 2), Infeasible);
}

TEST_CASE("zero cost solves to zero objective") {
    MpcSolution sol = mpc_solve(scalar_integrator(), Vector::Zero(1), CostSpec{}, ConstraintSpec{}, 3);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("presets expose the advertised shapes") {
    SystemModel di = SystemModel::preset("double_integrator");
    CHECK(di.n == 2);
    CHECK(di.m == 1);
    CHECK(di.p == 1);
    CHECK(is_controllable(di));
    SystemModel quad = SystemModel::preset("quad_lin");
    CHECK(quad.n == 6);
    CHECK(quad.m == 3);
    CHECK(quad.p == 3);
    CHECK(is_controllable(quad));
}

TEST_CASE("json round trip of a system model") {
    SystemModel sys = double_chain();
    std::string text = R"({"A":[1,1,0,1],"B":[0,1],"C":[1,0],"D":[0],"n":2,"m":1,"p":1})";
    SystemModel loaded = SystemModel::from_json_text(text);
    CHECK((loaded.A - sys.A).norm() == 0.0);
    CHECK((loaded.B - sys.B).norm() == 0.0);
    CHECK((loaded.C - sys.C).norm() == 0.0);
    CHECK(loaded.p == 1);
}
