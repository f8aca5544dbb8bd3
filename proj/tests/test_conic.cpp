#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <deepc/conic.hpp>

#include <sstream>

#include "doctest.h"

using namespace deepc;

namespace {

ConicProgram empty_program(int vars) {
    ConicProgram p;
    p.var_count = vars;
    p.q = Vector::Zero(vars);
    p.Aeq = Matrix(0, vars);
    p.beq = Vector(0);
    return p;
}

}  // namespace

TEST_CASE("scalar lower-bounded linear program") {
    ConicProgram p = empty_program(1);
    p.q(0) = 1.0;
    p.add_nonneg(-Matrix::Identity(1, 1), -Vector::Ones(1));  // x >= 1
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("minimum norm point on a hyperplane") {
    ConicProgram p = empty_program(3);  // x in R^2, t epigraph
    p.q(2) = 1.0;
    p.Aeq = Matrix(1, 3);
    p.Aeq << 3, 4, 0;
    p.beq = Vector::Constant(1, 5.0);
    Matrix A = Matrix::Zero(3, 3);
    A(0, 2) = -1.0;
    A(1, 0) = -1.0;
    A(2, 1) = -1.0;
    p.add_soc(A, Vector::Zero(3));  // t >= ||x||_2
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x(0) == doctest::Approx(0.6).epsilon(1e-5));
    CHECK(r.x(1) == doctest::Approx(0.8).epsilon(1e-5));
}

TEST_CASE("scalar quadratic with linear term") {
    ConicProgram p = empty_program(1);
    p.P = Matrix::Constant(1, 1, 2.0);  // x^2
    p.q(0) = -2.0;
    SolveResult r = solve(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("contradictory bounds are reported infeasible") {
    ConicProgram p = empty_program(1);
    Matrix A(2, 1);
    A << 1, -1;  // x <= 0 and x >= 1
    Vector b(2);
    b << 0, -1;
    p.add_nonneg(A, b);
    SolveResult r = solve(p);
    CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("descent direction without a floor is unbounded") {
    ConicProgram p = empty_program(1);
    p.q(0) = 1.0;
    p.add_nonneg(Matrix::Identity(1, 1), Vector::Zero(1));  // x <= 0
    SolveResult r = solve(p);
    CHECK(r.status == SolveStatus::Unbounded);
}

TEST_CASE("residuals at an analytic optimum are tiny") {
    ConicProgram p = empty_program(1);
    p.q(0) = 1.0;
    p.add_nonneg(-Matrix::Identity(1, 1), -Vector::Ones(1));
    // optimal x = 1, active-row multiplier 1
    Vector x = Vector::Ones(1), y = Vector::Ones(1);
    ResidualTriple res = residuals(p, x, y);
    CHECK(res.primal <= 1e-9);
    CHECK(res.dual <= 1e-9);
    CHECK(res.gap <= 1e-9);
}

TEST_CASE("equality violation shows up in the primal residual") {
    ConicProgram p = empty_program(1);
    p.Aeq = Matrix::Identity(1, 1);
    p.beq = Vector::Ones(1);
    double delta = 1e-3;
    ResidualTriple res = residuals(p, Vector::Constant(1, 1.0 + delta), Vector::Zero(1));
    CHECK(res.primal >= delta / 10);
}

TEST_CASE("the all-zero problem has zero residuals") {
    ConicProgram p = empty_program(2);
    ResidualTriple res = residuals(p, Vector::Zero(2), Vector::Zero(0));
    CHECK(res.primal == 0.0);
    CHECK(res.dual == 0.0);
    CHECK(res.gap == 0.0);
}

TEST_CASE("solves are deterministic for fixed settings") {
    ConicProgram p = empty_program(3);
    p.P = Matrix::Identity(3, 3) * 2.0;
    p.q << -1, 2, 0.5;
    Matrix A(2, 3);
    A << 1, 1, 0, 0, -1, 1;
    Vector b(2);
    b << 1, 0.5;
    p.add_nonneg(A, b);
    SolveResult a = solve(p), c = solve(p);
    CHECK(a.x == c.x);
    CHECK(a.iterations == c.iterations);
}

TEST_CASE("optimal results pass an independent residual check") {
    // random box QPs with diagonal curvature; optimum is known coordinatewise
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + trial % 4;
        ConicProgram p = empty_program(n);
        p.P = Matrix::Zero(n, n);
        Vector lo(n), hi(n), expect(n);
        for (int j = 0; j < n; ++j) {
            double d = 1.0 + ((trial * 7 + j * 3) % 5);
            double target = -2.0 + 0.9 * ((trial * 5 + j) % 5);
            p.P(j, j) = d;
            p.q(j) = -d * target;
            lo(j) = -1.0;
            hi(j) = 1.0;
            expect(j) = std::clamp(target, lo(j), hi(j));
        }
        Matrix A(2 * n, n);
        Vector b(2 * n);
        A.topRows(n) = Matrix::Identity(n, n);
        A.bottomRows(n) = -Matrix::Identity(n, n);
        b.head(n) = hi;
        b.tail(n) = -lo;
        p.add_nonneg(A, b);
        SolveResult r = solve(p);
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK((r.x - expect).lpNorm<Eigen::Infinity>() < 1e-6);
        ResidualTriple res = residuals(p, r.x, r.y);
        CHECK(res.primal <= 1e-6);
        CHECK(res.dual <= 1e-6);
        CHECK(res.gap <= 1e-6);
    }
}

TEST_CASE("validate rejects inconsistent dimensions") {
    ConicProgram p = empty_program(2);
    p.q = Vector::Zero(3);
    CHECK_THROWS_AS(p.validate(), DimensionMismatch);
}

TEST_CASE("dump emits the triplet text format") {
    ConicProgram p = empty_program(2);
    p.P = Matrix::Identity(2, 2);
    p.q << 1, -1;
    p.add_nonneg(Matrix::Identity(2, 2), Vector::Ones(2));
    std::stringstream ss;
    p.dump(ss);
    std::string text = ss.str();
    CHECK(text.find("vars 2") != std::string::npos);
    CHECK(text.find("nonneg") != std::string::npos);
}
