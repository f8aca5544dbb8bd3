#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <deepc/ambiguity.hpp>
#include <deepc/csv.hpp>
#include <deepc/plant.hpp>

#include <sstream>

#include "doctest.h"

using namespace deepc;

namespace {

EmpiricalDistribution scalar_atoms(std::initializer_list<double> values) {
    Matrix m(1, static_cast<Eigen::Index>(values.size()));
    Eigen::Index j = 0;
    for (double v : values) m(0, j++) = v;
    return EmpiricalDistribution::uniform(m);
}

Matrix random_atoms(std::uint64_t seed, int dim, int count) {
    Matrix m(dim, count);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < dim; ++j)
            m(j, i) = gaussian_draw(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    return m;
}

}  // namespace

TEST_CASE("norms and dual norms") {
    Vector v(2);
    v << 3, -4;
    CHECK(norm_r(v, NormIndex::One) == 7.0);
    CHECK(norm_r(v, NormIndex::Two) == 5.0);
    CHECK(norm_r(v, NormIndex::Inf) == 4.0);
    CHECK(norm_dual(v, NormIndex::One) == 4.0);  // q = inf
    CHECK(norm_dual(v, NormIndex::Two) == 5.0);
    CHECK(norm_dual(v, NormIndex::Inf) == 7.0);  // q = 1
}

TEST_CASE("transport between single atoms is the ground distance") {
    Matrix x(2, 1), y(2, 1);
    x << 1, 2;
    y << 4, 6;
    auto P = EmpiricalDistribution::uniform(x);
    auto Q = EmpiricalDistribution::uniform(y);
    CHECK(wasserstein_distance(P, Q) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("transport from a distribution to itself is zero") {
    auto P = EmpiricalDistribution::uniform(random_atoms(3, 2, 4));
    CHECK(wasserstein_distance(P, P) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("two-atom shifted pair costs one") {
    CHECK(wasserstein_distance(scalar_atoms({0, 1}), scalar_atoms({1, 2})) ==
          doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("transport distance is symmetric and satisfies the triangle inequality") {
    for (int trial = 0; trial < 4; ++trial) {
        auto P = EmpiricalDistribution::uniform(random_atoms(10 + static_cast<std::uint64_t>(trial), 2, 3));
        auto Q = EmpiricalDistribution::uniform(random_atoms(20 + static_cast<std::uint64_t>(trial), 2, 3));
        auto R = EmpiricalDistribution::uniform(random_atoms(30 + static_cast<std::uint64_t>(trial), 2, 3));
        double pq = wasserstein_distance(P, Q);
        double qp = wasserstein_distance(Q, P);
        double qr = wasserstein_distance(Q, R);
        double pr = wasserstein_distance(P, R);
        CHECK(std::abs(pq - qp) < 1e-7);
        CHECK(pr <= pq + qr + 1e-7);
    }
}

TEST_CASE("cvar of a small discrete distribution") {
    Vector v(4), w = Vector::Constant(4, 0.25);
    v << 1, 2, 3, 4;
    CHECK(cvar(v, w, 0.25) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(cvar(v, w, 1.0) == doctest::Approx(2.5).epsilon(1e-12));
    Vector c = Vector::Constant(3, 7.0), wc = Vector::Constant(3, 1.0 / 3.0);
    for (double alpha : {0.1, 0.5, 1.0})
        CHECK(cvar(c, wc, alpha) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("cvar interpolates between mean and max and is monotone in alpha") {
    Vector v(5), w = Vector::Constant(5, 0.2);
    v << -2, 0.5, 1, 3, 9;
    double mean = v.mean();
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {0.15, 0.3, 0.5, 0.8, 1.0}) {
        double c = cvar(v, w, alpha);
        CHECK(c <= prev + 1e-12);
        CHECK(c >= mean - 1e-12);
        CHECK(c <= v.maxCoeff() + 1e-12);
        prev = c;
    }
}

TEST_CASE("radius formula branches reproduce hand-computed values") {
    AmbiguitySpec spec;
    spec.concentration = ConcentrationConstants{1.0, 1.0, 2.0};

    spec.beta = std::exp(-1.0);  // N = 2 at or above threshold log(c1/beta)/c2 = 1
    CHECK(std::abs(epsilon_radius(spec, 2, 5) - std::pow(0.5, 0.2)) <= 1e-10);

    spec.beta = std::exp(-4.0);  // N = 2 below threshold 4
    CHECK(std::abs(epsilon_radius(spec, 2, 5) - std::sqrt(2.0)) <= 1e-10);
}

TEST_CASE("radius branches agree at the threshold") {
    AmbiguitySpec spec;
    spec.concentration = ConcentrationConstants{1.0, 1.0, 2.0};
    spec.beta = std::exp(-3.0);  // log(c1/beta) = c2 * N at N = 3
    CHECK(epsilon_radius(spec, 3, 7) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("radius rejects invalid constants") {
    AmbiguitySpec spec;
    spec.beta = 0.1;
    spec.concentration = ConcentrationConstants{1.0, 1.0, 1.0};  // a must exceed 1
    CHECK_THROWS_AS(epsilon_radius(spec, 2, 3), InvalidConstants);
    spec.concentration = ConcentrationConstants{-1.0, 1.0, 2.0};
    CHECK_THROWS_AS(epsilon_radius(spec, 2, 3), InvalidConstants);
}

TEST_CASE("radius shrinks with more data and grows with confidence") {
    AmbiguitySpec spec;
    spec.beta = 0.05;
    spec.concentration = ConcentrationConstants{2.0, 0.5, 2.0};
    double prev = std::numeric_limits<double>::infinity();
    for (int N = 1; N <= 100; ++N) {
        double v = epsilon_radius(spec, N, 4);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
    AmbiguitySpec tighter = spec;
    tighter.beta = 0.01;
    CHECK(epsilon_radius(tighter, 10, 4) >= epsilon_radius(spec, 10, 4) - 1e-12);
}

TEST_CASE("worst case oracle degenerates to the sample mean at zero radius") {
    auto P = EmpiricalDistribution::uniform(random_atoms(41, 4, 3));
    Vector g(2);
    g << 1.0, -0.5;
    SliceFunction phi{[](const Vector& v) { return v.cwiseAbs().maxCoeff(); }, 1.0};
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
        Vector v(2);
        for (int j = 0; j < 2; ++j) v(j) = P.samples.col(i).segment(2 * j, 2).dot(g);
        expect += phi.value(v) / 3;
    }
    CHECK(worst_case_expectation_oracle(P, phi, g, 0.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("worst case of a coordinate functional has a closed form") {
    auto P = EmpiricalDistribution::uniform(random_atoms(43, 4, 3));
    Vector g(2);
    g << 1.5, -0.7;
    SliceFunction phi{[](const Vector& v) { return v(0); }, 1.0};
    double eps = 0.37;
    double center = 0.0;
    for (int i = 0; i < 3; ++i) center += P.samples.col(i).head(2).dot(g) / 3;
    double analytic = center + eps * norm_dual(g, P.r);
    CHECK(std::abs(worst_case_expectation_oracle(P, phi, g, eps) - analytic) < 1e-8);
}

TEST_CASE("worst case with zero decision ignores the radius") {
    auto P = EmpiricalDistribution::uniform(random_atoms(47, 4, 3));
    SliceFunction phi{[](const Vector& v) { return v.lpNorm<1>() + 1.0; }, 1.0};
    Vector g = Vector::Zero(2);
    CHECK(worst_case_expectation_oracle(P, phi, g, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("worst case grows with the radius") {
    auto P = EmpiricalDistribution::uniform(random_atoms(53, 4, 4));
    Vector g(2);
    g << 0.8, 0.6;
    SliceFunction phi{[](const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }, 1.0};
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps : {0.0, 0.1, 0.5, 1.0}) {
        double v = worst_case_expectation_oracle(P, phi, g, eps);
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
}

TEST_CASE("weights must be a probability vector") {
    EmpiricalDistribution d;
    d.samples = random_atoms(59, 2, 3);
    d.weights = Vector::Constant(3, 0.5);
    CHECK_THROWS_AS(d.validate(), DimensionMismatch);
}

TEST_CASE("distribution csv round trip") {
    auto P = EmpiricalDistribution::uniform(random_atoms(61, 3, 4));
    std::stringstream ss;
    write_distribution_csv(ss, P);
    auto back = read_distribution_csv(ss);
    CHECK(back.count() == 4);
    CHECK(back.dim() == 3);
    CHECK((back.samples - P.samples).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK((back.weights - P.weights).lpNorm<Eigen::Infinity>() < 1e-14);
}
