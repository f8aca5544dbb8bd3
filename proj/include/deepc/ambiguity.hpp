#pragma once

#include <functional>
#include <optional>

#include "deepc/conic.hpp"
#include "deepc/signal.hpp"

namespace deepc {

/// Norm index r for the transport metric; restricted so the dual norm stays
/// cone-representable (q = inf, 2, 1 respectively).
enum class NormIndex { One, Two, Inf };

double norm_r(const Vector& v, NormIndex r);
/// Dual norm ||.||_q with 1/r + 1/q = 1.
double norm_dual(const Vector& v, NormIndex r);

/// Discrete distribution of N atoms (one per column), with weights summing to 1.
struct EmpiricalDistribution {
    Matrix samples;  // dim x N
    Vector weights;
    NormIndex r = NormIndex::Two;

    static EmpiricalDistribution uniform(Matrix samples, NormIndex r = NormIndex::Two);
    int dim() const { return static_cast<int>(samples.rows()); }
    int count() const { return static_cast<int>(samples.cols()); }
    void validate() const;
};

/// Optimal value of the discrete transport LP between two empirical
/// distributions, with ground cost ||xi_i - zeta_j||_r.
double wasserstein_distance(const EmpiricalDistribution& P, const EmpiricalDistribution& Q,
                            const SolveSettings& settings = SolveSettings{});

/// Exact CVaR at level 1-alpha of a discrete distribution (sorting form of
/// inf_tau tau + E[(v - tau)_+]/alpha). alpha = 1 gives the weighted mean.
double cvar(const Vector& values, const Vector& weights, double alpha);

struct ConcentrationConstants {
    double c1, c2, a;
};

struct AmbiguitySpec {
    double epsilon = 0.0;
    double epsilon_con = -1.0;  // < 0 means "same as epsilon"
    NormIndex r = NormIndex::Two;
    double alpha = 0.1;
    double beta = 0.05;
    std::optional<ConcentrationConstants> concentration;

    double constraint_epsilon() const { return epsilon_con < 0.0 ? epsilon : epsilon_con; }
};

/// Minimum Wasserstein radius for confidence 1-beta from the measure
/// concentration bound; K is the data-matrix column count (the dimension
/// exponent of the first branch).
double epsilon_radius(const AmbiguitySpec& spec, int N, int K);

/// Scalar convex Lipschitz function applied to the slice values (xi_i' g);
/// lipschitz is its constant w.r.t. the r-norm on the slice vector.
struct SliceFunction {
    std::function<double(const Vector&)> value;
    double lipschitz;
};

/// Brute-force upper approximation of sup over the Wasserstein ball of
/// E[phi(slices of xi against g)], via the dual: grid search over the dual
/// multiplier with per-sample ray search in the dual-norm-optimal
/// perturbation direction, refined by bisection at the feasibility threshold.
/// Test oracle only; accuracy is limited by the search resolution.
double worst_case_expectation_oracle(const EmpiricalDistribution& P, const SliceFunction& phi,
                                     const Vector& g, double epsilon, int grid_points = 200);

}  // namespace deepc
