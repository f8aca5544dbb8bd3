#include "deepc/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace deepc {

double norm_r(const Vector& v, NormIndex r) {
    switch (r) {
        case NormIndex::One: return v.lpNorm<1>();
        case NormIndex::Two: return v.norm();
        default: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    }
}

double norm_dual(const Vector& v, NormIndex r) {
    switch (r) {
        case NormIndex::One: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
        case NormIndex::Two: return v.norm();
        default: return v.lpNorm<1>();
    }
}

EmpiricalDistribution EmpiricalDistribution::uniform(Matrix samples, NormIndex r) {
    EmpiricalDistribution d;
    d.weights = Vector::Constant(samples.cols(), 1.0 / static_cast<double>(samples.cols()));
    d.samples = std::move(samples);
    d.r = r;
    d.validate();
    return d;
}

void EmpiricalDistribution::validate() const {
    if (samples.cols() < 1 || samples.rows() < 1)
        throw DimensionMismatch("EmpiricalDistribution: need at least one sample");
    if (weights.size() != samples.cols())
        throw DimensionMismatch("EmpiricalDistribution: weight count mismatch");
    if (weights.minCoeff() < 0.0)
        throw DimensionMismatch("EmpiricalDistribution: negative weight");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw DimensionMismatch("EmpiricalDistribution: weights do not sum to 1");
}

double wasserstein_distance(const EmpiricalDistribution& P, const EmpiricalDistribution& Q,
                            const SolveSettings& settings) {
    P.validate();
    Q.validate();
    if (P.dim() != Q.dim()) throw DimensionMismatch("wasserstein_distance: sample dimension mismatch");
    if (P.r != Q.r) throw DimensionMismatch("wasserstein_distance: norm index mismatch");
    const int n1 = P.count(), n2 = Q.count();
    ConicProgram lp;
    lp.var_count = n1 * n2;
    lp.q.resize(lp.var_count);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            lp.q(i * n2 + j) = norm_r(P.samples.col(i) - Q.samples.col(j), P.r);
    lp.Aeq = Matrix::Zero(n1 + n2, lp.var_count);
    lp.beq.resize(n1 + n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) lp.Aeq(i, i * n2 + j) = 1.0;
        lp.beq(i) = P.weights(i);
    }
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) lp.Aeq(n1 + j, i * n2 + j) = 1.0;
        lp.beq(n1 + j) = Q.weights(j);
    }
    lp.add_nonneg(-Matrix::Identity(lp.var_count, lp.var_count), Vector::Zero(lp.var_count));
    SolveResult res = solve(lp, settings);
    if (res.status != SolveStatus::Optimal)
        throw SolverFailure(std::string("wasserstein_distance: transport LP ") + to_string(res.status));
    return res.objective;
}

double cvar(const Vector& values, const Vector& weights, double alpha) {
    if (values.size() != weights.size() || values.size() == 0)
        throw DimensionMismatch("cvar: values/weights mismatch");
    if (alpha <= 0.0 || alpha > 1.0) throw DimensionMismatch("cvar: alpha outside (0,1]");
    std::vector<int> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values(a) > values(b); });
    double total = weights.sum();
    double acc = 0.0, cv = 0.0;
    for (int i : idx) {
        double take = std::min(weights(i) / total, alpha - acc);
        if (take <= 0.0) break;
        cv += take * values(i);
        acc += take;
        if (acc >= alpha - 1e-15) break;
    }
    return cv / alpha;
}

double epsilon_radius(const AmbiguitySpec& spec, int N, int K) {
    if (!spec.concentration)
        throw InvalidConstants("epsilon_radius: concentration constants not provided");
    const auto& c = *spec.concentration;
    if (c.c1 <= 0.0 || c.c2 <= 0.0 || c.a <= 1.0)
        throw InvalidConstants("epsilon_radius: need c1,c2 > 0 and a > 1");
    if (N < 1 || K < 1) throw DimensionMismatch("epsilon_radius: N,K must be positive");
    double num = std::log(c.c1 / spec.beta);
    double base = num / (c.c2 * static_cast<double>(N));
    double threshold = num / c.c2;
    double expo = static_cast<double>(N) >= threshold ? 1.0 / static_cast<double>(K) : 1.0 / c.a;
    return std::pow(base, expo);
}

namespace {

// directions in slice space probed by the oracle's ray search
std::vector<Vector> probe_directions(int c, NormIndex r) {
    std::vector<Vector> dirs;
    for (int j = 0; j < c; ++j) {
        Vector e = Vector::Zero(c);
        e(j) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    auto normalize = [&](Vector v) {
        double nr = norm_r(v, r);
        if (nr > 0) dirs.push_back(v / nr);
    };
    normalize(Vector::Ones(c));
    normalize(-Vector::Ones(c));
    std::uint64_t state = 0x853c49e6748fea9bull;
    for (int k = 0; k < 24; ++k) {
        Vector v(c);
        for (int j = 0; j < c; ++j) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            v(j) = static_cast<double>(static_cast<std::int64_t>(state >> 11)) * 0x1.0p-52 - 1.0;
        }
        normalize(v);
    }
    return dirs;
}

}  // namespace

double worst_case_expectation_oracle(const EmpiricalDistribution& P, const SliceFunction& phi,
                                     const Vector& g, double epsilon, int grid_points) {
    P.validate();
    if (epsilon < 0.0) throw DimensionMismatch("worst_case_expectation_oracle: epsilon < 0");
    const int d = static_cast<int>(g.size());
    if (P.dim() % d != 0)
        throw DimensionMismatch("worst_case_expectation_oracle: sample dim not a multiple of g dim");
    const int c = P.dim() / d;
    const int N = P.count();

    // slice values v^(i)_j = xi_j' g at each atom
    Matrix V(c, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < c; ++j) V(j, i) = P.samples.col(i).segment(j * d, d).dot(g);

    double center = 0.0;
    for (int i = 0; i < N; ++i) center += P.weights(i) * phi.value(V.col(i));

    const double gq = norm_dual(g, P.r);
    const double lip = phi.lipschitz * gq;  // Lipschitz constant of xi -> phi(slices)
    if (lip <= 0.0 || epsilon == 0.0) return center;

    auto dirs = probe_directions(c, P.r);
    double scale = 1.0 + V.cwiseAbs().maxCoeff();
    const double ray_len = 1e6 * scale;

    // lambda feasible <=> no ray escapes: phi(v + s*gq*w) - lambda*s stays bounded by phi(v)
    auto sample_sup = [&](double lambda, int i, bool& bounded) {
        double best = phi.value(V.col(i));
        for (const auto& w : dirs) {
            double far = phi.value(V.col(i) + ray_len * gq * w) - lambda * ray_len;
            if (far > best + 1e-6 * scale) bounded = false;
            best = std::max(best, far);
        }
        return best;
    };
    auto total_at = [&](double lambda, bool& bounded) {
        bounded = true;
        double t = lambda * epsilon;
        for (int i = 0; i < N; ++i) t += P.weights(i) * sample_sup(lambda, i, bounded);
        return t;
    };

    double best_val = std::numeric_limits<double>::infinity();
    double lo = lip / 100.0, hi = lip * 100.0;
    double last_infeasible = 0.0, first_feasible = hi;
    for (int k = 0; k < grid_points; ++k) {
        double lambda = lo * std::pow(hi / lo, static_cast<double>(k) / (grid_points - 1));
        bool bounded = true;
        double t = total_at(lambda, bounded);
        if (bounded) {
            best_val = std::min(best_val, t);
            first_feasible = std::min(first_feasible, lambda);
        } else {
            last_infeasible = std::max(last_infeasible, lambda);
        }
    }
    // refine the feasibility threshold by bisection
    if (last_infeasible > 0.0 && first_feasible > last_infeasible) {
        double a = last_infeasible, b = first_feasible;
        for (int k = 0; k < 80; ++k) {
            double mid = 0.5 * (a + b);
            bool bounded = true;
            double t = total_at(mid, bounded);
            if (bounded) {
                best_val = std::min(best_val, t);
                b = mid;
            } else {
                a = mid;
            }
        }
    }
    return best_val;
}

}  // namespace deepc
