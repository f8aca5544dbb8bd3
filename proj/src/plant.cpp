#include "deepc/plant.hpp"

#include <cmath>
#include <json.hpp>

#include "deepc/trajlib.hpp"

namespace deepc {

namespace {

// counter-based generator: independent, reproducible streams per (seed, step, channel)
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

Matrix json_matrix(const nlohmann::json& arr, int rows, int cols, const char* name) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols)
        throw DimensionMismatch(std::string("SystemModel json: bad ") + name);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = arr[i * cols + j].get<double>();
    return m;
}

}  // namespace

double gaussian_draw(std::uint64_t seed, std::uint64_t step, std::uint64_t channel) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(step ^ splitmix64(channel + 0x1234)));
    std::uint64_t h2 = splitmix64(h);
    double u1 = uniform01(h);
    double u2 = uniform01(h2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

SystemModel SystemModel::make(Matrix A, Matrix B, Matrix C, Matrix D) {
    SystemModel sys;
    sys.n = static_cast<int>(A.rows());
    sys.m = static_cast<int>(B.cols());
    sys.p = static_cast<int>(C.rows());
    if (A.cols() != sys.n || B.rows() != sys.n || C.cols() != sys.n || D.rows() != sys.p ||
        D.cols() != sys.m)
        throw DimensionMismatch("SystemModel: inconsistent matrix dimensions");
    sys.A = std::move(A);
    sys.B = std::move(B);
    sys.C = std::move(C);
    sys.D = std::move(D);
    return sys;
}

SystemModel SystemModel::from_json_text(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    int n = j.at("n").get<int>();
    int m = j.at("m").get<int>();
    int p = j.at("p").get<int>();
    return make(json_matrix(j.at("A"), n, n, "A"), json_matrix(j.at("B"), n, m, "B"),
                json_matrix(j.at("C"), p, n, "C"), json_matrix(j.at("D"), p, m, "D"));
}

SystemModel SystemModel::preset(const std::string& name) {
    if (name == "double_integrator") {
        Matrix A(2, 2), B(2, 1), C(1, 2), D(1, 1);
        A << 1, 1, 0, 1;
        B << 0.5, 1;
        C << 1, 0;
        D << 0;
        return make(A, B, C, D);
    }
    if (name == "quad_lin") {
        // 6-state position/velocity surrogate at 25 Hz: inputs are thrust
        // deviation from hover and the two body rates; each axis responds as a
        // double integrator with an effective acceleration gain.
        const double dt = 0.04;
        const double c_xy = 3.0;   // m/s^2 per rad/s of body rate
        const double c_z = 20.0;   // m/s^2 per unit of thrust deviation
        Matrix A = Matrix::Identity(6, 6);
        Matrix B = Matrix::Zero(6, 3);
        Matrix C = Matrix::Zero(3, 6);
        Matrix D = Matrix::Zero(3, 3);
        // state order (px, py, pz, vx, vy, vz); input order (f_tot, w_x, w_y)
        for (int axis = 0; axis < 3; ++axis) {
            A(axis, 3 + axis) = dt;
            C(axis, axis) = 1.0;
        }
        const double b1 = 0.5 * dt * dt, b2 = dt;
        B(0, 2) = c_xy * b1;  // w_y tilts forward -> +x
        B(3, 2) = c_xy * b2;
        B(1, 1) = -c_xy * b1;  // w_x rolls -> -y
        B(4, 1) = -c_xy * b2;
        B(2, 0) = c_z * b1;
        B(5, 0) = c_z * b2;
        return make(A, B, C, D);
    }
    throw DimensionMismatch("unknown system preset: " + name);
}

NoiseSpec NoiseSpec::gaussian(double sigma, int p, std::uint64_t seed) {
    NoiseSpec spec;
    spec.kind = Kind::GaussianOutput;
    spec.std = Vector::Constant(p, sigma);
    spec.seed = seed;
    return spec;
}

Signal simulate(const SystemModel& sys, const Vector& x0, const Signal& u, const NoiseSpec& noise) {
    if (x0.size() != sys.n) throw DimensionMismatch("simulate: x0 dimension mismatch");
    if (u.dim() != sys.m) throw DimensionMismatch("simulate: input dimension mismatch");
    if (noise.kind == NoiseSpec::Kind::GaussianOutput && noise.std.size() != sys.p)
        throw DimensionMismatch("simulate: noise std dimension mismatch");
    const int T = u.length();
    Matrix y(sys.p, T);
    Vector x = x0;
    for (int t = 0; t < T; ++t) {
        Vector ut = u.sample(t);
        y.col(t) = sys.C * x + sys.D * ut;
        if (noise.kind == NoiseSpec::Kind::GaussianOutput)
            for (int c = 0; c < sys.p; ++c)
                y(c, t) += noise.std(c) * gaussian_draw(noise.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(c));
        x = sys.A * x + sys.B * ut;
    }
    return Signal(std::move(y));
}

Matrix observability_matrix(const SystemModel& sys, int depth) {
    if (depth < 1) throw DimensionMismatch("observability_matrix: depth < 1");
    Matrix O(sys.p * depth, sys.n);
    Matrix Ak = Matrix::Identity(sys.n, sys.n);
    for (int i = 0; i < depth; ++i) {
        O.middleRows(i * sys.p, sys.p) = sys.C * Ak;
        Ak = Ak * sys.A;
    }
    return O;
}

int lag(const SystemModel& sys, double rank_tol) {
    for (int ell = 1; ell <= sys.n; ++ell)
        if (numerical_rank(observability_matrix(sys, ell), rank_tol) == sys.n) return ell;
    throw Unobservable("lag: observability matrix never reaches rank n");
}

Matrix toeplitz_impulse(const SystemModel& sys, int T_f) {
    if (T_f < 1) throw DimensionMismatch("toeplitz_impulse: T_f < 1");
    Matrix T = Matrix::Zero(sys.p * T_f, sys.m * T_f);
    // Markov parameters D, CB, CAB, ..., CA^{T_f-2}B down the first block column
    std::vector<Matrix> markov(T_f);
    markov[0] = sys.D;
    Matrix Ak = Matrix::Identity(sys.n, sys.n);
    for (int k = 1; k < T_f; ++k) {
        markov[k] = sys.C * Ak * sys.B;
        Ak = Ak * sys.A;
    }
    for (int i = 0; i < T_f; ++i)
        for (int j = 0; j <= i; ++j) T.block(i * sys.p, j * sys.m, sys.p, sys.m) = markov[i - j];
    return T;
}

bool is_controllable(const SystemModel& sys, double rank_tol) {
    Matrix ctrb(sys.n, sys.n * sys.m);
    Matrix Ak = Matrix::Identity(sys.n, sys.n);
    for (int k = 0; k < sys.n; ++k) {
        ctrb.middleCols(k * sys.m, sys.m) = Ak * sys.B;
        Ak = Ak * sys.A;
    }
    return numerical_rank(ctrb, rank_tol) == sys.n;
}

Vector initial_state_from_data(const SystemModel& sys, const Signal& u_ini, const Signal& y_ini,
                               double* residual) {
    const int T_ini = u_ini.length();
    if (y_ini.length() != T_ini) throw DimensionMismatch("initial_state_from_data: window length mismatch");
    if (u_ini.dim() != sys.m || y_ini.dim() != sys.p)
        throw DimensionMismatch("initial_state_from_data: channel dimension mismatch");
    if (T_ini < lag(sys)) throw WindowTooShort("initial_state_from_data: T_ini < lag");
    Matrix O = observability_matrix(sys, T_ini);
    Vector rhs = y_ini.stacked() - toeplitz_impulse(sys, T_ini) * u_ini.stacked();
    Vector x = O.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    if (residual) *residual = (O * x - rhs).norm();
    return x;
}

}  // namespace deepc
