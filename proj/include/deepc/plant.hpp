#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "deepc/signal.hpp"

namespace deepc {

/// Discrete-time LTI state-space model x+ = Ax + Bu, y = Cx + Du.
struct SystemModel {
    Matrix A, B, C, D;
    int n, m, p;

    static SystemModel make(Matrix A, Matrix B, Matrix C, Matrix D);
    static SystemModel from_json_text(const std::string& text);
    /// Built-in presets: "double_integrator", "quad_lin".
    static SystemModel preset(const std::string& name);
};

struct NoiseSpec {
    enum class Kind { None, GaussianOutput };
    Kind kind = Kind::None;
    Vector std;  // per output channel
    std::uint64_t seed = 0;

    static NoiseSpec none() { return {}; }
    static NoiseSpec gaussian(double sigma, int p, std::uint64_t seed);
};

/// Simulate the plant from x0 under the input signal; additive output noise
/// drawn per spec (deterministic for a fixed seed).
Signal simulate(const SystemModel& sys, const Vector& x0, const Signal& u,
                const NoiseSpec& noise = NoiseSpec::none());

/// col(C, CA, ..., CA^{depth-1})
Matrix observability_matrix(const SystemModel& sys, int depth);

/// Smallest depth at which the observability matrix reaches rank n.
int lag(const SystemModel& sys, double rank_tol = 1e-9);

/// Block lower-triangular Toeplitz matrix of Markov parameters D, CB, CAB, ...
Matrix toeplitz_impulse(const SystemModel& sys, int T_f);

bool is_controllable(const SystemModel& sys, double rank_tol = 1e-9);

/// One standard normal draw from the counter-based stream indexed by
/// (seed, step, channel); identical triples always yield identical values.
double gaussian_draw(std::uint64_t seed, std::uint64_t step, std::uint64_t channel);

/// Least-squares initial-state reconstruction from a T_ini window:
/// y_ini = O_{T_ini} x + T_{T_ini} u_ini. Unique when T_ini >= lag.
Vector initial_state_from_data(const SystemModel& sys, const Signal& u_ini, const Signal& y_ini,
                               double* residual = nullptr);

}  // namespace deepc
