#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "deepc/errors.hpp"
#include "deepc/signal.hpp"

namespace deepc {

enum class ConeType { Nonneg, SecondOrder };

/// One block of conic rows: A_block * x + s = b_block with s in the cone.
/// For Nonneg this reads A_block * x <= b_block. For SecondOrder the slack
/// s = b - A x must satisfy s_0 >= ||s_{1:}||_2.
struct ConeBlock {
    Matrix A;
    Vector b;
    ConeType cone;
};

/// Canonical cone program:
///   min 1/2 x'Px + q'x + obj_const
///   s.t. Aeq x = beq,  and for each block:  b - A x in cone.
struct ConicProgram {
    int var_count = 0;
    Matrix P;  // may be 0x0 for pure linear objectives
    Vector q;
    double obj_const = 0.0;
    Matrix Aeq;
    Vector beq;
    std::vector<ConeBlock> cone_rows;

    int eq_rows() const { return static_cast<int>(Aeq.rows()); }
    int total_cone_rows() const;

    /// b - Ax <= 0 rows appended as a Nonneg block.
    void add_nonneg(Matrix A, Vector b);
    /// Second-order cone block; first row is the cone "t" component.
    void add_soc(Matrix A, Vector b);

    double objective_at(const Vector& x) const;

    /// Sparse-triplet text dump for external cross-checking.
    void dump(std::ostream& os) const;

    void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(SolveStatus s);

struct SolveSettings {
    double tol_primal = 1e-7;
    double tol_dual = 1e-7;
    double tol_gap = 1e-7;
    int max_iter = 200000;
    bool scaling = true;
    double rho = 0.1;
    double sigma = 1e-6;
    double relax = 1.6;
    bool adaptive_rho = false;
    bool polish = true;
    double tol_infeas = 1e-9;
};

struct SolveResult {
    Vector x;      // primal
    Vector y;      // duals, ordered [equality rows; cone blocks in order]
    Vector slack;  // cone slacks s = b - Ax (zero section for equalities)
    SolveStatus status = SolveStatus::IterLimit;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    double objective = 0.0;
};

/// Operator-splitting (ADMM) solve of the cone program. Deterministic for
/// fixed settings; throws NumericalBreakdown if the KKT factorization fails.
SolveResult solve(const ConicProgram& prog, const SolveSettings& settings = SolveSettings{});

/// Scale-normalized (primal infeasibility, dual infeasibility, duality gap)
/// at a candidate primal/dual pair, computed independently of the solve loop.
struct ResidualTriple {
    double primal;
    double dual;
    double gap;
};
ResidualTriple residuals(const ConicProgram& prog, const Vector& x, const Vector& y);

}  // namespace deepc
