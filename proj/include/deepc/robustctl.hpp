#pragma once

#include "deepc/ambiguity.hpp"
#include "deepc/conic.hpp"
#include "deepc/cost.hpp"
#include "deepc/trajlib.hpp"

namespace deepc {

/// Index bookkeeping for mapping solver variables back to decision quantities.
struct VariableMap {
    int K = 0;           // g occupies [0, K)
    int tau = -1;        // CVaR shift variable, if present
    int s_offset = -1;   // per-batch CVaR slacks
    int s_count = 0;
    int lambda = -1;     // dual norm bound in the piecewise-affine form
};

struct AssembledProgram {
    ConicProgram program;
    VariableMap map;
};

struct RobustSolution {
    Vector g_star;
    Signal u_star = Signal::zeros(1, 1);  // Uf g*
    std::vector<Vector> y_pred;   // Yf^(i) g*
    double objective = 0.0;
    double tau = 0.0;
    Vector s;
    SolveStatus status = SolveStatus::IterLimit;
};

/// Deterministic data-driven program: hard initial-window equalities and hard
/// output box, objective f1 + f2. Requires a single data batch.
AssembledProgram assemble_deterministic(const DataBlocks& blocks, const CostSpec& cost,
                                        const ConstraintSpec& constraints, const Vector& u_ini,
                                        const Vector& y_ini);

/// Tractable distributionally robust program with the Lipschitz-box CVaR
/// constraint rows. f2/f3 terms must be norm-form when epsilon > 0.
AssembledProgram assemble_robust(const DataBlocks& blocks, const CostSpec& cost,
                                 const ConstraintSpec& constraints, const AmbiguitySpec& spec,
                                 const Vector& u_ini, const Vector& y_ini);

/// Variant with the piecewise-affine constraint rows and polyhedral support
/// {F xi <= d} (dual multipliers gamma_ik per batch and piece).
AssembledProgram assemble_robust_affine(const DataBlocks& blocks, const CostSpec& cost,
                                        const ConstraintSpec& constraints, const AmbiguitySpec& spec,
                                        const Vector& u_ini, const Vector& y_ini);

RobustSolution extract_solution(const AssembledProgram& assembled, const SolveResult& raw,
                                const DataBlocks& blocks);

/// Independent re-evaluation of the robust objective
/// f1 + (1/N) sum_i (f2 + f3) + L_obj * epsilon * ||g||_q at a fixed g.
double evaluate_robust_objective(const DataBlocks& blocks, const CostSpec& cost,
                                 const AmbiguitySpec& spec, const Vector& y_ini, const Vector& g);

}  // namespace deepc
