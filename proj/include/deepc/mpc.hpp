#pragma once

#include "deepc/conic.hpp"
#include "deepc/cost.hpp"
#include "deepc/plant.hpp"

namespace deepc {

struct MpcSolution {
    Signal u = Signal::zeros(1, 1);
    Signal y = Signal::zeros(1, 1);
    double objective = 0.0;
    SolveStatus status = SolveStatus::IterLimit;
};

/// Model-based finite-horizon optimal control from a known initial state.
/// The state/output recursion is eliminated through the observability and
/// impulse-response matrices, leaving a cone program in the input sequence.
/// Throws Infeasible / SolverFailure on non-optimal termination.
MpcSolution mpc_solve(const SystemModel& sys, const Vector& x0, const CostSpec& cost,
                      const ConstraintSpec& constraints, int T_f,
                      const SolveSettings& settings = SolveSettings{});

}  // namespace deepc
