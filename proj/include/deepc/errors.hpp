#pragma once

#include <stdexcept>
#include <string>

namespace deepc {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DepthTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StructureViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Unobservable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowTooShort : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidConstants : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SquaredTermInRobustMode : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptySupport : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace deepc
