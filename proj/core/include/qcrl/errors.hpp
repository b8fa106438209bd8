#pragma once

#include <stdexcept>
#include <string>

namespace qcrl {

struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : ContractViolation {
    using ContractViolation::ContractViolation;
};

// Matrix-log branch cannot be resolved: a degenerate eigenphase sits at the
// principal cut and no hint was supplied.
struct BranchAmbiguity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The gate-angle gradient lies inside the span of the constraint gradients,
// so no variation direction exists at this point.
struct IrregularPoint : std::runtime_error {
    std::size_t record_index = 0;
    explicit IrregularPoint(const std::string& msg, std::size_t index = 0)
        : std::runtime_error(msg), record_index(index) {}
};

struct MaxItersExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoDescent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qcrl
