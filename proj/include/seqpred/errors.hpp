#pragma once

#include <stdexcept>
#include <string>

namespace seqpred {

// Bad user input: out-of-range symbols, malformed parameters, broken configs.
struct InputError : std::invalid_argument {
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A documented resource cap (exhaustive enumeration size, joint table size) was exceeded.
struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal numeric contract failed (e.g. a score fell outside the level-partition
// range because the reference predictor was not smoothed).
struct ContractViolation : std::runtime_error {
    explicit ContractViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Conditioning on an event of probability zero where a posterior is required.
struct DegenerateConditioning : std::runtime_error {
    explicit DegenerateConditioning(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace seqpred
