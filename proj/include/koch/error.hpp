#pragma once

#include <stdexcept>
#include <string>

namespace koch {

// Failure categories; the CLI maps each one to a fixed exit code.
enum class ErrorKind {
    invalid_argument,  // malformed numeric input, empty point sets, out-of-range indices
    parse,             // schedule grammar or input-file syntax
    schedule,          // schedule rejected by validation (range or monotonicity)
    depth_guard,       // requested depth exceeds the hard cap
    mismatch,          // method not applicable to the given schedule
    resolution,        // sample too coarse for the requested scales
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace koch
