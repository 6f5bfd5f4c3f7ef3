#pragma once

#include <stdexcept>
#include <string>

namespace hslab {

/// Raised when a computation cannot meet its requested accuracy
/// (divergent tails, non-converged grid refinement, ...). Carries the
/// best available error estimate so callers can decide what to do.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}

    double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

} // namespace hslab
