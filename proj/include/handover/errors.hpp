#pragma once

#include <stdexcept>
#include <string>

namespace handover {

// Error kinds surfaced by the library. The CLI maps ConfigError to exit
// code 2 and everything else to 3.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EqualAbscissa : std::invalid_argument {
    EqualAbscissa() : std::invalid_argument("heads share the same abscissa") {}
};

struct NonPositiveRadius : std::invalid_argument {
    NonPositiveRadius() : std::invalid_argument("radius must be positive") {}
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct EmptyRealization : std::runtime_error {
    EmptyRealization() : std::runtime_error("realization has no heads") {}
};

// Raised when an envelope breakpoint fails its void check. This is an
// internal consistency failure, not a user error.
struct VoidViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroExpected : std::runtime_error {
    ZeroExpected() : std::runtime_error("expected count is zero") {}
};

struct Overflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoEvents : std::runtime_error {
    NoEvents() : std::runtime_error("no interior events in any replica") {}
};

struct UnknownLaw : std::invalid_argument {
    explicit UnknownLaw(const std::string& name)
        : std::invalid_argument("unknown law: " + name) {}
};

} // namespace handover
