#ifndef ISOLAB_ERRORS_HPP
#define ISOLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isolab {

struct DegenerateEllipse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZoneViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OverlapViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a traced ray grazes the boundary or enters a corner
// exclusion disk; the trajectory is abandoned, never silently continued.
struct GrazingOrCorner : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutsideDomain : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridTooCoarse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SupportViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace isolab

#endif
