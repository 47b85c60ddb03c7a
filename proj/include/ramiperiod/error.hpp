#pragma once

#include <stdexcept>
#include <string>

namespace ramiperiod {

/// Error categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorKind {
    validation,   ///< invalid input data (curve file, plan, flags)
    argument,     ///< precondition violated by a caller
    domain,       ///< value outside the domain of a map (chart, modular reduction)
    topology,     ///< inconsistent combinatorics (monodromy, non-manifold mesh)
    degeneracy,   ///< degenerate geometry (coplanar / duplicate points, zero-area faces)
    resolution,   ///< mesh too coarse for the requested construction
    numeric,      ///< solver / quadrature failure
    consistency,  ///< two computations that must agree do not
    zero_weight,  ///< an edge weight vanished where its reciprocal is needed
    io,           ///< unreadable / unwritable files, malformed file contents
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::argument: return "argument";
    case ErrorKind::domain: return "domain";
    case ErrorKind::topology: return "topology";
    case ErrorKind::degeneracy: return "degeneracy";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::zero_weight: return "zero-weight";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the "<kind> error: " prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

/// CLI contract: 0 success, 2 validation, 3 numeric, 4 I/O.
inline int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::validation:
    case ErrorKind::argument:
    case ErrorKind::domain:
    case ErrorKind::topology:
        return 2;
    case ErrorKind::io:
        return 4;
    default:
        return 3;
    }
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ramiperiod
