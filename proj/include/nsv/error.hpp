#pragma once

#include <stdexcept>
#include <string>

namespace nsv {

// All failure paths in the library throw SimError.  The CLI maps the kind
// to its exit code: config/usage problems exit 2, everything else exits 1.
enum class ErrorKind {
    config,    // bad input: config file, CLI arguments, malformed tables
    numerics,  // NaN, CFL violation, invariant breach during a run
    solver,    // linear solver failed to converge
    io,        // filesystem problems
};

class SimError : public std::runtime_error {
public:
    SimError(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_config(const std::string& msg) { throw SimError(ErrorKind::config, msg); }
[[noreturn]] inline void fail_numerics(const std::string& msg) { throw SimError(ErrorKind::numerics, msg); }
[[noreturn]] inline void fail_solver(const std::string& msg) { throw SimError(ErrorKind::solver, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw SimError(ErrorKind::io, msg); }

}  // namespace nsv
