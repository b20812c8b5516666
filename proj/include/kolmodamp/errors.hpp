#pragma once

#include <stdexcept>
#include <string>

namespace kolmodamp {

// Error codes shared between the C++ core and the C API surface.
enum class ErrorCode {
    invalid_argument = 1,
    config,
    io,
    unresolved_annulus,
    lattice_overflow,
    gamma_exceeds_one,
    cfl_violation,
    non_finite,
    insufficient_horizon,
    insufficient_sweep,
    degenerate_run,
    verify_mismatch,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace kolmodamp
