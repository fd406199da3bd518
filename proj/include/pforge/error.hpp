#pragma once

#include <stdexcept>
#include <string>

namespace pforge {

enum class Errc {
    RangeViolation,
    InvalidK,
    PoleHit,
    BranchPoint,
    StepFailure,
    BranchProximity,
    VerticalNormal,
    EndPoint,
    OutOfStretch,
    WrongFamily,
    QuadratureFailure,
    NoConvergence,
    NoSignChange,
    BadResolution,
    ContinuationFailure,
    LoopResidualExceeded,
    SeamMismatch,
    FitFailure,
    IoFailure,
};

const char* errc_name(Errc c);

// Every failure in the library carries one of the codes above so the CLI can
// map it to an exit status without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace pforge
