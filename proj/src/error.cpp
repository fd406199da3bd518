#include "pforge/error.hpp"

namespace pforge {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::RangeViolation: return "RangeViolation";
    case Errc::InvalidK: return "InvalidK";
    case Errc::PoleHit: return "PoleHit";
    case Errc::BranchPoint: return "BranchPoint";
    case Errc::StepFailure: return "StepFailure";
    case Errc::BranchProximity: return "BranchProximity";
    case Errc::VerticalNormal: return "VerticalNormal";
    case Errc::EndPoint: return "EndPoint";
    case Errc::OutOfStretch: return "OutOfStretch";
    case Errc::WrongFamily: return "WrongFamily";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NoSignChange: return "NoSignChange";
    case Errc::BadResolution: return "BadResolution";
    case Errc::ContinuationFailure: return "ContinuationFailure";
    case Errc::LoopResidualExceeded: return "LoopResidualExceeded";
    case Errc::SeamMismatch: return "SeamMismatch";
    case Errc::FitFailure: return "FitFailure";
    case Errc::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

} // namespace pforge
