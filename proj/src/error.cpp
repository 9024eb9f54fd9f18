#include "ticklab/error.hpp"

namespace ticklab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::BranchCutHit: return "BranchCutHit";
    case ErrorKind::BlockMismatch: return "BlockMismatch";
    case ErrorKind::NonUnitary: return "NonUnitary";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::NeverTicks: return "NeverTicks";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::RouteMismatch: return "RouteMismatch";
    case ErrorKind::DegenerateParams: return "DegenerateParams";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

}  // namespace ticklab
