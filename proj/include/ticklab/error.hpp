#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ticklab {

enum class ErrorKind {
  SingularMatrix,
  BranchCutHit,
  BlockMismatch,
  NonUnitary,
  TooShort,
  InvariantViolation,
  NegativeProbability,
  NeverTicks,
  NoConvergence,
  RouteMismatch,
  DegenerateParams,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-readable kind; the
// message always starts with the kind name so CLI users can grep for it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ticklab
