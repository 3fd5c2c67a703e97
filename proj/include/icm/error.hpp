#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icm {

enum class ErrorKind {
  NegativeMass,
  PriorNotPositive,
  SumOutOfTolerance,
  ShapeMismatch,
  IndexOutOfRange,
  RhoOutOfRange,
  AllModelsZeroLikelihood,
  AllInfiniteKL,
  EmptyBlock,
  InvalidCover,
  NotAPartition,
  ParameterDomain,
  ProductSpaceTooLarge,
  ConfigInfeasible,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace icm
