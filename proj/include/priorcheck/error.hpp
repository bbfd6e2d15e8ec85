#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace priorcheck {

enum class ErrorCode {
  UnbalancedData,
  NonFiniteValue,
  TooFewGroups,
  InvalidParameter,
  DimensionTooSmall,
  InfeasibleV,
  ImproperPriorNotSamplable,
  EmptyDraws,
  NoResidualInformation,
  DegenerateDiscrepancy,
  UnknownDiscrepancy,
  EmptySample,
  OutOfRangeValue,
  MissingHeader,
  BadRow,
  UnknownKey,
  TypeMismatch,
  MissingRequired,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. `line()` is set for errors raised
// while reading a file.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace priorcheck
