#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfirob {

enum class ErrorKind {
  NonHermitianInput,
  DimensionMismatch,
  NotNormalized,
  UnsupportedOrder,
  InvalidDistribution,
  InvalidSpec,
  ZeroCleanQfi,
  MissingThirdOrder,
  EmptyGrid,
  InsufficientWindow,
  NoSignChange,
  InvalidConfig,
  SingularField,
  SingularPoint,
  DegenerateSigmas,
  LengthMismatch,
  InvalidSize,
  TooLarge,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Short "%.3g" rendering for diagnostics.
std::string format_double(double v);

// All library failures surface as this exception; kind() carries the
// module-level error name used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace qfirob
