#include "qfirob/error.hpp"

#include <cstdio>

namespace qfirob {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ZeroCleanQfi: return "ZeroCleanQfi";
    case ErrorKind::MissingThirdOrder: return "MissingThirdOrder";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::InsufficientWindow: return "InsufficientWindow";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::SingularField: return "SingularField";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::DegenerateSigmas: return "DegenerateSigmas";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidSize: return "InvalidSize";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind) {}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace qfirob
