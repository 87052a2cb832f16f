#pragma once

#include <complex>
#include <stdexcept>

namespace lpisim {

using cd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Numerical guards shared by the dB conversions: powers are clamped at
// kPowerFloor before taking logs, and ratio metrics are clamped at kDbFloor.
inline constexpr double kPowerFloor = 1e-30;
inline constexpr double kDbFloor = -300.0;

/// A configuration value violates its documented constraints.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two objects that must agree in shape do not.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A computation cannot proceed on the given data (degenerate reference,
/// fully masked map, delay longer than a symbol, ...).
class ProcessingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lpisim
