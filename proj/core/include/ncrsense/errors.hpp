#pragma once

#include <stdexcept>
#include <string>

namespace ncrsense {

/// Raised when a configuration document cannot be parsed or violates an
/// invariant. The message carries the offending key and line where known.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Raised when the Fisher information over (d, sigma_re, sigma_im) is
/// singular, i.e. the range is not identifiable from the configured model
/// (zero reflectivity, a single sub-carrier, or a precoder with no energy
/// toward the target).
class IdentifiabilityError : public std::runtime_error {
  public:
    explicit IdentifiabilityError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Raised on shape mismatches between precoders, channel matrices and the
/// configured dimensions.
class DimensionError : public std::invalid_argument {
  public:
    explicit DimensionError(const std::string &msg) : std::invalid_argument(msg) {}
};

} // namespace ncrsense
