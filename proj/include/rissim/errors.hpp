#pragma once

#include <stdexcept>
#include <string>

namespace rissim {

// Bad or inconsistent configuration; message carries the offending field path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Exactly vanishing Lorentzian denominator (on-resonance with zero damping).
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

// Message-bus round barrier violation (missing or out-of-round message).
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rissim
