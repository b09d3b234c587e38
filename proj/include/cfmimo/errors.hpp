#pragma once

#include <stdexcept>
#include <string>

namespace cfmimo {

/// Invalid argument or inconsistent dimensions passed to a model routine.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The estimated channel Gram matrix is (numerically) singular.
class SingularChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many singular draws while estimating the ZF expectations.
class RejectionRateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inner solver was handed a start point outside the strict interior.
class InfeasibleStartError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Positive curvature found along a Newton direction of a supposedly
/// concave objective. what() names the offending term when known.
class NonConcavityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfmimo
