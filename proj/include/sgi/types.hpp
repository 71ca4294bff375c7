#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sgi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A field evaluated to a non-finite value somewhere in a stencil.
struct EvaluationError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Degenerate 2-form, singular thermostat multiplier, and similar.
struct SingularityError : Error {
  using Error::Error;
};

struct StepSizeError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace sgi
