#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gcl {

// Joint-space vector: one entry per joint (rad for revolute, m for prismatic).
using JointVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Transform = Eigen::Isometry3d;

inline constexpr double kPi = 3.14159265358979323846;

// Raised when a vector/matrix argument does not match the model dimension.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Configuration text that cannot be parsed or fails schema validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file whose format-version header is not the one this code writes.
struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file that ends early or contains malformed payload.
struct CorruptFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite loss or parameters during training.
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite state during numerical integration.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_dim(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

}  // namespace gcl
