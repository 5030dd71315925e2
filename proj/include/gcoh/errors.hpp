#pragma once

#include <stdexcept>
#include <string>

namespace gcoh {

/// Input has the wrong shape (non-square, odd dimension, bad index set).
class dimension_error : public std::invalid_argument {
 public:
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A covariance matrix (or derived object) violates physicality.
class validity_error : public std::runtime_error {
 public:
  explicit validity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested operation is outside the supported state/measurement class.
class unsupported_error : public std::invalid_argument {
 public:
  explicit unsupported_error(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine failed to converge within its budget.
class convergence_error : public std::runtime_error {
 public:
  explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// File output failed.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gcoh
