#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace itmc {

/// Raised when a caller passes an argument outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for data that is well-typed but unusable (zero variance, rank deficiency).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed data records (non-finite values, length mismatch).
class InvalidData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Particle system collapse: every weight underflowed at time step `time_index`.
class ParticleDegeneracy : public std::runtime_error {
 public:
  ParticleDegeneracy(std::size_t time_index, const std::string& what)
      : std::runtime_error(what + " (t=" + std::to_string(time_index) + ")"),
        time_index_(time_index) {}

  std::size_t time_index() const noexcept { return time_index_; }

 private:
  std::size_t time_index_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace itmc
