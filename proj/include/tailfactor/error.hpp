#pragma once

#include <stdexcept>
#include <string>

namespace tailfactor {

/// Coarse classification of failures. The CLI maps these onto exit codes.
enum class ErrorKind {
  Structural,     // shapes, index sets, dimension mismatches
  Input,          // non-finite or out-of-domain data
  Parameter,      // tuning parameters out of range
  Estimation,     // an estimator could not produce a result
  Configuration,  // missing or contradictory options
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what)
      : Error(ErrorKind::Structural, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::Parameter, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what)
      : Error(ErrorKind::Estimation, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what)
      : Error(ErrorKind::Configuration, what) {}
};

/// Throws the subclass matching `kind`.
[[noreturn]] void throw_error(ErrorKind kind, const std::string& what);

}  // namespace tailfactor
