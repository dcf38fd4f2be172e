#include "tailfactor/error.hpp"

namespace tailfactor {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Structural:
      return "structural error";
    case ErrorKind::Input:
      return "input error";
    case ErrorKind::Parameter:
      return "parameter error";
    case ErrorKind::Estimation:
      return "estimation error";
    case ErrorKind::Configuration:
      return "configuration error";
  }
  return "error";
}

void throw_error(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::Structural:
      throw StructuralError(what);
    case ErrorKind::Input:
      throw InputError(what);
    case ErrorKind::Parameter:
      throw ParameterError(what);
    case ErrorKind::Estimation:
      throw EstimationError(what);
    case ErrorKind::Configuration:
      throw ConfigurationError(what);
  }
  throw Error(kind, what);
}

}  // namespace tailfactor
