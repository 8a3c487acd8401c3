#pragma once

#include <stdexcept>
#include <string>

namespace axpgd {

// Base of every error raised by the library; callers that only care about
// "something went wrong" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error { using Error::Error; };
class MaterialError : public Error { using Error::Error; };
class DataError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };
class StructureError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class NumericalError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class SingularError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

// Raised when a test mode is numerically zero and its streaming coefficient
// cannot be divided out.
class DegenerateModeError : public Error { using Error::Error; };

}  // namespace axpgd
