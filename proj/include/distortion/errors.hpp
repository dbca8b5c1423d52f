#pragma once

#include <stdexcept>
#include <string>

namespace distortion {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class ConvergenceError : public Error { using Error::Error; };
class SupportError : public Error { using Error::Error; };
class RegionOverlapError : public Error { using Error::Error; };
class UnsupportedError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class PlanError : public Error { using Error::Error; };
class VerificationError : public Error { using Error::Error; };
class DecompositionError : public Error { using Error::Error; };
class UnboundGeneratorError : public Error { using Error::Error; };

}  // namespace distortion
