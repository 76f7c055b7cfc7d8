#pragma once

#include <stdexcept>
#include <string>

namespace kflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct TableFormatError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  using Error::Error;
};

struct ParameterError : Error {
  using Error::Error;
};

struct GeometryError : Error {
  using Error::Error;
};

struct StepSizeError : Error {
  using Error::Error;
};

struct CflViolation : Error {
  using Error::Error;
};

struct LinearSolveError : Error {
  using Error::Error;
};

struct DivergenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Raised by model validation; carries the failing sample and the inequality.
struct ValidationError : Error {
  ValidationError(double r, std::string inequality)
      : Error("model validation failed at r = " + std::to_string(r) + ": " + inequality),
        r(r),
        inequality(std::move(inequality)) {}
  double r;
  std::string inequality;
};

}  // namespace kflow
