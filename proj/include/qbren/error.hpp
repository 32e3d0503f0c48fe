#pragma once

#include <stdexcept>
#include <string>

namespace qbren {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct NotSymmetricError : Error {
  using Error::Error;
};

struct EigenError : Error {
  double residual;
  EigenError(const std::string& what, double res) : Error(what), residual(res) {}
};

struct QuadratureError : Error {
  double estimate;
  double error_bound;
  QuadratureError(const std::string& what, double est, double err)
      : Error(what), estimate(est), error_bound(err) {}
};

struct SingularPointError : Error {
  using Error::Error;
};

struct NotPositiveError : Error {
  double min_eigenvalue;
  NotPositiveError(const std::string& what, double mu) : Error(what), min_eigenvalue(mu) {}
};

struct DomainError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

}  // namespace qbren
