#pragma once

#include <stdexcept>
#include <string>

namespace unigap {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point does not belong to the space or class domain it was used with.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An instance sits exactly on a dyadic endpoint 2^{-k}; callers resample.
class EndpointError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// No hypothesis in the class agrees with the recorded commitments.
class InconsistentHistory : public Error {
 public:
  using Error::Error;
};

/// The learner strategy is undefined because every successor rank exceeds
/// the configured budget (a gap tree may exist at this pool and schedule).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class SearchHorizonExceeded : public Error {
 public:
  using Error::Error;
};

/// A label handed to a cell learner lies outside the cell's label region.
class RegionViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace unigap
