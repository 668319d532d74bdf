#pragma once

#include <stdexcept>
#include <string>

namespace stefan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularGeometryError : public Error {
 public:
  using Error::Error;
};

class DeformationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class LawError : public Error {
 public:
  using Error::Error;
};

class FrozenCoefficientError : public Error {
 public:
  using Error::Error;
};

class WellPosednessError : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  using Error::Error;
};

// Raised when an accepted step leaves the admissible state set.
class HaltError : public Error {
 public:
  using Error::Error;
};

class ProbeError : public Error {
 public:
  using Error::Error;
};

class OracleFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace stefan
