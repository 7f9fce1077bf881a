#pragma once

#include <stdexcept>
#include <string>

namespace meanlab {

// Base of everything the library throws. Callers that only care about
// "bad input vs. bug" can catch Error and InternalError separately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NotKuboAndo : public Error {
 public:
  using Error::Error;
};

class NotInCone : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double worst_deviation)
      : Error(what), worst_deviation_(worst_deviation) {}
  double worst_deviation() const noexcept { return worst_deviation_; }

 private:
  double worst_deviation_;
};

class NegativeRadicand : public Error {
 public:
  using Error::Error;
};

// A post-condition that holds mathematically was violated numerically.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace meanlab
