#pragma once

#include <stdexcept>
#include <string>

namespace uli {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionOverflow : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NonFiniteEntry : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public Error {
 public:
  NotNormalized(const std::string& what, double measured_norm)
      : Error(what), measured_norm_(measured_norm) {}
  double measured_norm() const noexcept { return measured_norm_; }

 private:
  double measured_norm_;
};

class NotSorted : public Error {
 public:
  using Error::Error;
};

class BadSpectrum : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  NotUnitary(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

}  // namespace uli
