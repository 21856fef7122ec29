#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace smallscat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid obstacle description (non-positive radius, not contained in B_1, ...).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Degenerate surface discretization (coincident nodes, bad resolution).
class GridError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent scenario or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Off-surface evaluation requested too close to the boundary or at a singular point.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Dense solve failed its residual check or the factorization broke down.
class SolverError : public Error {
 public:
  SolverError(std::complex<double> s, double condition, const std::string& what)
      : Error(format(s, condition, what)), s_(s), condition_(condition) {}

  std::complex<double> frequency() const { return s_; }
  double condition_estimate() const { return condition_; }

 private:
  static std::string format(std::complex<double> s, double condition, const std::string& what) {
    std::ostringstream os;
    os << what << " (s = " << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag())
       << "i, condition estimate = " << condition << ")";
    return os.str();
  }

  std::complex<double> s_;
  double condition_;
};

}  // namespace smallscat
