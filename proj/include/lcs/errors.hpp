#pragma once

#include <stdexcept>
#include <string>

namespace lcs {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// gamma = 1 - (lambda / m omega_c) alpha <= 0: the shifted spectrum is not
/// strictly positive, so rho(n) vanishes or changes sign.
class DegenerateSpectrum : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A label parameter lies outside the convergence domain of its series.
class ConvergenceDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The requested cutoffs cannot push the neglected mass below threshold.
class TailBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CutoffMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moment sequence does not give a positive-definite Hankel matrix.
class InvalidMoments : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lcs
