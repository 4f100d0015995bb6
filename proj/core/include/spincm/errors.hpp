#pragma once

#include "spincm/types.hpp"

#include <stdexcept>
#include <string>

namespace spincm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Two poles closer than the collision floor. Carries the flow time when raised
/// during integration (zero otherwise).
class CollidingPoles : public Error {
 public:
  CollidingPoles(const std::string& what, double separation, Complex time = {});

  double separation() const noexcept { return separation_; }
  Complex time() const noexcept { return time_; }

 private:
  double separation_;
  Complex time_;
};

class ConstraintViolated : public Error {
 public:
  ConstraintViolated(const std::string& what, double violation);
  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

class DegenerateDraw : public Error {
 public:
  using Error::Error;
};

class ZeroScale : public Error {
 public:
  using Error::Error;
};

class StepLimitExceeded : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// (zI - L) is singular or too ill-conditioned to solve.
class SpectralCollision : public Error {
 public:
  SpectralCollision(const std::string& what, double rcond);
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// Evaluation point x coincides with a pole x_i.
class PoleHit : public Error {
 public:
  using Error::Error;
};

}  // namespace spincm
