#pragma once

#include <stdexcept>
#include <string>

namespace ladderqed {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical parameter lies outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A flat index or lattice coordinate is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity is not defined in the current physical regime
/// (e.g. a bound-state pole requested for an emitter inside the band).
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Markovian rates requested at a point with vanishing group velocity.
class BandEdgeError : public RegimeError {
 public:
  using RegimeError::RegimeError;
};

/// The angle theta_k is undefined (eta = 0 and f(k) = 0).
class DegenerateAngleError : public Error {
 public:
  using Error::Error;
};

/// Chirality requested for an all-zero set of rates or intensities.
class UndefinedChiralityError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// The propagator could not meet its accuracy contract.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Dense oracle requested for a system that is too large to diagonalize.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition (e.g. pole on the contour).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete experiment configuration. `field()` names the
/// offending key path (dot separated) when one is known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::string field = {})
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace ladderqed
