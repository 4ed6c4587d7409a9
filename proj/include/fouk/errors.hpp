#pragma once

#include <stdexcept>
#include <string>

namespace fouk {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input matrix failed the symmetry check.
class NonSymmetricError : public Error {
 public:
  using Error::Error;
};

/// Input matrix has an eigenvalue below the PSD tolerance.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

/// A vector expected in S-perp has a significant component in S.
class NotInSPerpError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a nontrivial S-perp but S = R^n.
class DegenerateOperatorError : public Error {
 public:
  using Error::Error;
};

/// Witness construction requires a nonzero S-component.
class NotAWitnessError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature self-check failed to reach its target.
class QuadratureNotConvergedError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration, JSON, or CLI input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace fouk
