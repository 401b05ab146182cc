#pragma once

#include <stdexcept>
#include <string>

namespace pgibbs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network or config document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A name in a document refers to no declared node.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

/// A network failed validation with at least one error-severity issue.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition (wrong lengths, empty schedule, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Both values of the updated variable have zero weight.
class ImpossibleConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Evidence has zero probability under the network.
class ImpossibleEvidenceError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Network shape breaks an assumption of the summary rules.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Eigen decomposition or linear solve failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A sample landed on an outcome with zero expected mass.
class ImpossibleOutcomeError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgibbs
