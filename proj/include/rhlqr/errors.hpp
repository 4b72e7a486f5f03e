#pragma once

#include <stdexcept>
#include <string>

namespace rhlqr {

/// Process exit codes used by the CLI. Every library error maps to one.
enum class ExitCode : int {
  kOk = 0,
  kInput = 2,
  kCertification = 3,
  kVerification = 4,
  kNumerical = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed input: schema, shape, index or argument errors.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ExitCode::kInput, what) {}
};

/// A caller broke a documented precondition (e.g. an ordering Y >= Z).
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

/// The problem does not satisfy the assumptions needed for a certificate.
class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& what)
      : Error(ExitCode::kCertification, what) {}
};

/// A checked invariant or claimed guarantee did not hold.
class VerificationError : public Error {
 public:
  explicit VerificationError(const std::string& what)
      : Error(ExitCode::kVerification, what) {}
};

/// Factorization or eigen-solver breakdown.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ExitCode::kNumerical, what) {}
};

}  // namespace rhlqr
