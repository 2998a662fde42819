#pragma once

#include <stdexcept>
#include <string>

namespace pitslab {

enum class ErrorKind {
  Parameter,      // argument outside the supported range
  Capacity,       // sieve or degree budget exceeded
  Contract,       // input violates an operation's admission rule
  Certification,  // a numerical certificate could not be established
  Diagnostic,     // an iteration failed to converge
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& what) : Error(ErrorKind::Capacity, what) {}
};

struct ContractError : Error {
  explicit ContractError(const std::string& what) : Error(ErrorKind::Contract, what) {}
};

struct CertificationError : Error {
  explicit CertificationError(const std::string& what) : Error(ErrorKind::Certification, what) {}
};

struct DiagnosticError : Error {
  explicit DiagnosticError(const std::string& what) : Error(ErrorKind::Diagnostic, what) {}
};

/// Rethrows `e` with `label` prepended, keeping the concrete error type.
[[noreturn]] void rethrow_labelled(const Error& e, const std::string& label);

}  // namespace pitslab
