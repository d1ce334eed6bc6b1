#pragma once

#include <stdexcept>
#include <string>

namespace conedensity {

// Every failure the library reports carries one of these kinds; the CLI maps
// them onto exit codes.
enum class ErrorKind {
  InvalidInput,        // malformed documents, graph mismatch, bad parameters
  InvalidStructure,    // complex/map violating its invariants
  CoverViolation,      // Cech nerve condition fails
  EmptySheaf,          // envelope of the identically +inf function
  NonLipschitz,        // wrapped translation outside the Lipschitz class
  CertificateFailure,  // a certificate does not replay
  UndecidedAtCap,      // enumeration cap exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace conedensity
