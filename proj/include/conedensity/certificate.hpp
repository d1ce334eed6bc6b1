#pragma once

#include <string>
#include <vector>

#include "conedensity/twisted.hpp"

namespace conedensity {

// (a, b)-interleaving data between F and G:
//   u: F -> T_a G, v: G -> T_b F (degree-0 chain maps),
//   h_source on F and h_target on G (degree -1, shift a + b) with
//   v u + 1 = d h_source + h_source d and u v + 1 = d h_target + h_target d.
struct InterleavingCertificate {
  Rational a{0}, b{0};
  gf2::Matrix u, v, h_source, h_target;

  Rational cost() const { return a + b; }
  friend bool operator==(const InterleavingCertificate&, const InterleavingCertificate&) = default;
};

struct Replay {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Re-checks support, chain-map and homotopy equations from scratch.
Replay replay(const TwistedComplex& F, const TwistedComplex& G, const InterleavingCertificate& cert);
// Throws CertificateFailure with the replay reason.
void require_valid(const TwistedComplex& F, const TwistedComplex& G, const InterleavingCertificate& cert,
                   const std::string& context);

InterleavingCertificate identity_certificate(const TwistedComplex& C);
// F ~ G and G ~ H give F ~ H at (a1 + a2, b1 + b2).
InterleavingCertificate compose(const InterleavingCertificate& fg, const InterleavingCertificate& gh);
// F ~ G read as G ~ F.
InterleavingCertificate reverse(const InterleavingCertificate& cert);
// Block sum; every part is raised to the largest a and b.
InterleavingCertificate sum_certificates(const std::vector<InterleavingCertificate>& parts);
// C ~ minimal model at (0, 0).
InterleavingCertificate reduction_certificate(const Reduction& r);
// C ~ T_c C at (0, c) for c >= 0.
InterleavingCertificate translation_certificate(const TwistedComplex& C, const Rational& c);
// Isomorphism given by an invertible filtered matrix m: F -> G, at (0, 0).
InterleavingCertificate isomorphism_certificate(const gf2::Matrix& m);

}  // namespace conedensity
