#pragma once

#include <string>
#include <vector>

#include "conedensity/certificate.hpp"

namespace conedensity {

// A transformation with its certificate input ~ output and the bound the
// corresponding approximation lemma promises.
struct ConeTransportRecord {
  std::string lemma;  // replace_source | replace_target | transport_cone | transport_tower | sum
  Rational epsilon{0};
  Rational claimed_bound{0};
  TwistedComplex input{point_base()};
  TwistedComplex output{point_base()};
  InterleavingCertificate certificate;
  std::vector<std::string> trace;
};

// Throws CertificateFailure unless the certificate replays and its cost is
// within the claimed bound.
void check_record(const ConeTransportRecord& r);

// Cone(f: A -> B) against Cone(f v: A' -> T_b B), for a certificate A ~ A'
// with cost at most epsilon. Claimed bound 4 epsilon; the certificate costs
// a + b.
ConeTransportRecord replace_source(const TwistedComplex& A, const TwistedComplex& B, const gf2::Matrix& f,
                                   const TwistedComplex& A2, const InterleavingCertificate& cert,
                                   const Rational& epsilon);

// Cone(f: A -> B) against Cone(u f: A -> T_a B'), for a certificate B ~ B'.
ConeTransportRecord replace_target(const TwistedComplex& A, const TwistedComplex& B, const gf2::Matrix& f,
                                   const TwistedComplex& B2, const InterleavingCertificate& cert,
                                   const Rational& epsilon);

// Both ends replaced: Cone(f) against Cone(f': A' -> T_s B') with
// f' = u_B f v_A and s = b_A + a_B. Claimed bound 8 epsilon.
struct TransportedCone {
  ConeTransportRecord record;
  gf2::Matrix map;  // f'
  Rational shift{0};
  TwistedComplex target{point_base()};  // T_s B'
};
TransportedCone transport_cone(const TwistedComplex& A, const TwistedComplex& B, const gf2::Matrix& f,
                               const TwistedComplex& A2, const InterleavingCertificate& cert_a,
                               const TwistedComplex& B2, const InterleavingCertificate& cert_b,
                               const Rational& epsilon);

// E_0 = G_0 and E_k = Cone(maps[k-1]: E_{k-1} -> G_k).
struct Tower {
  std::vector<TwistedComplex> stages;  // G_0 .. G_n
  std::vector<gf2::Matrix> maps;       // E_{k-1} -> G_k
};
// Throws InvalidStructure unless every map is a chain map from the
// previous cone.
TwistedComplex tower_total(const Tower& t);

// Replacements G_i ~ G'_i at cost <= epsilon. Claimed bound 8^n epsilon.
struct TransportedTower {
  ConeTransportRecord record;
  Tower tower;                  // on T_{s_i} G'_i
  std::vector<Rational> shifts;  // s_i
};
TransportedTower transport_tower(const Tower& tower, const std::vector<TwistedComplex>& replacements,
                                 const std::vector<InterleavingCertificate>& certs, const Rational& epsilon);

// Block sum of certificates F_i ~ G_i of cost <= epsilon. Claimed bound
// 2 epsilon.
ConeTransportRecord sum_record(const std::vector<TwistedComplex>& sources, const std::vector<TwistedComplex>& targets,
                               const std::vector<InterleavingCertificate>& certs, const Rational& epsilon);

// [[a, 0], [c, d]] on (first block, second block).
gf2::Matrix lower_block(const gf2::Matrix& a, const gf2::Matrix& c, const gf2::Matrix& d);

}  // namespace conedensity
