#include "conedensity/certificate.hpp"

#include <algorithm>

#include "conedensity/error.hpp"

namespace conedensity {

namespace {

Replay fail(std::string why) { return Replay{false, std::move(why)}; }

bool shape(const gf2::Matrix& m, std::size_t rows, std::size_t cols) {
  return m.rows() == rows && m.cols() == cols;
}

}  // namespace

Replay replay(const TwistedComplex& F, const TwistedComplex& G, const InterleavingCertificate& c) {
  if (!(F.graph() == G.graph() || *F.graph() == *G.graph())) return fail("complexes live on different graphs");
  if (c.a < 0 || c.b < 0) return fail("negative interleaving parameter");
  const std::size_t n = F.size(), m = G.size();
  if (!shape(c.u, m, n)) return fail("u has the wrong shape");
  if (!shape(c.v, n, m)) return fail("v has the wrong shape");
  if (!shape(c.h_source, n, n)) return fail("source homotopy has the wrong shape");
  if (!shape(c.h_target, m, m)) return fail("target homotopy has the wrong shape");
  const Rational ab = c.a + c.b;
  if (!supported(F, G, c.u, c.a)) return fail("u leaves the allowed support at shift a");
  if (!supported(G, F, c.v, c.b)) return fail("v leaves the allowed support at shift b");
  if (!commutes(F, G, c.u)) return fail("u is not a chain map");
  if (!commutes(G, F, c.v)) return fail("v is not a chain map");
  if (!supported(F, F, c.h_source, ab, -1)) return fail("source homotopy leaves its support");
  if (!supported(G, G, c.h_target, ab, -1)) return fail("target homotopy leaves its support");
  if (c.v * c.u + gf2::Matrix::identity(n) != homotopy_boundary(F, F, c.h_source))
    return fail("v u + 1 is not d h + h d on the source");
  if (c.u * c.v + gf2::Matrix::identity(m) != homotopy_boundary(G, G, c.h_target))
    return fail("u v + 1 is not d h + h d on the target");
  return {};
}

void require_valid(const TwistedComplex& F, const TwistedComplex& G, const InterleavingCertificate& cert,
                   const std::string& context) {
  auto r = replay(F, G, cert);
  if (!r) throw Error(ErrorKind::CertificateFailure, context + ": " + r.reason);
}

InterleavingCertificate identity_certificate(const TwistedComplex& C) {
  const auto n = C.size();
  return {Rational(0), Rational(0), gf2::Matrix::identity(n), gf2::Matrix::identity(n), gf2::Matrix(n, n),
          gf2::Matrix(n, n)};
}

InterleavingCertificate compose(const InterleavingCertificate& fg, const InterleavingCertificate& gh) {
  InterleavingCertificate out;
  out.a = fg.a + gh.a;
  out.b = fg.b + gh.b;
  out.u = gh.u * fg.u;
  out.v = fg.v * gh.v;
  out.h_source = fg.h_source + fg.v * gh.h_source * fg.u;
  out.h_target = gh.h_target + gh.u * fg.h_target * gh.v;
  return out;
}

InterleavingCertificate reverse(const InterleavingCertificate& c) {
  return {c.b, c.a, c.v, c.u, c.h_target, c.h_source};
}

InterleavingCertificate sum_certificates(const std::vector<InterleavingCertificate>& parts) {
  InterleavingCertificate out;
  std::vector<gf2::Matrix> u, v, hs, ht;
  for (const auto& p : parts) {
    out.a = std::max<Rational>(out.a, p.a);
    out.b = std::max<Rational>(out.b, p.b);
    u.push_back(p.u);
    v.push_back(p.v);
    hs.push_back(p.h_source);
    ht.push_back(p.h_target);
  }
  out.u = block_diagonal(u);
  out.v = block_diagonal(v);
  out.h_source = block_diagonal(hs);
  out.h_target = block_diagonal(ht);
  return out;
}

InterleavingCertificate reduction_certificate(const Reduction& r) {
  const auto n = r.reduced.size();
  return {Rational(0), Rational(0), r.project, r.include, r.homotopy, gf2::Matrix(n, n)};
}

InterleavingCertificate translation_certificate(const TwistedComplex& C, const Rational& c) {
  if (c < 0) throw Error(ErrorKind::InvalidInput, "translation certificate needs c >= 0");
  auto out = identity_certificate(C);
  out.b = c;
  return out;
}

InterleavingCertificate isomorphism_certificate(const gf2::Matrix& m) {
  auto inv = gf2::inverse(m);
  if (!inv) throw Error(ErrorKind::InvalidStructure, "change of basis is singular");
  const auto n = m.rows();
  return {Rational(0), Rational(0), m, *inv, gf2::Matrix(n, n), gf2::Matrix(n, n)};
}

}  // namespace conedensity
