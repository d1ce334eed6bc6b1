#include "conedensity/cone_calculus.hpp"

#include "conedensity/error.hpp"

namespace conedensity {

using gf2::Matrix;

Matrix lower_block(const Matrix& a, const Matrix& c, const Matrix& d) {
  if (c.rows() != d.rows() || c.cols() != a.cols())
    throw std::invalid_argument("lower_block: shape mismatch");
  Matrix out(a.rows() + d.rows(), a.cols() + d.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (auto k : a.row(r).ones()) out.set(r, k);
  for (std::size_t r = 0; r < c.rows(); ++r) {
    for (auto k : c.row(r).ones()) out.set(a.rows() + r, k);
    for (auto k : d.row(r).ones()) out.set(a.rows() + r, a.cols() + k);
  }
  return out;
}

void check_record(const ConeTransportRecord& r) {
  require_valid(r.input, r.output, r.certificate, r.lemma);
  if (r.certificate.cost() > r.claimed_bound)
    throw Error(ErrorKind::CertificateFailure, r.lemma + ": certificate cost " + to_string(r.certificate.cost()) +
                                                   " exceeds the claimed bound " + to_string(r.claimed_bound));
}

namespace {

void require_cost(const InterleavingCertificate& c, const Rational& epsilon, const std::string& what) {
  if (c.cost() > epsilon)
    throw Error(ErrorKind::CertificateFailure,
                what + ": certificate cost " + to_string(c.cost()) + " exceeds epsilon " + to_string(epsilon));
}

// Homotopy on a cone from its explicit blocks, or a generic solve when the
// correction block does not vanish.
Matrix cone_homotopy(const TwistedComplex& Y, const Matrix& top, const Matrix& corner, const Matrix& bottom,
                     const Matrix& target, const Rational& shift) {
  Matrix k = lower_block(top, corner, bottom);
  if (homotopy_boundary(Y, Y, k) == target && supported(Y, Y, k, shift, -1)) return k;
  auto solved = null_homotopy(Y, Y, target, shift);
  if (!solved) throw Error(ErrorKind::CertificateFailure, "cone homotopy does not exist");
  return *solved;
}

}  // namespace

ConeTransportRecord replace_source(const TwistedComplex& A, const TwistedComplex& B, const Matrix& f,
                                   const TwistedComplex& A2, const InterleavingCertificate& c,
                                   const Rational& epsilon) {
  require_valid(A, A2, c, "replace_source precondition");
  require_cost(c, epsilon, "replace_source");
  const auto X = mapping_cone(A, B, f).complex;
  const auto TB = translate(B, c.b);
  const Matrix fv = f * c.v;
  const auto Y = mapping_cone(A2, TB, fv).complex;
  const auto nb = B.size();
  const Matrix id_b = Matrix::identity(nb);

  InterleavingCertificate out;
  out.a = c.a;
  out.b = c.b;
  out.u = lower_block(c.u, f * c.h_source, id_b);
  out.v = lower_block(c.v, Matrix(nb, A2.size()), id_b);
  out.h_source = lower_block(c.h_source, Matrix(nb, A.size()), Matrix(nb, nb));
  const Matrix target = out.u * out.v + Matrix::identity(Y.size());
  out.h_target = cone_homotopy(Y, c.h_target, Matrix(nb, A2.size()), Matrix(nb, nb), target, c.cost());

  ConeTransportRecord r{"replace_source", epsilon, 4 * epsilon, X, Y, out, {}};
  r.trace.push_back("Cone(f) ~ Cone(f v) at (" + to_string(out.a) + ", " + to_string(out.b) + ")");
  check_record(r);
  return r;
}

ConeTransportRecord replace_target(const TwistedComplex& A, const TwistedComplex& B, const Matrix& f,
                                   const TwistedComplex& B2, const InterleavingCertificate& c,
                                   const Rational& epsilon) {
  require_valid(B, B2, c, "replace_target precondition");
  require_cost(c, epsilon, "replace_target");
  const auto X = mapping_cone(A, B, f).complex;
  const auto TB2 = translate(B2, c.a);
  const Matrix uf = c.u * f;
  const auto Y = mapping_cone(A, TB2, uf).complex;
  const auto na = A.size();
  const Matrix id_a = Matrix::identity(na);

  InterleavingCertificate out;
  out.a = 0;
  out.b = c.cost();
  out.u = lower_block(id_a, Matrix(B2.size(), na), c.u);
  out.v = lower_block(id_a, c.h_source * f, c.v);
  out.h_source = lower_block(Matrix(na, na), Matrix(B.size(), na), c.h_source);
  const Matrix target = out.u * out.v + Matrix::identity(Y.size());
  out.h_target = cone_homotopy(Y, Matrix(na, na), Matrix(B2.size(), na), c.h_target, target, c.cost());

  ConeTransportRecord r{"replace_target", epsilon, 4 * epsilon, X, Y, out, {}};
  r.trace.push_back("Cone(f) ~ Cone(u f) at (0, " + to_string(out.b) + ")");
  check_record(r);
  return r;
}

TransportedCone transport_cone(const TwistedComplex& A, const TwistedComplex& B, const Matrix& f,
                               const TwistedComplex& A2, const InterleavingCertificate& cert_a,
                               const TwistedComplex& B2, const InterleavingCertificate& cert_b,
                               const Rational& epsilon) {
  auto first = replace_source(A, B, f, A2, cert_a, epsilon);
  const auto TB = translate(B, cert_a.b);
  const auto TB2 = translate(B2, cert_a.b);
  const Matrix fv = f * cert_a.v;
  // Translation keeps every threshold, so cert_b also relates T B to T B2.
  auto second = replace_target(A2, TB, fv, TB2, cert_b, epsilon);

  TransportedCone out;
  out.map = cert_b.u * fv;
  out.shift = cert_a.b + cert_b.a;
  out.target = translate(B2, out.shift);
  out.record.lemma = "transport_cone";
  out.record.epsilon = epsilon;
  out.record.claimed_bound = 8 * epsilon;
  out.record.input = first.input;
  out.record.output = second.output;
  out.record.certificate = compose(first.certificate, second.certificate);
  out.record.trace = first.trace;
  for (auto& t : second.trace) out.record.trace.push_back(t);
  check_record(out.record);
  return out;
}

TwistedComplex tower_total(const Tower& t) {
  if (t.stages.empty()) throw Error(ErrorKind::InvalidStructure, "empty tower");
  if (t.maps.size() + 1 != t.stages.size())
    throw Error(ErrorKind::InvalidStructure, "tower needs one map per stage after the first");
  TwistedComplex e = t.stages[0];
  for (std::size_t k = 0; k < t.maps.size(); ++k) {
    if (!is_chain_map(e, t.stages[k + 1], t.maps[k]))
      throw Error(ErrorKind::InvalidStructure, "tower map " + std::to_string(k + 1) + " is not a chain map");
    e = mapping_cone(e, t.stages[k + 1], t.maps[k]).complex;
  }
  return e;
}

TransportedTower transport_tower(const Tower& tower, const std::vector<TwistedComplex>& repl,
                                 const std::vector<InterleavingCertificate>& certs, const Rational& epsilon) {
  const auto n = tower.maps.size();
  if (repl.size() != tower.stages.size() || certs.size() != tower.stages.size())
    throw Error(ErrorKind::InvalidStructure, "one replacement and certificate per tower stage");
  const auto input = tower_total(tower);

  TransportedTower out;
  out.tower.stages.push_back(repl[0]);
  out.shifts.emplace_back(0);
  require_valid(tower.stages[0], repl[0], certs[0], "tower stage 0");
  require_cost(certs[0], epsilon, "tower stage 0");
  // Running certificate E_k ~ E'_k, with E'_k the transported partial tower.
  TwistedComplex e = tower.stages[0], e2 = repl[0];
  InterleavingCertificate running = certs[0];
  Rational bound = epsilon;
  out.record.trace.push_back("stage 0: cost " + to_string(running.cost()));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& g = tower.stages[k + 1];
    const auto& g2 = repl[k + 1];
    const Rational stage_eps = std::max<Rational>(bound, epsilon);
    auto step = transport_cone(e, g, tower.maps[k], e2, running, g2, certs[k + 1], stage_eps);
    bound = 8 * stage_eps;
    out.tower.stages.push_back(step.target);
    out.tower.maps.push_back(step.map);
    out.shifts.push_back(step.shift);
    e = step.record.input;
    e2 = step.record.output;
    running = step.record.certificate;
    out.record.trace.push_back("stage " + std::to_string(k + 1) + ": cost " + to_string(running.cost()) +
                               ", bound " + to_string(bound));
  }
  out.record.lemma = "transport_tower";
  out.record.epsilon = epsilon;
  Rational claimed = epsilon;
  for (std::size_t k = 0; k < n; ++k) claimed *= 8;
  out.record.claimed_bound = claimed;
  out.record.input = input;
  out.record.output = e2;
  out.record.certificate = running;
  check_record(out.record);
  return out;
}

ConeTransportRecord sum_record(const std::vector<TwistedComplex>& sources, const std::vector<TwistedComplex>& targets,
                               const std::vector<InterleavingCertificate>& certs, const Rational& epsilon) {
  if (sources.size() != targets.size() || sources.size() != certs.size())
    throw Error(ErrorKind::InvalidStructure, "sum_record: one certificate per pair");
  for (std::size_t i = 0; i < certs.size(); ++i) {
    require_valid(sources[i], targets[i], certs[i], "sum part " + std::to_string(i));
    require_cost(certs[i], epsilon, "sum part " + std::to_string(i));
  }
  ConeTransportRecord r{"sum", epsilon, 2 * epsilon, direct_sum(sources), direct_sum(targets),
                        sum_certificates(certs), {}};
  r.trace.push_back(std::to_string(certs.size()) + " blocks");
  check_record(r);
  return r;
}

}  // namespace conedensity
