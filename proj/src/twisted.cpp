#include "conedensity/twisted.hpp"

#include <algorithm>
#include <sstream>

namespace conedensity {

using gf2::BitVec;
using gf2::Matrix;

namespace {

std::string pair_name(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidStructure, what);
}

}  // namespace

const GraphRef& point_base() {
  static const GraphRef g = std::make_shared<const MetricGraph>(MetricGraph::point());
  return g;
}

Validation validate(const GraphRef& graph, const std::vector<Generator>& gens, const Matrix& diff) {
  Validation out;
  const std::size_t n = gens.size();
  if (diff.rows() != n || diff.cols() != n) {
    out.problems.push_back("differential is " + std::to_string(diff.rows()) + "x" + std::to_string(diff.cols()) +
                           " for " + std::to_string(n) + " generators");
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& fn = gens[i].fn;
    if (!(fn.graph() == graph || *fn.graph() == *graph)) {
      out.problems.push_back("generator " + std::to_string(i) + " lives on another graph");
      continue;
    }
    auto parts = finite_components(fn);
    if (parts.empty()) out.problems.push_back("generator " + std::to_string(i) + " is identically +inf");
    else if (parts.size() > 1) out.problems.push_back("generator " + std::to_string(i) + " has a disconnected epigraph");
  }
  if (!out.ok()) return out;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : diff.row(i).ones()) {
      if (gens[i].deg != gens[j].deg + 1)
        out.problems.push_back("entry " + pair_name(i, j) + " has the wrong degree");
      else if (!pointwise_leq(gens[j].fn, gens[i].fn))
        out.problems.push_back("entry " + pair_name(i, j) + " violates the hom rule");
    }
  Matrix sq = diff * diff;
  for (std::size_t i = 0; i < n; ++i)
    for (auto k : sq.row(i).ones()) out.problems.push_back("d^2 != 0 at " + pair_name(i, k));
  return out;
}

TwistedComplex::TwistedComplex(GraphRef graph) : graph_(std::move(graph)), diff_(0, 0) {}

TwistedComplex::TwistedComplex(GraphRef graph, std::vector<Generator> gens, Matrix diff)
    : graph_(std::move(graph)), gens_(std::move(gens)), diff_(std::move(diff)) {
  auto v = validate(graph_, gens_, diff_);
  if (!v.ok()) {
    std::ostringstream msg;
    msg << "invalid twisted complex:";
    for (std::size_t k = 0; k < v.problems.size() && k < 5; ++k) msg << " " << v.problems[k] << ";";
    throw Error(ErrorKind::InvalidStructure, msg.str());
  }
}

bool operator==(const TwistedComplex& a, const TwistedComplex& b) {
  if (a.size() != b.size() || !(a.diff_ == b.diff_)) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.gens_[i].deg != b.gens_[i].deg || !(a.gens_[i].fn == b.gens_[i].fn)) return false;
  return true;
}

TwistedComplex point_complex(const std::vector<Rational>& levels, const std::vector<int>& degrees,
                             const Matrix& diff) {
  require(levels.size() == degrees.size(), "levels and degrees differ in length");
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < levels.size(); ++i)
    gens.push_back({TameFunction::constant(point_base(), levels[i]), degrees[i]});
  return TwistedComplex(point_base(), std::move(gens), diff);
}

bool hom_rule(const Generator& from, const Generator& to) { return pointwise_leq(from.fn, to.fn); }

// ---------------------------------------------------------------------------

Thresholds::Thresholds(const TwistedComplex& from, const TwistedComplex& to)
    : rows_(to.size()), cols_(from.size()), values_(to.size() * from.size()) {
  for (const auto& g : to.gens()) row_deg_.push_back(g.deg);
  for (const auto& g : from.gens()) col_deg_.push_back(g.deg);
  const auto total = static_cast<long>(rows_ * cols_);
#pragma omp parallel for schedule(dynamic, 16)
  for (long k = 0; k < total; ++k) {
    const auto i = static_cast<std::size_t>(k) / cols_, j = static_cast<std::size_t>(k) % cols_;
    values_[static_cast<std::size_t>(k)] = sup_difference(from.gen(j).fn, to.gen(i).fn);
  }
}

bool Thresholds::allowed(std::size_t i, std::size_t j, int degree, const Rational& shift) const {
  return row_deg_[i] - col_deg_[j] == degree && at(i, j) <= ExtValue(shift);
}

std::vector<Rational> Thresholds::critical_values() const {
  std::vector<Rational> out;
  for (const auto& v : values_)
    if (v.finite() && v.value() >= 0) out.push_back(v.value());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Matrix HomSpace::to_matrix(const BitVec& x) const {
  Matrix m(rows, cols);
  for (auto k : x.ones()) m.set(basis[k].first, basis[k].second);
  return m;
}

std::optional<BitVec> HomSpace::coordinates(const Matrix& m) const {
  BitVec x(dim());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (auto j : m.row(i).ones()) {
      long k = find(i, j);
      if (k < 0) return std::nullopt;
      x.set(static_cast<std::size_t>(k));
    }
  return x;
}

HomSpace hom_space(const Thresholds& thr, const TwistedComplex& F, const TwistedComplex& G, int degree,
                   const Rational& shift) {
  HomSpace s;
  s.rows = G.size();
  s.cols = F.size();
  s.index.assign(s.rows * s.cols, -1);
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t j = 0; j < s.cols; ++j)
      if (thr.allowed(i, j, degree, shift)) {
        s.index[i * s.cols + j] = static_cast<long>(s.basis.size());
        s.basis.emplace_back(i, j);
      }
  return s;
}

Matrix hom_differential(const TwistedComplex& F, const TwistedComplex& G, const HomSpace& from, const HomSpace& to) {
  Matrix d(to.dim(), from.dim());
  // transpose of d_F for column access
  const auto n = F.size();
  std::vector<std::vector<std::size_t>> f_out(n);  // f_out[j] = { l : d_F[j][l] = 1 }
  for (std::size_t j = 0; j < n; ++j) f_out[j] = F.diff().row(j).ones();
  std::vector<std::vector<std::size_t>> g_in(G.size());  // g_in[i] = { l : d_G[l][i] = 1 }
  for (std::size_t l = 0; l < G.size(); ++l)
    for (auto i : G.diff().row(l).ones()) g_in[i].push_back(l);
  for (std::size_t k = 0; k < from.dim(); ++k) {
    auto [i, j] = from.basis[k];
    for (auto l : g_in[i]) {
      long r = to.find(l, j);
      require(r >= 0, "hom differential leaves the allowed support");
      d.flip(static_cast<std::size_t>(r), k);
    }
    for (auto l : f_out[j]) {
      long r = to.find(i, l);
      require(r >= 0, "hom differential leaves the allowed support");
      d.flip(static_cast<std::size_t>(r), k);
    }
  }
  return d;
}

std::size_t HomComplex::dim_at(int degree) const {
  auto k = degree - min_degree;
  if (k < 0 || k >= static_cast<int>(spaces.size())) return 0;
  return spaces[static_cast<std::size_t>(k)].dim();
}

std::size_t HomComplex::cohomology_at(int degree) const {
  auto k = degree - min_degree;
  if (k < 0 || k >= static_cast<int>(cohomology.size())) return 0;
  return cohomology[static_cast<std::size_t>(k)];
}

HomComplex hom_complex(const TwistedComplex& F, const TwistedComplex& G, const Rational& shift) {
  HomComplex hc;
  if (F.size() == 0 || G.size() == 0) return hc;
  int fmin = F.gen(0).deg, fmax = fmin, gmin = G.gen(0).deg, gmax = gmin;
  for (const auto& g : F.gens()) fmin = std::min(fmin, g.deg), fmax = std::max(fmax, g.deg);
  for (const auto& g : G.gens()) gmin = std::min(gmin, g.deg), gmax = std::max(gmax, g.deg);
  hc.min_degree = gmin - fmax;
  Thresholds thr(F, G);
  for (int k = gmin - fmax; k <= gmax - fmin; ++k) hc.spaces.push_back(hom_space(thr, F, G, k, shift));
  std::vector<std::size_t> ranks;
  for (std::size_t k = 0; k + 1 < hc.spaces.size(); ++k) {
    hc.d.push_back(hom_differential(F, G, hc.spaces[k], hc.spaces[k + 1]));
    ranks.push_back(gf2::rank(hc.d.back()));
  }
  for (std::size_t k = 0; k < hc.spaces.size(); ++k) {
    std::size_t out_rank = k < ranks.size() ? ranks[k] : 0;
    std::size_t in_rank = k > 0 ? ranks[k - 1] : 0;
    hc.cohomology.push_back(hc.spaces[k].dim() - out_rank - in_rank);
  }
  return hc;
}

bool supported(const TwistedComplex& F, const TwistedComplex& G, const Matrix& phi, const Rational& shift,
               int degree) {
  if (phi.rows() != G.size() || phi.cols() != F.size()) return false;
  for (std::size_t i = 0; i < phi.rows(); ++i)
    for (auto j : phi.row(i).ones()) {
      if (G.gen(i).deg - F.gen(j).deg != degree) return false;
      if (sup_difference(F.gen(j).fn, G.gen(i).fn) > ExtValue(shift)) return false;
    }
  return true;
}

Matrix homotopy_boundary(const TwistedComplex& F, const TwistedComplex& G, const Matrix& h) {
  return G.diff() * h + h * F.diff();
}

bool commutes(const TwistedComplex& F, const TwistedComplex& G, const Matrix& phi) {
  if (phi.rows() != G.size() || phi.cols() != F.size()) return false;
  return homotopy_boundary(F, G, phi).is_zero();
}

bool is_chain_map(const TwistedComplex& F, const TwistedComplex& G, const Matrix& phi, const Rational& shift) {
  return supported(F, G, phi, shift, 0) && commutes(F, G, phi);
}

std::optional<Matrix> null_homotopy(const TwistedComplex& F, const TwistedComplex& G, const Matrix& phi,
                                    const Rational& shift) {
  if (phi.rows() != G.size() || phi.cols() != F.size()) return std::nullopt;
  Thresholds thr(F, G);
  HomSpace h = hom_space(thr, F, G, -1, shift);
  // equations on every degree-0 position
  HomSpace target;
  target.rows = G.size();
  target.cols = F.size();
  target.index.assign(target.rows * target.cols, -1);
  for (std::size_t i = 0; i < target.rows; ++i)
    for (std::size_t j = 0; j < target.cols; ++j)
      if (G.gen(i).deg == F.gen(j).deg) {
        target.index[i * target.cols + j] = static_cast<long>(target.basis.size());
        target.basis.emplace_back(i, j);
      }
  auto rhs = target.coordinates(phi);
  if (!rhs) return std::nullopt;
  Matrix d = hom_differential(F, G, h, target);
  auto x = gf2::solve(d, *rhs);
  if (!x) return std::nullopt;
  return h.to_matrix(*x);
}

bool is_null_homotopic(const TwistedComplex& F, const TwistedComplex& G, const Matrix& phi, const Rational& shift) {
  return null_homotopy(F, G, phi, shift).has_value();
}

// ---------------------------------------------------------------------------

Cone mapping_cone(const TwistedComplex& F, const TwistedComplex& G, const Matrix& phi) {
  require(is_chain_map(F, G, phi), "mapping cone of a map that is not a chain map");
  const auto n = F.size(), m = G.size();
  std::vector<Generator> gens;
  for (const auto& g : F.gens()) gens.push_back({g.fn, g.deg - 1});
  for (const auto& g : G.gens()) gens.push_back(g);
  Matrix d(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : F.diff().row(i).ones()) d.set(i, j);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto j : phi.row(i).ones()) d.set(n + i, j);
    for (auto j : G.diff().row(i).ones()) d.set(n + i, n + j);
  }
  Matrix incl(n + m, m), proj(n, n + m);
  for (std::size_t i = 0; i < m; ++i) incl.set(n + i, i);
  for (std::size_t j = 0; j < n; ++j) proj.set(j, j);
  return Cone{TwistedComplex(F.graph(), std::move(gens), std::move(d)), std::move(incl), std::move(proj)};
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) r += b.rows(), c += b.cols();
  Matrix out(r, c);
  std::size_t r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (auto j : b.row(i).ones()) out.set(r0 + i, c0 + j);
    r0 += b.rows();
    c0 += b.cols();
  }
  return out;
}

TwistedComplex direct_sum(const std::vector<TwistedComplex>& parts) {
  require(!parts.empty(), "direct sum of no complexes");
  std::vector<Generator> gens;
  std::vector<Matrix> diffs;
  for (const auto& p : parts) {
    gens.insert(gens.end(), p.gens().begin(), p.gens().end());
    diffs.push_back(p.diff());
  }
  return TwistedComplex(parts.front().graph(), std::move(gens), block_diagonal(diffs));
}

TwistedComplex shift(const TwistedComplex& C, int k) {
  std::vector<Generator> gens = C.gens();
  for (auto& g : gens) g.deg -= k;
  return TwistedComplex(C.graph(), std::move(gens), C.diff());
}

TwistedComplex translate(const TwistedComplex& C, const Rational& c) {
  std::vector<Generator> gens;
  for (const auto& g : C.gens()) gens.push_back({g.fn.translated(c), g.deg});
  return TwistedComplex(C.graph(), std::move(gens), C.diff());
}

TwistedComplex project(const TwistedComplex& C, const Rational& slope) {
  std::vector<Generator> gens;
  for (const auto& g : C.gens()) gens.push_back({lipschitz_envelope(g.fn, slope), g.deg});
  return TwistedComplex(C.graph(), std::move(gens), C.diff());
}

// ---------------------------------------------------------------------------

Reduction minimal_model(const TwistedComplex& C) {
  const auto n0 = C.size();
  std::vector<Generator> gens = C.gens();
  Matrix d = C.diff();
  Matrix proj = Matrix::identity(n0), incl = Matrix::identity(n0), hom(n0, n0);

  while (true) {
    const auto n = gens.size();
    std::size_t ci = n, cj = n;
    for (std::size_t i = 0; i < n && ci == n; ++i)
      for (auto j : d.row(i).ones())
        if (gens[i].fn == gens[j].fn) {
          ci = i;
          cj = j;
          break;
        }
    if (ci == n) break;

    // keep = every index except ci, cj
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < n; ++k)
      if (k != ci && k != cj) keep.push_back(k);
    const auto m = keep.size();
    Matrix dn(m, m), p(m, n), in(n, m), h(n, n);
    for (std::size_t a = 0; a < m; ++a) {
      const auto k = keep[a];
      for (std::size_t b = 0; b < m; ++b) {
        const auto l = keep[b];
        bool v = d.get(k, l) != (d.get(k, cj) && d.get(ci, l));
        if (v) dn.set(a, b);
      }
      p.set(a, k);
      if (d.get(k, cj)) p.set(a, ci);  // pi(ci) = sum_k d[k][cj] k
      in.set(k, a);
      if (d.get(ci, k)) in.set(cj, a);  // iota(l) = l + d[ci][l] cj
    }
    h.set(cj, ci);
    // compose with what we have so far
    hom = hom + incl * h * proj;
    proj = p * proj;
    incl = incl * in;
    std::vector<Generator> ng;
    for (auto k : keep) ng.push_back(gens[k]);
    gens = std::move(ng);
    d = std::move(dn);
  }
  return Reduction{TwistedComplex(C.graph(), std::move(gens), std::move(d)), std::move(proj), std::move(incl),
                   std::move(hom)};
}

Split split_with_origin(const GraphRef& graph, const std::vector<Generator>& gens, const Matrix& diff) {
  std::vector<Generator> out;
  std::vector<std::size_t> origin;
  std::vector<std::vector<std::size_t>> pieces(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (auto& part : finite_components(gens[i].fn)) {
      pieces[i].push_back(out.size());
      origin.push_back(i);
      out.push_back({std::move(part), gens[i].deg});
    }
  Matrix d(out.size(), out.size());
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (auto j : diff.row(i).ones())
      for (auto a : pieces[i])
        for (auto b : pieces[j])
          if (pointwise_leq(out[b].fn, out[a].fn)) d.set(a, b);
  return {TwistedComplex(graph, std::move(out), std::move(d)), std::move(origin)};
}

TwistedComplex split_components(const GraphRef& graph, const std::vector<Generator>& gens, const Matrix& diff) {
  return split_with_origin(graph, gens, diff).complex;
}

Matrix split_map(const Split& from, const Split& to, const Matrix& phi) {
  Matrix out(to.complex.size(), from.complex.size());
  for (std::size_t a = 0; a < to.complex.size(); ++a)
    for (std::size_t b = 0; b < from.complex.size(); ++b)
      if (phi.get(to.origin[a], from.origin[b]) &&
          !sup_difference(from.complex.gen(b).fn, to.complex.gen(a).fn).is_pos_inf())
        out.set(a, b);
  return out;
}

Split tensor_complex(const TwistedComplex& C, const ClosedSubset& z) {
  std::vector<Generator> gens;
  for (const auto& g : C.gens()) gens.push_back({tensor_indicator(g.fn, z), g.deg});
  return split_with_origin(C.graph(), gens, C.diff());
}

}  // namespace conedensity
