#include "conedensity/interleave.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "conedensity/error.hpp"

namespace conedensity {

using gf2::BitVec;
using gf2::Matrix;

namespace {

constexpr int kSamples = 64;

void require_pair(const TwistedComplex& F, const TwistedComplex& G) {
  if (!(F.graph() == G.graph() || *F.graph() == *G.graph()))
    throw Error(ErrorKind::InvalidInput, "complexes live on different graphs");
}

// Degree-0 cycles of Hom(F, T_c G), one representative per cohomology class.
std::vector<Matrix> class_representatives(const TwistedComplex& F, const TwistedComplex& G, const Thresholds& thr,
                                          const Rational& c) {
  auto below = hom_space(thr, F, G, -1, c), at = hom_space(thr, F, G, 0, c), above = hom_space(thr, F, G, 1, c);
  gf2::Span span(at.dim());
  const Matrix into = gf2::transpose(hom_differential(F, G, below, at));
  for (std::size_t k = 0; k < into.rows(); ++k) span.insert(into.row(k));
  std::vector<Matrix> reps;
  for (const auto& z : gf2::nullspace(hom_differential(F, G, at, above)))
    if (span.insert(z)) reps.push_back(at.to_matrix(z));
  return reps;
}

// Degree-0 maps of Hom(C, T_c C) reduced modulo boundaries.
class EndoClasses {
 public:
  EndoClasses(const TwistedComplex& C, const Thresholds& thr, const Rational& c)
      : at_(hom_space(thr, C, C, 0, c)), span_(at_.dim()) {
    auto below = hom_space(thr, C, C, -1, c);
    const Matrix into = gf2::transpose(hom_differential(C, C, below, at_));
    for (std::size_t k = 0; k < into.rows(); ++k) span_.insert(into.row(k));
  }
  BitVec reduce(const Matrix& m) const {
    auto x = at_.coordinates(m);
    if (!x) throw std::logic_error("composite left the allowed support");
    return span_.reduce(*x);
  }
  std::size_t dim() const { return at_.dim(); }

 private:
  HomSpace at_;
  gf2::Span span_;
};

struct Prepared {
  Reduction rf, rg;
  const TwistedComplex& X() const { return rf.reduced; }
  const TwistedComplex& Y() const { return rg.reduced; }
};

Prepared prepare(const TwistedComplex& F, const TwistedComplex& G) { return {minimal_model(F), minimal_model(G)}; }

InterleavingCertificate lift(const Prepared& p, const InterleavingCertificate& core) {
  return compose(reduction_certificate(p.rf), compose(core, reverse(reduction_certificate(p.rg))));
}

void sort_unique(std::vector<Rational>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// rank of H^d(C_{<= t}) -> H^d(C_{<= s}) for s <= t on the point base; the
// stalk at t is the quotient by generators above t.
std::size_t persistent_rank(const TwistedComplex& C, const std::vector<Rational>& levels, int d, const Rational& t,
                            const Rational& s) {
  std::vector<std::size_t> cyc_src, cyc_dst, bnd_src, tgt;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const int g = C.gen(i).deg;
    if (levels[i] <= t) {
      if (g == d) cyc_src.push_back(i);
      if (g == d + 1) cyc_dst.push_back(i);
    }
    if (levels[i] <= s) {
      if (g == d - 1) bnd_src.push_back(i);
      if (g == d) tgt.push_back(i);
    }
  }
  auto block = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Matrix m(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        if (C.diff().get(rows[r], cols[c])) m.set(r, c);
    return m;
  };
  std::vector<long> slot(C.size(), -1);
  for (std::size_t k = 0; k < tgt.size(); ++k) slot[tgt[k]] = static_cast<long>(k);
  gf2::Span span(tgt.size());
  const Matrix into = gf2::transpose(block(tgt, bnd_src));
  for (std::size_t k = 0; k < into.rows(); ++k) span.insert(into.row(k));
  const std::size_t boundaries = span.dim();
  for (const auto& z : gf2::nullspace(block(cyc_dst, cyc_src))) {
    BitVec image(tgt.size());
    for (auto k : z.ones())
      if (slot[cyc_src[k]] >= 0) image.set(static_cast<std::size_t>(slot[cyc_src[k]]));
    span.insert(image);
  }
  return span.dim() - boundaries;
}

// On stalks an (a, b)-interleaving factors tau_{a+b} on X through Y shifted
// by a, so its rank is bounded by the dimension there; same with X and Y
// swapped.
bool rank_obstructed_point(const TwistedComplex& X, const TwistedComplex& Y, const Rational& a,
                           const Rational& b) {
  const auto lx = point_levels(X), ly = point_levels(Y);
  std::vector<Rational> ts;
  for (const auto* ls : {&lx, &ly})
    for (const auto& l : *ls)
      for (const Rational& c : {Rational(0), a, b, Rational(a + b)}) ts.emplace_back(l + c);
  sort_unique(ts);
  std::vector<int> degrees;
  for (const auto* C : {&X, &Y})
    for (const auto& g : C->gens()) degrees.push_back(g.deg);
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  const Rational ab = a + b;
  for (int d : degrees)
    for (const auto& t : ts) {
      if (persistent_rank(X, lx, d, t, t - ab) > persistent_rank(Y, ly, d, t - a, t - a)) return true;
      if (persistent_rank(Y, ly, d, t, t - ab) > persistent_rank(X, lx, d, t - b, t - b)) return true;
    }
  return false;
}

std::vector<GraphPoint> vertex_samples(const MetricGraph& g) {
  std::vector<GraphPoint> out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) out.push_back(GraphPoint::vertex(v));
  for (std::size_t e = 0; e < g.edge_count(); ++e) out.push_back(GraphPoint::on_edge(g, e, g.edge(e).length / 2));
  return out;
}

bool rank_obstructed(const TwistedComplex& X, const TwistedComplex& Y, const Rational& a, const Rational& b) {
  const auto& g = *X.graph();
  if (g.vertex_count() == 1 && g.edge_count() == 0) return rank_obstructed_point(X, Y, a, b);
  for (const auto& x : vertex_samples(g))
    if (rank_obstructed_point(stalk_complex(X, x), stalk_complex(Y, x), a, b)) return true;
  return false;
}

struct Thr4 {
  Thresholds xy, yx, xx, yy;
};

// Composites of class representatives reduced modulo boundaries:
// left[j][k] = [v_k u_j] on X, right[j][k] = [u_j v_k] on Y.
struct Pairing {
  std::vector<std::vector<BitVec>> left, right;
};

// Indices whose pairings are independent; any other index differs from a
// combination of these by something that pairs to zero with everything.
std::vector<std::size_t> independent_side(const Pairing& p, bool u_side, std::size_t count, std::size_t other,
                                          std::size_t dx, std::size_t dy) {
  std::vector<std::size_t> out;
  gf2::Span seen(other * (dx + dy));
  for (std::size_t j = 0; j < count; ++j) {
    BitVec col(other * (dx + dy));
    for (std::size_t k = 0; k < other; ++k) {
      const auto& l = u_side ? p.left[j][k] : p.left[k][j];
      const auto& r = u_side ? p.right[j][k] : p.right[k][j];
      for (auto t : l.ones()) col.set(k * (dx + dy) + t);
      for (auto t : r.ones()) col.set(k * (dx + dy) + dx + t);
    }
    if (seen.insert(col)) out.push_back(j);
  }
  return out;
}

CheckResult check_minimal(const TwistedComplex& X, const TwistedComplex& Y, const Thr4& thr, const Rational& a,
                          const Rational& b, std::uint64_t cap, Search search = Search::Pruned) {
  const Rational ab = a + b;
  const auto us = class_representatives(X, Y, thr.xy, a);
  const auto vs = class_representatives(Y, X, thr.yx, b);
  const EndoClasses ex(X, thr.xx, ab), ey(Y, thr.yy, ab);
  const std::size_t dx = ex.dim(), dy = ey.dim();

  Pairing p;
  p.left.assign(us.size(), std::vector<BitVec>(vs.size()));
  p.right.assign(us.size(), std::vector<BitVec>(vs.size()));
  for (std::size_t j = 0; j < us.size(); ++j)
    for (std::size_t k = 0; k < vs.size(); ++k) {
      p.left[j][k] = ex.reduce(vs[k] * us[j]);
      p.right[j][k] = ey.reduce(us[j] * vs[k]);
    }
  BitVec rhs(dx + dy);
  for (auto t : ex.reduce(Matrix::identity(X.size())).ones()) rhs.set(t);
  for (auto t : ey.reduce(Matrix::identity(Y.size())).ones()) rhs.set(dx + t);

  // [v u] = [1] and [u v] = [1] are bilinear in the class coordinates.
  // Enumerate the side with fewer effective classes, solve for the other.
  const auto piv_u = independent_side(p, true, us.size(), vs.size(), dx, dy);
  const auto piv_v = independent_side(p, false, vs.size(), us.size(), dx, dy);
  const bool enumerate_u = piv_u.size() <= piv_v.size();
  const auto& piv = enumerate_u ? piv_u : piv_v;
  const std::size_t free_count = enumerate_u ? vs.size() : us.size();

  CheckResult out;
  out.outcome = CheckResult::Outcome::Infeasible;
  // Linearized: [1] must at least be a sum of composites.
  if (search == Search::Pruned) {
    gf2::Span all(dx + dy);
    for (std::size_t j = 0; j < us.size(); ++j)
      for (std::size_t k = 0; k < vs.size(); ++k) {
        BitVec c(dx + dy);
        for (auto t : p.left[j][k].ones()) c.set(t);
        for (auto t : p.right[j][k].ones()) c.set(dx + t);
        all.insert(c);
      }
    if (!all.contains(rhs)) return out;
  }

  auto pair_at = [&](std::size_t fixed, std::size_t free) -> std::pair<const BitVec*, const BitVec*> {
    if (enumerate_u) return {&p.left[fixed][free], &p.right[fixed][free]};
    return {&p.left[free][fixed], &p.right[free][fixed]};
  };
  auto attempt = [&](std::uint64_t mask) -> bool {
    ++out.candidates;
    Matrix sys(dx + dy, free_count);
    for (std::size_t t = 0; t < piv.size(); ++t) {
      if (!(mask >> t & 1)) continue;
      for (std::size_t k = 0; k < free_count; ++k) {
        auto [l, r] = pair_at(piv[t], k);
        for (auto e : l->ones()) sys.flip(e, k);
        for (auto e : r->ones()) sys.flip(dx + e, k);
      }
    }
    auto y = gf2::solve(sys, rhs);
    if (!y) return false;
    Matrix u(Y.size(), X.size()), v(X.size(), Y.size());
    for (std::size_t t = 0; t < piv.size(); ++t) {
      if (!(mask >> t & 1)) continue;
      if (enumerate_u)
        u = u + us[piv[t]];
      else
        v = v + vs[piv[t]];
    }
    for (auto k : y->ones()) {
      if (enumerate_u)
        v = v + vs[k];
      else
        u = u + us[k];
    }
    auto hx = null_homotopy(X, X, v * u + Matrix::identity(X.size()), ab);
    auto hy = null_homotopy(Y, Y, u * v + Matrix::identity(Y.size()), ab);
    if (!hx || !hy) throw std::logic_error("class-level interleaving without homotopies");
    InterleavingCertificate cert{a, b, u, v, *hx, *hy};
    require_valid(X, Y, cert, "interleaving search");
    out.outcome = CheckResult::Outcome::Feasible;
    out.certificate = std::move(cert);
    return true;
  };

  // Feasible cells usually have many solutions; a fixed-seed sample finds
  // one long before the enumeration would.
  if (search == Search::Pruned && attempt(0)) return out;
  if (search == Search::Pruned && !piv.empty()) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    const std::uint64_t mask_all = piv.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << piv.size()) - 1;
    for (int k = 0; k < kSamples; ++k)
      if (attempt(rng() & mask_all)) return out;
  }
  if (search == Search::Pruned && rank_obstructed(X, Y, a, b)) return out;
  if (piv.size() >= 63 || (std::uint64_t{1} << piv.size()) > cap) {
    out.outcome = CheckResult::Outcome::UndecidedAtCap;
    return out;
  }
  const std::uint64_t total = std::uint64_t{1} << piv.size();
  for (std::uint64_t mask = search == Search::Pruned ? 1 : 0; mask < total; ++mask)
    if (attempt(mask)) return out;
  return out;
}

Thr4 thresholds(const TwistedComplex& X, const TwistedComplex& Y) {
  return {Thresholds(X, Y), Thresholds(Y, X), Thresholds(X, X), Thresholds(Y, Y)};
}

void add_clipped(std::vector<Rational>& out, const ExtValue& v) {
  if (v.is_pos_inf()) return;
  if (v.is_neg_inf() || v.value() < 0)
    out.emplace_back(0);
  else
    out.push_back(v.value());
}

void add_values(std::vector<Rational>& out, const Thresholds& thr, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) add_clipped(out, thr.at(i, j));
}

std::vector<Rational> finite_values(const Thresholds& thr, std::size_t rows, std::size_t cols) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (thr.at(i, j).finite()) out.push_back(thr.at(i, j).value());
  sort_unique(out);
  return out;
}

ShiftGrid grid_from(const TwistedComplex& X, const TwistedComplex& Y, const Thr4& thr) {
  const auto n = X.size(), m = Y.size();
  auto cross_a = finite_values(thr.xy, m, n), cross_b = finite_values(thr.yx, n, m);
  auto internal = finite_values(thr.xx, n, n);
  for (auto& v : finite_values(thr.yy, m, m)) internal.push_back(v);
  sort_unique(internal);
  ShiftGrid g;
  g.a.emplace_back(0);
  g.b.emplace_back(0);
  for (const auto& x : cross_a)
    if (x > 0) g.a.push_back(x);
  for (const auto& y : cross_b)
    if (y > 0) g.b.push_back(y);
  for (const auto& i : internal) {
    for (const auto& y : cross_b)
      if (i - y > 0) g.a.emplace_back(i - y);
    for (const auto& x : cross_a)
      if (i - x > 0) g.b.emplace_back(i - x);
    if (i > 0) {
      g.a.push_back(i);
      g.b.push_back(i);
    }
  }
  sort_unique(g.a);
  sort_unique(g.b);
  return g;
}

std::vector<StalkBound> stalk_bounds(const TwistedComplex& F, const TwistedComplex& G,
                                     const std::vector<GraphPoint>& samples) {
  std::vector<StalkBound> out;
  for (const auto& x : samples) {
    auto bf = gabriel_decompose(stalk_complex(F, x)).barcode;
    auto bg = gabriel_decompose(stalk_complex(G, x)).barcode;
    auto plain = bottleneck(bf, bg);
    auto gamma = interleaving_bottleneck(bf, bg);
    out.push_back({x, std::move(bf), std::move(bg), plain, gamma});
  }
  return out;
}

ExtValue max_lower(const std::vector<StalkBound>& s) {
  ExtValue best(0);
  for (const auto& b : s) best = max(best, b.interleaving);
  return best;
}

}  // namespace

CheckResult check_interleaving(const TwistedComplex& F, const TwistedComplex& G, const Rational& a,
                               const Rational& b, std::uint64_t cap, Search search) {
  require_pair(F, G);
  if (a < 0 || b < 0) throw Error(ErrorKind::InvalidInput, "interleaving parameters must be nonnegative");
  const auto p = prepare(F, G);
  auto out = check_minimal(p.X(), p.Y(), thresholds(p.X(), p.Y()), a, b, cap, search);
  if (out.certificate) {
    out.certificate = lift(p, *out.certificate);
    require_valid(F, G, *out.certificate, "lifted interleaving");
  }
  return out;
}

std::vector<Rational> critical_shifts(const TwistedComplex& F, const TwistedComplex& G) {
  require_pair(F, G);
  std::vector<Rational> out{Rational(0)};
  add_values(out, Thresholds(F, G), G.size(), F.size());
  add_values(out, Thresholds(G, F), F.size(), G.size());
  add_values(out, Thresholds(F, F), F.size(), F.size());
  add_values(out, Thresholds(G, G), G.size(), G.size());
  sort_unique(out);
  return out;
}

ShiftGrid shift_grid(const TwistedComplex& F, const TwistedComplex& G) {
  require_pair(F, G);
  return grid_from(F, G, thresholds(F, G));
}

DistanceResult distance_exact(const TwistedComplex& F, const TwistedComplex& G, std::uint64_t cap, Search search) {
  require_pair(F, G);
  const auto p = prepare(F, G);
  const auto thr = thresholds(p.X(), p.Y());
  const auto grid = grid_from(p.X(), p.Y(), thr);

  DistanceResult out;
  std::optional<Rational> best;
  std::optional<InterleavingCertificate> witness;
  auto check = [&](const Rational& a, const Rational& b) {
    auto r = check_minimal(p.X(), p.Y(), thr, a, b, cap, search);
    if (r.undecided()) out.hit_cap = true;
    return r;
  };

  // Least feasible b is non-increasing in a, so one pointer walks down B.
  std::size_t j = grid.b.size() - 1;
  bool found = false;
  for (const auto& a : grid.a) {
    if (best && a >= *best) break;
    if (!found) {
      auto top = check(a, grid.b[j]);
      if (!top.feasible()) {
        if (!top.undecided()) out.infeasible.emplace_back(a, grid.b[j]);
        continue;
      }
      found = true;
      if (!best || a + grid.b[j] < *best) {
        best = a + grid.b[j];
        witness = top.certificate;
      }
    }
    while (j > 0) {
      auto r = check(a, grid.b[j - 1]);
      if (!r.feasible()) {
        if (!r.undecided()) out.infeasible.emplace_back(a, grid.b[j - 1]);
        break;
      }
      --j;
      if (a + grid.b[j] < *best) {
        best = a + grid.b[j];
        witness = r.certificate;
      }
    }
  }

  out.stalks = stalk_bounds(F, G, vertex_samples(*F.graph()));
  if (out.hit_cap) {
    out.mode = DistanceResult::Mode::Bounds;
    out.lower = max_lower(out.stalks);
    out.upper = best ? ExtValue(*best) : ExtValue::pos_inf();
  } else {
    out.mode = DistanceResult::Mode::Exact;
    out.lower = out.upper = best ? ExtValue(*best) : ExtValue::pos_inf();
  }
  if (witness) {
    out.witness = lift(p, *witness);
    require_valid(F, G, *out.witness, "distance witness");
  }
  return out;
}

DistanceResult distance_bounds(const TwistedComplex& F, const TwistedComplex& G,
                               const std::vector<GraphPoint>& samples, const BoundsOptions& options) {
  require_pair(F, G);
  DistanceResult out;
  out.mode = DistanceResult::Mode::Bounds;
  out.stalks = stalk_bounds(F, G, samples);
  out.lower = max_lower(out.stalks);
  out.upper = ExtValue::pos_inf();
  if (options.seed) {
    require_valid(F, G, *options.seed, "seed certificate");
    out.upper = ExtValue(options.seed->cost());
    out.witness = options.seed;
  }
  if (out.upper == out.lower) return out;

  const auto p = prepare(F, G);
  const auto thr = thresholds(p.X(), p.Y());
  const auto grid = grid_from(p.X(), p.Y(), thr);
  std::vector<std::pair<Rational, Rational>> pairs;
  for (const auto& a : grid.a)
    for (const auto& b : grid.b) {
      const Rational s = a + b;
      if (ExtValue(s) < out.upper && out.lower <= ExtValue(s)) pairs.emplace_back(a, b);
    }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    const Rational sx = x.first + x.second, sy = y.first + y.second;
    return sx < sy || (sx == sy && x.first < y.first);
  });
  std::size_t checks = 0;
  for (const auto& [a, b] : pairs) {
    if (checks >= options.max_checks) break;
    const std::size_t n = p.X().size(), m = p.Y().size();
    if (n * m + n * n + m * m > options.max_unknowns) continue;
    ++checks;
    auto r = check_minimal(p.X(), p.Y(), thr, a, b, options.cap);
    if (r.undecided()) out.hit_cap = true;
    if (!r.feasible()) continue;
    out.witness = lift(p, *r.certificate);
    require_valid(F, G, *out.witness, "distance bound witness");
    out.upper = ExtValue(a + b);
    break;
  }
  return out;
}

Wrapped wrapped_translate(const TwistedComplex& C, const Rational& c, const Rational& r) {
  if (c < 0) throw Error(ErrorKind::InvalidInput, "wrapped translation needs c >= 0");
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < C.size(); ++i) {
    const auto& fn = C.gen(i).fn;
    if (!fn.is_lipschitz(r))
      throw Error(ErrorKind::NonLipschitz,
                  "generator " + std::to_string(i) + " is not " + to_string(r) + "-Lipschitz");
    gens.push_back({lipschitz_envelope(fn, r).translated(c), C.gen(i).deg});
  }
  return {TwistedComplex(C.graph(), std::move(gens), C.diff()), Matrix::identity(C.size())};
}

InterleavingCertificate restrict_certificate(const Split& F, const Split& G, const InterleavingCertificate& c) {
  return {c.a, c.b, split_map(F, G, c.u), split_map(G, F, c.v), split_map(F, F, c.h_source),
          split_map(G, G, c.h_target)};
}

InterleavingCertificate stalk_certificate(const Stalk& F, const Stalk& G, const InterleavingCertificate& c) {
  auto sub = [](const Matrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (m.get(rows[i], cols[j])) out.set(i, j);
    return out;
  };
  return {c.a, c.b, sub(c.u, G.kept, F.kept), sub(c.v, F.kept, G.kept), sub(c.h_source, F.kept, F.kept),
          sub(c.h_target, G.kept, G.kept)};
}

}  // namespace conedensity
