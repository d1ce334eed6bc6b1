#include "conedensity/barcode.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "conedensity/error.hpp"

namespace conedensity {

using gf2::BitVec;
using gf2::Matrix;

std::strong_ordering operator<=>(const Bar& x, const Bar& y) {
  if (x.degree != y.degree) return x.degree <=> y.degree;
  if (auto c = cmp(x.birth, y.birth); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  return x.death <=> y.death;
}

Barcode::Barcode(std::vector<Bar> bars) : bars_(std::move(bars)) {
  for (const auto& b : bars_)
    if (!(ExtValue(b.birth) < b.death))
      throw Error(ErrorKind::InvalidInput, "bar [" + to_string(b.birth) + ", " + to_string(b.death) + ") is empty");
  std::sort(bars_.begin(), bars_.end());
}

std::vector<int> Barcode::degrees() const {
  std::vector<int> out;
  for (const auto& b : bars_)
    if (out.empty() || out.back() != b.degree) out.push_back(b.degree);
  return out;
}

std::size_t Barcode::betti(int degree, const Rational& t) const {
  std::size_t n = 0;
  for (const auto& b : bars_)
    if (b.degree == degree && b.birth <= t && ExtValue(t) < b.death) ++n;
  return n;
}

Barcode shifted(const Barcode& B, const Rational& s) {
  std::vector<Bar> out;
  for (const auto& b : B.bars()) out.push_back({Rational(b.birth + s), b.death + s, b.degree});
  return Barcode(std::move(out));
}

// ---------------------------------------------------------------------------

Stalk stalk_at(const TwistedComplex& F, const GraphPoint& x) {
  std::vector<std::size_t> kept;
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto v = F.gen(i).fn.evaluate(x);
    if (!v.finite()) continue;
    kept.push_back(i);
    gens.push_back({TameFunction::constant(point_base(), v.value()), F.gen(i).deg});
  }
  Matrix d(kept.size(), kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t b = 0; b < kept.size(); ++b)
      if (F.diff().get(kept[a], kept[b])) d.set(a, b);
  return {TwistedComplex(point_base(), std::move(gens), std::move(d)), std::move(kept)};
}

TwistedComplex stalk_complex(const TwistedComplex& F, const GraphPoint& x) { return stalk_at(F, x).complex; }

std::vector<Rational> point_levels(const TwistedComplex& C) {
  const auto& g = *C.graph();
  if (g.vertex_count() != 1 || g.edge_count() != 0)
    throw Error(ErrorKind::InvalidInput, "expected a complex on the point base");
  std::vector<Rational> out;
  for (const auto& gen : C.gens()) {
    auto v = gen.fn.evaluate(GraphPoint::vertex(0));
    if (!v.finite()) throw Error(ErrorKind::InvalidStructure, "point-base generator with empty epigraph");
    out.push_back(v.value());
  }
  return out;
}

TwistedComplex cone_tower_from_barcode(const Barcode& B, const GraphRef& graph, const GraphPoint& x) {
  std::vector<Generator> gens;
  std::vector<std::pair<std::size_t, std::size_t>> arrows;
  for (const auto& bar : B.bars()) {
    gens.push_back({TameFunction::skyscraper(graph, x, bar.birth), bar.degree});
    if (!bar.infinite()) {
      arrows.emplace_back(gens.size(), gens.size() - 1);
      gens.push_back({TameFunction::skyscraper(graph, x, bar.death.value()), bar.degree + 1});
    }
  }
  Matrix d(gens.size(), gens.size());
  for (auto [i, j] : arrows) d.set(i, j);
  return TwistedComplex(graph, std::move(gens), std::move(d));
}

TwistedComplex cone_tower_from_barcode(const Barcode& B) {
  return cone_tower_from_barcode(B, point_base(), GraphPoint::vertex(0));
}

TwistedComplex place_at(const TwistedComplex& C, const GraphRef& graph, const GraphPoint& x) {
  auto levels = point_levels(C);
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < C.size(); ++i)
    gens.push_back({TameFunction::skyscraper(graph, x, levels[i]), C.gen(i).deg});
  return TwistedComplex(graph, std::move(gens), C.diff());
}

// ---------------------------------------------------------------------------

GabrielDecomposition gabriel_decompose(const TwistedComplex& C) {
  point_levels(C);
  Reduction red = minimal_model(C);
  const TwistedComplex& R = red.reduced;
  const auto levels = point_levels(R);
  const std::size_t n = R.size();

  // Positions ordered by (level, index); the differential only raises levels,
  // so targets sit after their sources and the pivot of a column is its
  // first set position. Columns are swept from the top level down, so every
  // column addition adds a higher generator into a lower one.
  std::vector<std::size_t> order(n), pos(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cmp(levels[a], levels[b]) < 0; });
  for (std::size_t p = 0; p < n; ++p) pos[order[p]] = p;

  std::vector<BitVec> col(n, BitVec(n)), basis(n, BitVec(n));
  for (std::size_t p = 0; p < n; ++p) {
    basis[p].set(p);
    for (std::size_t i = 0; i < n; ++i)
      if (R.diff().get(i, order[p])) col[p].set(pos[i]);
  }
  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(n, none), pivot(n, none);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t p = n - 1 - step;
    while (true) {
      const auto l = col[p].first_set();
      if (l == n) break;
      if (owner[l] == none) {
        owner[l] = p;
        pivot[p] = l;
        break;
      }
      col[p] ^= col[owner[l]];
      basis[p] ^= basis[owner[l]];
    }
  }

  // New basis: the reduced column for pivot positions, the accumulated
  // column operations elsewhere.
  Matrix W(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const BitVec& w = owner[k] != none ? col[owner[k]] : basis[k];
    for (auto r : w.ones()) W.set(order[r], order[k]);
  }
  auto Winv = gf2::inverse(W);
  if (!Winv) throw Error(ErrorKind::InvalidStructure, "gabriel: singular change of basis");

  struct Slot {
    Bar bar;
    std::size_t birth_gen, death_gen;
  };
  std::vector<Slot> slots;
  for (std::size_t p = 0; p < n; ++p) {
    if (owner[p] != none) continue;  // death end of a finite bar
    const std::size_t g = order[p];
    if (pivot[p] != none) {
      const std::size_t h = order[pivot[p]];
      slots.push_back({{levels[g], ExtValue(levels[h]), R.gen(g).deg}, g, h});
    } else {
      slots.push_back({{levels[g], ExtValue::pos_inf(), R.gen(g).deg}, g, none});
    }
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.bar < b.bar; });

  std::vector<Bar> bars;
  Matrix P(n, n);
  std::size_t t = 0;
  for (const auto& s : slots) {
    bars.push_back(s.bar);
    P.set(t++, s.birth_gen);
    if (s.death_gen != none) P.set(t++, s.death_gen);
  }
  Barcode barcode(std::move(bars));
  TwistedComplex tower = cone_tower_from_barcode(barcode, C.graph(), GraphPoint::vertex(0));

  auto cert = compose(reduction_certificate(red), isomorphism_certificate(P * *Winv));
  require_valid(C, tower, cert, "gabriel decomposition");
  return {std::move(barcode), std::move(tower), std::move(cert)};
}

// ---------------------------------------------------------------------------

namespace {

// Kuhn's augmenting paths; adj[l] lists right vertices.
bool perfect_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t right) {
  if (adj.size() != right) return false;
  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match(right, none);
  std::vector<char> seen;
  auto augment = [&](auto&& self, std::size_t l) -> bool {
    for (auto r : adj[l]) {
      if (seen[r]) continue;
      seen[r] = 1;
      if (match[r] == none || self(self, match[r])) {
        match[r] = l;
        return true;
      }
    }
    return false;
  };
  for (std::size_t l = 0; l < adj.size(); ++l) {
    seen.assign(right, 0);
    if (!augment(augment, l)) return false;
  }
  return true;
}

Rational abs_diff(const Rational& x, const Rational& y) { return x < y ? Rational(y - x) : Rational(x - y); }

Rational half_length(const Bar& b) { return Rational((b.death.value() - b.birth) / 2); }

Rational pair_cost(const Bar& x, const Bar& y) {
  return std::max<Rational>(abs_diff(x.birth, y.birth), abs_diff(x.death.value(), y.death.value()));
}

bool finite_feasible(const std::vector<Bar>& A, const std::vector<Bar>& B, const Rational& delta) {
  const std::size_t na = A.size(), nb = B.size();
  // Left: A then diagonal copies of B. Right: B then diagonal copies of A.
  std::vector<std::vector<std::size_t>> adj(na + nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j)
      if (pair_cost(A[i], B[j]) <= delta) adj[i].push_back(j);
    if (half_length(A[i]) <= delta) adj[i].push_back(nb + i);
  }
  for (std::size_t j = 0; j < nb; ++j) {
    if (half_length(B[j]) <= delta) adj[na + j].push_back(j);
    for (std::size_t i = 0; i < na; ++i) adj[na + j].push_back(nb + i);
  }
  return perfect_matching(adj, na + nb);
}

Rational finite_bottleneck(const std::vector<Bar>& A, const std::vector<Bar>& B) {
  std::vector<Rational> cand{Rational(0)};
  for (const auto& x : A) {
    cand.push_back(half_length(x));
    for (const auto& y : B) cand.push_back(pair_cost(x, y));
  }
  for (const auto& y : B) cand.push_back(half_length(y));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::size_t lo = 0, hi = cand.size() - 1;  // the largest candidate is always feasible
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (finite_feasible(A, B, cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cand[lo];
}

struct DegreeBars {
  std::vector<Bar> finite;
  std::vector<Rational> infinite;  // births, sorted
};

std::map<int, DegreeBars> by_degree(const Barcode& B) {
  std::map<int, DegreeBars> out;
  for (const auto& b : B.bars()) {
    if (b.infinite())
      out[b.degree].infinite.push_back(b.birth);
    else
      out[b.degree].finite.push_back(b);
  }
  return out;
}

}  // namespace

ExtValue bottleneck(const Barcode& B1, const Barcode& B2) {
  auto d1 = by_degree(B1), d2 = by_degree(B2);
  std::vector<int> degrees;
  for (auto& [d, _] : d1) degrees.push_back(d);
  for (auto& [d, _] : d2) degrees.push_back(d);
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());

  Rational worst(0);
  for (int d : degrees) {
    const auto& x = d1[d];
    const auto& y = d2[d];
    if (x.infinite.size() != y.infinite.size()) return ExtValue::pos_inf();
    // Births are sorted because bars are; matching in order is optimal.
    for (std::size_t i = 0; i < x.infinite.size(); ++i)
      worst = std::max<Rational>(worst, abs_diff(x.infinite[i], y.infinite[i]));
    worst = std::max<Rational>(worst, finite_bottleneck(x.finite, y.finite));
  }
  return ExtValue(worst);
}

ExtValue interleaving_bottleneck(const Barcode& B1, const Barcode& B2) {
  if (!bottleneck(B1, B2).finite()) return ExtValue::pos_inf();
  // For a fixed matching the cost is a max of V-shapes in s (one centred at
  // each endpoint difference, one at 0) and constants, so the optimum sits
  // at a midpoint of two centres.
  std::vector<Rational> centres{Rational(0)};
  for (const auto& x : B1.bars())
    for (const auto& y : B2.bars()) {
      if (x.degree != y.degree) continue;
      centres.push_back(Rational(x.birth - y.birth));
      if (!x.infinite() && !y.infinite()) centres.push_back(Rational(x.death.value() - y.death.value()));
    }
  std::sort(centres.begin(), centres.end());
  centres.erase(std::unique(centres.begin(), centres.end()), centres.end());
  std::vector<Rational> shifts;
  for (std::size_t i = 0; i < centres.size(); ++i)
    for (std::size_t j = i; j < centres.size(); ++j) shifts.push_back(Rational((centres[i] + centres[j]) / 2));
  std::sort(shifts.begin(), shifts.end(), [](const Rational& a, const Rational& b) {
    return cmp(abs(a), abs(b)) < 0 || (cmp(abs(a), abs(b)) == 0 && a < b);
  });
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());

  std::optional<Rational> best;
  for (const auto& s : shifts) {
    const Rational floor_cost = 2 * abs(s);
    if (best && floor_cost >= *best) break;
    auto d = bottleneck(B1, shifted(B2, s));
    Rational cost = std::max<Rational>(floor_cost, Rational(2 * d.value()));
    if (!best || cost < *best) best = cost;
  }
  return ExtValue(*best);
}

}  // namespace conedensity
