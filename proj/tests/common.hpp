#pragma once

#include <memory>
#include <string>
#include <vector>

#include "conedensity/graph.hpp"
#include "conedensity/tame.hpp"

namespace testing_support {

using namespace conedensity;

inline Rational q(const char* s) { return parse_rational(s); }

// Path v0 - v1 - ... - v{n}, unit edges by default.
inline GraphRef path_graph(std::size_t edges, Rational len = 1) {
  std::vector<std::string> names;
  std::vector<Edge> es;
  for (std::size_t i = 0; i <= edges; ++i) names.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < edges; ++i) es.push_back(Edge{i, i + 1, len});
  return std::make_shared<const MetricGraph>(names, es);
}

inline GraphRef cycle_graph(std::size_t n, Rational len = 1) {
  std::vector<std::string> names;
  std::vector<Edge> es;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) es.push_back(Edge{i, (i + 1) % n, len});
  return std::make_shared<const MetricGraph>(names, es);
}

inline GraphRef point_graph() { return std::make_shared<const MetricGraph>(MetricGraph::point()); }

inline TameFunction cone_at(const GraphRef& g, std::size_t v, Rational level = 0) {
  return TameFunction::distance_cone(g, GraphPoint::vertex(v), level);
}

}  // namespace testing_support

#include <random>

namespace testing_support {

inline Rational random_rational(std::mt19937& rng, int lo, int hi, int den = 4) {
  std::uniform_int_distribution<int> d(lo * den, hi * den);
  return frac(d(rng), den);
}

inline GraphPoint random_point(std::mt19937& rng, const MetricGraph& g) {
  std::uniform_int_distribution<std::size_t> pick(0, g.vertex_count() + g.edge_count() - 1);
  auto k = pick(rng);
  if (k < g.vertex_count() || g.edge_count() == 0) return GraphPoint::vertex(k % g.vertex_count());
  auto e = k - g.vertex_count();
  std::uniform_int_distribution<int> num(1, 7);
  return GraphPoint::on_edge(g, e, g.edge(e).length * frac(num(rng), 8));
}

// Minimum of a few truncated cones, some restricted to a sub-interval: a tame
// function with jumps, infinite parts and slopes other than one.
inline TameFunction random_tame(std::mt19937& rng, const GraphRef& g, int terms = 3, bool unit_slope = false) {
  auto f = TameFunction::infinite(g);
  for (int i = 0; i < terms; ++i) {
    auto sky = TameFunction::skyscraper(g, random_point(rng, *g), random_rational(rng, -2, 2));
    std::uniform_int_distribution<int> slope(1, 4);
    auto cone = inf_convolution(sky, random_rational(rng, 0, 2), unit_slope ? Rational(1) : frac(slope(rng), 2));
    if (g->edge_count() > 0 && rng() % 2 == 0) {
      ClosedSubset z(*g);
      auto e = rng() % g->edge_count();
      z.add_interval(e, g->edge(e).length * frac(1, 4), g->edge(e).length * frac(3, 4));
      cone = tensor_indicator(cone, z);
    }
    f = pointwise_min(f, cone);
  }
  return f;
}

}  // namespace testing_support

#include "conedensity/twisted.hpp"

namespace testing_support {

struct Interval {
  Rational birth;
  std::optional<Rational> death;  // nullopt = +inf
  int degree = 0;
};

// Direct sum of bar complexes: [a, b) in degree d is (a, d) -> (b, d + 1).
inline TwistedComplex bars_complex(const std::vector<Interval>& bars) {
  std::vector<Rational> levels;
  std::vector<int> degs;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& b : bars) {
    levels.push_back(b.birth);
    degs.push_back(b.degree);
    if (b.death) {
      levels.push_back(*b.death);
      degs.push_back(b.degree + 1);
      edges.emplace_back(levels.size() - 1, levels.size() - 2);
    }
  }
  gf2::Matrix d(levels.size(), levels.size());
  for (auto [i, j] : edges) d.set(i, j);
  return point_complex(levels, degs, d);
}

// Filtered change of basis: elementary operations that only add a generator
// into one of the same degree and a level at least as high.
inline TwistedComplex scramble(std::mt19937& rng, const TwistedComplex& C, int ops) {
  const auto n = C.size();
  gf2::Matrix d = C.diff();
  if (n < 2) return C;
  for (int k = 0; k < ops; ++k) {
    std::size_t i = rng() % n, j = rng() % n;
    if (i == j || C.gen(i).deg != C.gen(j).deg) continue;
    // basis change e_j' = e_j + e_i requires fn_j <= fn_i ... (i absorbs j)
    if (!pointwise_leq(C.gen(j).fn, C.gen(i).fn)) continue;
    // conjugate by E = 1 + e_{ij}: rows i += row j, then cols j += col i
    gf2::Matrix e = gf2::Matrix::identity(n);
    e.set(i, j);
    d = e * d * e;
  }
  return TwistedComplex(C.graph(), C.gens(), d);
}

inline std::vector<Interval> random_bars(std::mt19937& rng, int max_bars, int max_level = 8, bool allow_empty = true) {
  std::vector<Interval> bars;
  int count = static_cast<int>(rng() % static_cast<unsigned>(max_bars + 1));
  if (!allow_empty && count == 0) count = 1;
  for (int k = 0; k < count; ++k) {
    Interval b;
    int lo = static_cast<int>(rng() % static_cast<unsigned>(max_level + 1));
    b.birth = lo;
    b.degree = static_cast<int>(rng() % 2);
    if (rng() % 3 != 0) {
      int hi = lo + static_cast<int>(rng() % static_cast<unsigned>(max_level - lo + 1));
      b.death = Rational(hi);
    }
    bars.push_back(b);
  }
  return bars;
}

// Random point-base complex with at most max_gens generators, levels in
// {0..max_level}. Zero-length pairs are allowed.
inline TwistedComplex random_point_complex(std::mt19937& rng, std::size_t max_gens, int max_level = 8) {
  std::vector<Interval> bars;
  std::size_t gens = 0;
  std::size_t target = 1 + rng() % max_gens;
  while (gens < target) {
    Interval b;
    int lo = static_cast<int>(rng() % static_cast<unsigned>(max_level + 1));
    b.birth = lo;
    b.degree = static_cast<int>(rng() % 2);
    if (gens + 2 <= target && rng() % 3 != 0) {
      int hi = lo + static_cast<int>(rng() % static_cast<unsigned>(max_level - lo + 1));
      b.death = Rational(hi);
      gens += 2;
    } else {
      gens += 1;
    }
    bars.push_back(b);
  }
  std::shuffle(bars.begin(), bars.end(), rng);
  return scramble(rng, bars_complex(bars), 3 * static_cast<int>(gens));
}

}  // namespace testing_support

#include "conedensity/barcode.hpp"

namespace testing_support {

inline Barcode to_barcode(const std::vector<Interval>& bars) {
  std::vector<conedensity::Bar> out;
  for (const auto& b : bars)
    if (!b.death || b.birth < *b.death)
      out.push_back({b.birth, b.death ? ExtValue(*b.death) : ExtValue::pos_inf(), b.degree});
  return Barcode(std::move(out));
}

}  // namespace testing_support

namespace testing_support {

// Degrees 0 and 1 only, so any allowed arrow set squares to zero.
inline TwistedComplex random_graph_complex(std::mt19937& rng, const GraphRef& g, int gens, bool unit_slope = true) {
  std::vector<Generator> raw;
  for (int k = 0; k < gens; ++k) raw.push_back({random_tame(rng, g, 2, unit_slope), static_cast<int>(rng() % 2)});
  auto split = split_components(g, raw, gf2::Matrix(raw.size(), raw.size()));
  gf2::Matrix d(split.size(), split.size());
  for (std::size_t i = 0; i < split.size(); ++i)
    for (std::size_t j = 0; j < split.size(); ++j)
      if (split.gen(i).deg == 1 && split.gen(j).deg == 0 && hom_rule(split.gen(j), split.gen(i)) && rng() % 2)
        d.set(i, j);
  return TwistedComplex(g, split.gens(), d);
}

}  // namespace testing_support

namespace testing_support {

// Random degree-0 cycle of Hom(F, T_shift G).
inline gf2::Matrix random_chain_map(std::mt19937& rng, const TwistedComplex& F, const TwistedComplex& G,
                                    const Rational& shift = 0) {
  Thresholds thr(F, G);
  auto at = hom_space(thr, F, G, 0, shift), above = hom_space(thr, F, G, 1, shift);
  gf2::BitVec x(at.dim());
  for (const auto& z : gf2::nullspace(hom_differential(F, G, at, above)))
    if (rng() % 2) x ^= z;
  return at.to_matrix(x);
}

}  // namespace testing_support

namespace testing_support {

// Minimum of a few unit-slope cones with levels at least floor(x_k).
inline TameFunction random_cone_min(std::mt19937& rng, const GraphRef& g, int terms,
                                    const std::optional<TameFunction>& floor = std::nullopt) {
  std::optional<TameFunction> out;
  for (int k = 0; k < terms; ++k) {
    auto x = random_point(rng, *g);
    Rational level = random_rational(rng, 0, 2);
    if (floor) level += floor->evaluate(x).value();
    auto c = TameFunction::distance_cone(g, x, level);
    out = out ? pointwise_min(*out, c) : c;
  }
  return *out;
}

// 1-Lipschitz complex: `pairs` arrows f -> g with f <= g, plus `free`
// single generators, all finite everywhere; then a filtered scramble.
inline TwistedComplex random_lipschitz_complex(std::mt19937& rng, const GraphRef& g, int pairs, int free) {
  std::vector<Generator> gens;
  std::vector<std::pair<std::size_t, std::size_t>> arrows;
  for (int k = 0; k < pairs; ++k) {
    int d = static_cast<int>(rng() % 2);
    auto f = random_cone_min(rng, g, 1 + static_cast<int>(rng() % 2));
    auto h = random_cone_min(rng, g, 1 + static_cast<int>(rng() % 2), f);
    gens.push_back({f, d});
    gens.push_back({h, d + 1});
    arrows.emplace_back(gens.size() - 1, gens.size() - 2);
  }
  for (int k = 0; k < free; ++k) gens.push_back({random_cone_min(rng, g, 1 + static_cast<int>(rng() % 2)),
                                                 static_cast<int>(rng() % 2)});
  gf2::Matrix d(gens.size(), gens.size());
  for (auto [i, j] : arrows) d.set(i, j);
  return scramble(rng, TwistedComplex(g, gens, d), 4);
}

}  // namespace testing_support
