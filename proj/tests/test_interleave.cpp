#include <doctest.h>

#include <random>

#include "common.hpp"
#include "conedensity/interleave.hpp"

using namespace testing_support;

namespace {

TwistedComplex k_at(long level, int deg = 0) { return point_complex({Rational(level)}, {deg}, gf2::Matrix(1, 1)); }

TwistedComplex single(const GraphRef& g, const TameFunction& f) { return TwistedComplex(g, {{f, 0}}, gf2::Matrix(1, 1)); }

bool feasible(const TwistedComplex& F, const TwistedComplex& G, const Rational& a, const Rational& b) {
  auto r = check_interleaving(F, G, a, b);
  REQUIRE_FALSE(r.undecided());
  if (r.feasible()) CHECK(replay(F, G, *r.certificate).ok);
  return r.feasible();
}

}  // namespace

TEST_CASE("check_interleaving examples") {
  auto F = bars_complex({{Rational(0), Rational(2), 0}, {Rational(1), std::nullopt, 1}});
  auto self = check_interleaving(F, F, 0, 0);
  REQUIRE(self.feasible());
  CHECK(replay(F, F, *self.certificate).ok);

  auto k0 = k_at(0), k3 = k_at(3);
  auto r = check_interleaving(k0, k3, 0, 3);
  REQUIRE(r.feasible());
  CHECK(r.certificate->u.get(0, 0));
  CHECK(r.certificate->v.get(0, 0));
  CHECK(check_interleaving(k0, k3, 0, 2).outcome == CheckResult::Outcome::Infeasible);
  CHECK_THROWS_AS(check_interleaving(k0, k3, -1, 5), Error);
  CHECK(check_interleaving(k0, k3, 0, 3, 0, Search::Exhaustive).undecided());
  CHECK(check_interleaving(k0, k3, 0, 3, 2, Search::Exhaustive).feasible());
}

TEST_CASE("critical shifts and the shift grid") {
  CHECK(critical_shifts(k_at(0), k_at(3)) == std::vector<Rational>{0, 3});
  auto F = bars_complex({{Rational(1), Rational(4), 0}});
  auto cs = critical_shifts(F, F);
  CHECK(cs.front() == 0);
  auto g = path_graph(1);
  auto w0 = single(g, cone_at(g, 0)), w1 = single(g, cone_at(g, 1));
  CHECK(critical_shifts(w0, w1) == std::vector<Rational>{0, 1});
  auto grid = shift_grid(k_at(0), k_at(3));
  CHECK(grid.a.front() == 0);
  CHECK(std::find(grid.b.begin(), grid.b.end(), Rational(3)) != grid.b.end());
}

TEST_CASE("distance_exact examples") {
  auto F = bars_complex({{Rational(0), Rational(2), 0}});
  auto same = distance_exact(F, F);
  CHECK(same.mode == DistanceResult::Mode::Exact);
  CHECK(same.upper == ExtValue(0));

  auto d = distance_exact(k_at(0), k_at(3));
  CHECK(d.lower == ExtValue(3));
  CHECK(d.upper == ExtValue(3));
  REQUIRE(d.witness);
  CHECK(replay(k_at(0), k_at(3), *d.witness).ok);

  auto g = path_graph(1);
  auto w0 = single(g, cone_at(g, 0)), w1 = single(g, cone_at(g, 1));
  auto dw = distance_exact(w0, w1);
  CHECK(dw.upper == ExtValue(2));
  CHECK(dw.mode == DistanceResult::Mode::Exact);

  CHECK(distance_exact(k_at(0), TwistedComplex(point_base())).upper.is_pos_inf());
}

TEST_CASE("distance_bounds examples") {
  auto F = bars_complex({{Rational(0), Rational(2), 0}});
  auto same = distance_bounds(F, F, {GraphPoint::vertex(0)});
  CHECK(same.lower == ExtValue(0));
  CHECK(same.upper == ExtValue(0));

  auto d = distance_bounds(k_at(0), k_at(3), {GraphPoint::vertex(0)});
  CHECK(d.lower == ExtValue(3));
  CHECK(d.upper == ExtValue(3));

  auto g = path_graph(2);
  auto c0 = single(g, cone_at(g, 0)), c1 = single(g, cone_at(g, 0, 1));
  std::vector<GraphPoint> vs{GraphPoint::vertex(0), GraphPoint::vertex(1), GraphPoint::vertex(2)};
  auto e = distance_bounds(c0, c1, vs);
  CHECK(e.lower == ExtValue(1));
  CHECK(e.upper == ExtValue(1));
  REQUIRE(e.witness);
  CHECK(replay(c0, c1, *e.witness).ok);

  // A seed is used as the starting upper bound.
  BoundsOptions opts;
  opts.seed = translation_certificate(c0, 1);
  opts.max_checks = 0;
  auto seeded = distance_bounds(c0, translate(c0, 1), vs, opts);
  CHECK(seeded.upper == ExtValue(1));
}

TEST_CASE("exact distance on the point base matches barcodes") {
  std::mt19937 rng(101);
  for (int k = 0; k < 30; ++k) {
    auto F = random_point_complex(rng, 8, 6), G = random_point_complex(rng, 8, 6);
    auto d = distance_exact(F, G);
    REQUIRE(d.mode == DistanceResult::Mode::Exact);
    auto bf = gabriel_decompose(F).barcode, bg = gabriel_decompose(G).barcode;
    CHECK(d.upper == interleaving_bottleneck(bf, bg));
    auto plain = bottleneck(bf, bg);
    if (plain.finite()) {
      CHECK(plain.value() <= d.upper.value());
      CHECK(d.upper.value() <= 2 * plain.value());
    }
    // Every grid point below the value is dominated by a recorded infeasible one.
    for (const auto& [a, b] : d.infeasible) CHECK_FALSE(feasible(F, G, a, b));
    if (d.upper.finite()) {
      auto grid = shift_grid(F, G);
      for (const auto& a : grid.a)
        for (const auto& b : grid.b) {
          if (!(a + b < d.upper.value())) continue;
          bool covered = false;
          for (const auto& [x, y] : d.infeasible) covered = covered || (a <= x && b <= y);
          CHECK(covered);
        }
    }
  }
}

TEST_CASE("monotonicity and the triangle inequality") {
  std::mt19937 rng(103);
  for (int k = 0; k < 25; ++k) {
    auto F = random_point_complex(rng, 6, 5), G = random_point_complex(rng, 6, 5),
         H = random_point_complex(rng, 6, 5);
    auto a = random_rational(rng, 0, 4, 2), b = random_rational(rng, 0, 4, 2);
    if (feasible(F, G, a, b)) {
      CHECK(feasible(F, G, a + frac(1, 2), b));
      CHECK(feasible(F, G, a, b + 1));
    }
    auto fg = distance_exact(F, G), gh = distance_exact(G, H), fh = distance_exact(F, H);
    CHECK(fg.upper == distance_exact(G, F).upper);
    if (fg.witness && gh.witness) {
      auto composite = compose(*fg.witness, *gh.witness);
      CHECK(replay(F, H, composite).ok);
      CHECK(fh.upper.value() <= composite.cost());
    }
  }
}

TEST_CASE("certificates survive restriction and stalks") {
  std::mt19937 rng(107);
  auto g = path_graph(2);
  for (int k = 0; k < 12; ++k) {
    auto F = random_graph_complex(rng, g, 2), G = random_graph_complex(rng, g, 2);
    auto d = distance_exact(F, G);
    REQUIRE_FALSE(d.hit_cap);
    for (const auto& s : d.stalks)
      if (s.interleaving.finite() && d.upper.finite()) CHECK(s.interleaving.value() <= d.upper.value());
    if (!d.witness) continue;
    ClosedSubset z(*g);
    z.add_interval(0, frac(1, 4), 1);
    z.add_vertex(2);
    auto fz = tensor_complex(F, z), gz = tensor_complex(G, z);
    CHECK(replay(fz.complex, gz.complex, restrict_certificate(fz, gz, *d.witness)).ok);
    auto x = random_point(rng, *g);
    auto sf = stalk_at(F, x), sg = stalk_at(G, x);
    CHECK(replay(sf.complex, sg.complex, stalk_certificate(sf, sg, *d.witness)).ok);
  }
}

TEST_CASE("wrapped translation") {
  auto g = path_graph(2);
  auto C = single(g, cone_at(g, 0, 2));
  auto w = wrapped_translate(C, frac(3, 2));
  CHECK(w.complex == translate(C, frac(3, 2)));
  CHECK(w.complex.gen(0).fn == cone_at(g, 0, frac(7, 2)));
  CHECK(wrapped_translate(C, 0).complex == C);
  CHECK(is_chain_map(C, w.complex, w.tau));
  auto sky = single(g, TameFunction::skyscraper(g, GraphPoint::vertex(1), 0));
  CHECK_THROWS_AS(wrapped_translate(sky, 1), Error);
  std::mt19937 rng(109);
  for (int k = 0; k < 20; ++k) {
    auto f = lipschitz_envelope(random_tame(rng, g, 3, true));
    auto L = single(g, f);
    auto c = random_rational(rng, 0, 3);
    CHECK(wrapped_translate(L, c).complex == translate(L, c));
  }
}

TEST_CASE("pruned search agrees with plain enumeration") {
  std::mt19937 rng(113);
  int compared = 0;
  for (int k = 0; k < 150; ++k) {
    auto F = random_point_complex(rng, 6, 5), G = random_point_complex(rng, 6, 5);
    auto grid = shift_grid(F, G);
    auto a = grid.a[rng() % grid.a.size()], b = grid.b[rng() % grid.b.size()];
    auto plain = check_interleaving(F, G, a, b, 1 << 14, Search::Exhaustive);
    if (plain.undecided()) continue;
    ++compared;
    auto pruned = check_interleaving(F, G, a, b);
    CHECK(plain.feasible() == pruned.feasible());
  }
  CHECK(compared > 100);
  auto g = path_graph(2);
  for (int k = 0; k < 60; ++k) {
    auto F = random_graph_complex(rng, g, 3), G = random_graph_complex(rng, g, 3);
    auto grid = shift_grid(F, G);
    auto a = grid.a[rng() % grid.a.size()], b = grid.b[rng() % grid.b.size()];
    auto plain = check_interleaving(F, G, a, b, 1 << 14, Search::Exhaustive);
    if (plain.undecided()) continue;
    CHECK(plain.feasible() == check_interleaving(F, G, a, b).feasible());
  }
}
