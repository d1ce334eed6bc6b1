#include <doctest.h>

#include <random>

#include "common.hpp"

using namespace testing_support;
using conedensity::Bar;

namespace {

Bar fin(long a, long b, int d = 0) { return {Rational(a), ExtValue(Rational(b)), d}; }
Bar inf(long a, int d = 0) { return {Rational(a), ExtValue::pos_inf(), d}; }

// dim H^degree of the stalk at t: generators with level <= t, quotient
// differential.
std::size_t betti_curve(const TwistedComplex& C, int degree, const Rational& t) {
  auto levels = point_levels(C);
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < C.size(); ++i)
    if (levels[i] <= t) alive.push_back(i);
  auto block = [&](int from) {
    std::vector<std::size_t> src, dst;
    for (auto i : alive) {
      if (C.gen(i).deg == from) src.push_back(i);
      if (C.gen(i).deg == from + 1) dst.push_back(i);
    }
    gf2::Matrix m(dst.size(), src.size());
    for (std::size_t r = 0; r < dst.size(); ++r)
      for (std::size_t c = 0; c < src.size(); ++c)
        if (C.diff().get(dst[r], src[c])) m.set(r, c);
    return std::pair{src.size(), gf2::rank(m)};
  };
  auto [n, out_rank] = block(degree);
  auto [unused, in_rank] = block(degree - 1);
  (void)unused;
  return n - out_rank - in_rank;
}

}  // namespace

TEST_CASE("barcode validation and order") {
  CHECK_THROWS_AS(Barcode({fin(2, 2)}), Error);
  CHECK_THROWS_AS(Barcode({fin(3, 1)}), Error);
  Barcode b({inf(3), fin(0, 2, 1), fin(0, 1)});
  REQUIRE(b.size() == 3);
  CHECK(b.bars()[0] == fin(0, 1));
  CHECK(b.bars()[1] == inf(3));
  CHECK(b.betti(0, 0) == 1);
  CHECK(b.betti(0, 1) == 0);
  CHECK(b.betti(0, 3) == 1);
  CHECK(b.betti(1, frac(3, 2)) == 1);
}

TEST_CASE("stalk complexes") {
  auto g = path_graph(2);
  TwistedComplex cone(g, {{cone_at(g, 0), 0}}, gf2::Matrix(1, 1));
  auto s = stalk_complex(cone, GraphPoint::vertex(1));
  REQUIRE(s.size() == 1);
  CHECK(gabriel_decompose(s).barcode == Barcode({inf(1)}));

  TwistedComplex sky(g, {{TameFunction::skyscraper(g, GraphPoint::vertex(0), 0), 0}}, gf2::Matrix(1, 1));
  CHECK(stalk_complex(sky, GraphPoint::vertex(1)).size() == 0);

  // 0 -> 0|U_0 (+) 0|U_1 -> 0|U_01 on P2 with half-star pieces.
  auto zero = TameFunction::constant(g, 0);
  ClosedSubset u0(*g), u1(*g), u01(*g);
  u0.add_interval(0, 0, 1);
  u0.add_interval(1, 0, frac(1, 2));
  u1.add_interval(1, frac(1, 2), 1);
  u01 = u0.intersect(u1);
  std::vector<Generator> gens{{zero, 0},
                              {tensor_indicator(zero, u0), 0},
                              {tensor_indicator(zero, u1), 0},
                              {tensor_indicator(zero, u01), 1}};
  gf2::Matrix d(4, 4);
  d.set(3, 1);
  d.set(3, 2);
  TwistedComplex cech(g, gens, d);
  std::mt19937 rng(11);
  for (int k = 0; k < 20; ++k) {
    auto x = random_point(rng, *g);
    auto B = gabriel_decompose(stalk_complex(cech, x)).barcode;
    // The stalk of the resolution alone is a resolution of k: one bar [0, inf)
    // in degree 0 from F plus one from the Cech part.
    CHECK(B == Barcode({inf(0), inf(0)}));
  }
}

TEST_CASE("gabriel examples") {
  CHECK(gabriel_decompose(point_complex({Rational(0)}, {0}, gf2::Matrix(1, 1))).barcode == Barcode({inf(0)}));

  auto k0 = point_complex({Rational(0)}, {0}, gf2::Matrix(1, 1));
  auto k1 = point_complex({Rational(1)}, {0}, gf2::Matrix(1, 1));
  gf2::Matrix rho(1, 1);
  rho.set(0, 0);
  auto cone = mapping_cone(k0, k1, rho);
  CHECK(gabriel_decompose(cone.complex).barcode == Barcode({fin(0, 1, -1)}));

  auto C = bars_complex({{Rational(0), std::nullopt, 0}, {Rational(2), Rational(5), 1}});
  auto id = mapping_cone(C, C, gf2::Matrix::identity(C.size()));
  auto empty = gabriel_decompose(id.complex);
  CHECK(empty.barcode.empty());
  CHECK(empty.tower.size() == 0);
}

TEST_CASE("cone towers") {
  auto g = path_graph(1);
  auto x = GraphPoint::on_edge(*g, 0, frac(1, 3));
  auto single = cone_tower_from_barcode(Barcode({inf(0)}), g, x);
  REQUIRE(single.size() == 1);
  CHECK(single.gen(0).fn == TameFunction::skyscraper(g, x, 0));

  auto two = cone_tower_from_barcode(Barcode({fin(0, 1)}), g, x);
  REQUIRE(two.size() == 2);
  CHECK(two.gen(0).deg == 0);
  CHECK(two.gen(1).deg == 1);
  CHECK(two.gen(1).fn == TameFunction::skyscraper(g, x, 1));
  CHECK(two.diff().get(1, 0));

  Barcode mixed({inf(0), fin(2, 5, 1)});
  auto tower = cone_tower_from_barcode(mixed);
  CHECK(tower.size() == 3);
  CHECK(gabriel_decompose(tower).barcode == mixed);

  // place_at keeps thresholds, so point certificates carry over.
  auto G = gabriel_decompose(tower);
  auto placed = place_at(tower, g, x);
  auto placed_tower = place_at(G.tower, g, x);
  CHECK(replay(placed, placed_tower, G.certificate).ok);
}

TEST_CASE("gabriel round trip on random barcodes") {
  std::mt19937 rng(5);
  for (int k = 0; k < 200; ++k) {
    auto B = to_barcode(random_bars(rng, 10));
    auto G = gabriel_decompose(cone_tower_from_barcode(B));
    CHECK(G.barcode == B);
  }
}

TEST_CASE("gabriel certificates, Betti curves and homotopy invariance") {
  std::mt19937 rng(17);
  for (int k = 0; k < 150; ++k) {
    auto bars = random_bars(rng, 6, 6);
    auto C = random_point_complex(rng, 12);
    auto G = gabriel_decompose(C);
    CHECK(replay(C, G.tower, G.certificate).ok);
    CHECK(G.certificate.a == 0);
    CHECK(G.certificate.b == 0);
    for (int t2 = -1; t2 <= 18; ++t2) {
      Rational t = frac(t2, 2);
      for (int d = -1; d <= 2; ++d) CHECK(G.barcode.betti(d, t) == betti_curve(C, d, t));
    }
    // A scrambled copy plus a contractible summand has the same bars.
    auto junk = bars_complex({{Rational(3), Rational(3), 0}});
    auto D = scramble(rng, direct_sum({C, junk}), 20);
    CHECK(gabriel_decompose(D).barcode == G.barcode);
  }
}

TEST_CASE("bottleneck examples") {
  Barcode B({inf(0), fin(1, 4), fin(2, 3, 1)});
  CHECK(bottleneck(B, B) == ExtValue(0));
  CHECK(bottleneck(Barcode({inf(0)}), Barcode({inf(3)})) == ExtValue(3));
  CHECK(bottleneck(Barcode({fin(0, 2)}), Barcode()) == ExtValue(1));
  CHECK(bottleneck(Barcode({inf(0)}), Barcode()).is_pos_inf());
  CHECK(bottleneck(Barcode({inf(0)}), Barcode({inf(0, 1)})).is_pos_inf());
  // Matching [0,10) to [1,10) costs 1; deleting both would cost 5.
  CHECK(bottleneck(Barcode({fin(0, 10), fin(20, 21)}), Barcode({fin(1, 10)})) == ExtValue(1));
  CHECK(bottleneck(Barcode({fin(0, 10), fin(20, 23)}), Barcode({fin(1, 10)})) == ExtValue(frac(3, 2)));
  CHECK(bottleneck(Barcode({fin(0, 10)}), Barcode({fin(1, 10), fin(4, 5)})) == ExtValue(1));
}

TEST_CASE("bottleneck is a metric on random barcodes") {
  std::mt19937 rng(23);
  for (int k = 0; k < 100; ++k) {
    auto fin_only = [&] {
      std::vector<Interval> bars;
      for (auto b : random_bars(rng, 5))
        if (b.death) bars.push_back(b);
      return to_barcode(bars);
    };
    auto A = fin_only(), B = fin_only(), C = fin_only();
    auto ab = bottleneck(A, B), bc = bottleneck(B, C), ac = bottleneck(A, C);
    CHECK(ab == bottleneck(B, A));
    CHECK(ac.value() <= ab.value() + bc.value());
    CHECK(bottleneck(A, A) == ExtValue(0));
    auto s = random_rational(rng, -2, 2);
    CHECK(bottleneck(A, shifted(A, s)).value() <= abs(s));
  }
}

TEST_CASE("interleaving bottleneck") {
  CHECK(interleaving_bottleneck(Barcode({inf(0)}), Barcode({inf(3)})) == ExtValue(3));
  CHECK(interleaving_bottleneck(Barcode({fin(0, 2)}), Barcode()) == ExtValue(2));
  CHECK(interleaving_bottleneck(Barcode({inf(0)}), Barcode()).is_pos_inf());
  std::mt19937 rng(29);
  for (int k = 0; k < 100; ++k) {
    auto A = to_barcode(random_bars(rng, 4, 6)), B = to_barcode(random_bars(rng, 4, 6));
    auto plain = bottleneck(A, B), gamma = interleaving_bottleneck(A, B);
    if (!plain.finite()) {
      CHECK(gamma.is_pos_inf());
      continue;
    }
    CHECK(plain.value() <= gamma.value());
    CHECK(gamma.value() <= 2 * plain.value());
    CHECK(gamma == interleaving_bottleneck(B, A));
  }
}

TEST_CASE("certificate algebra") {
  std::mt19937 rng(31);
  for (int k = 0; k < 40; ++k) {
    auto C = random_point_complex(rng, 8);
    auto G = gabriel_decompose(C);
    CHECK(replay(C, C, identity_certificate(C)).ok);
    CHECK(replay(G.tower, C, reverse(G.certificate)).ok);
    auto back = compose(G.certificate, reverse(G.certificate));
    CHECK(replay(C, C, back).ok);
    auto t = translation_certificate(C, frac(1, 2));
    CHECK(replay(C, translate(C, frac(1, 2)), t).ok);
    auto sum = sum_certificates({G.certificate, t});
    CHECK(replay(direct_sum({C, C}), direct_sum({G.tower, translate(C, frac(1, 2))}), sum).ok);
    // Tampering is caught.
    if (C.size() > 0) {
      auto bad = G.certificate;
      bad.h_source.flip(0, 0);
      CHECK_FALSE(replay(C, G.tower, bad).ok);
    }
  }
}
