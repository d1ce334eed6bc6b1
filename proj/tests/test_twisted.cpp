#include "doctest.h"

#include "common.hpp"

using namespace testing_support;
using gf2::Matrix;

namespace {

TwistedComplex single(const Rational& level, int deg = 0) {
  return point_complex({level}, {deg}, Matrix(1, 1));
}

TwistedComplex bar(const Rational& a, const Rational& b, int deg = 0) {
  return bars_complex({Interval{a, b, deg}});
}

}  // namespace

TEST_CASE("hom rule") {
  auto pt = point_base();
  CHECK(hom_rule({TameFunction::constant(pt, 0), 0}, {TameFunction::constant(pt, 3), 0}));
  CHECK(!hom_rule({TameFunction::constant(pt, 3), 0}, {TameFunction::constant(pt, 0), 0}));
  auto p2 = path_graph(1);
  auto s0 = TameFunction::skyscraper(p2, GraphPoint::vertex(0), 0);
  auto s1 = TameFunction::skyscraper(p2, GraphPoint::vertex(1), 0);
  CHECK(!hom_rule({s0, 0}, {s1, 0}));
  CHECK(!hom_rule({s1, 0}, {s0, 0}));
  CHECK(hom_rule({cone_at(p2, 0), 0}, {cone_at(p2, 1, 1), 0}));
}

TEST_CASE("validation") {
  CHECK(validate(point_base(), single(0).gens(), Matrix(1, 1)).ok());
  // [3, inf) -> [0, inf) violates containment
  Matrix d(2, 2);
  d.set(1, 0);
  auto gens = point_complex({3, 0}, {0, 1}, Matrix(2, 2)).gens();
  auto v = validate(point_base(), gens, d);
  REQUIRE(!v.ok());
  CHECK(v.problems[0].find("(1,0)") != std::string::npos);
  CHECK_THROWS_AS(TwistedComplex(point_base(), gens, d), conedensity::Error);
  // three-term complex with d^2 != 0
  Matrix d3(3, 3);
  d3.set(1, 0);
  d3.set(2, 1);
  auto g3 = point_complex({0, 1, 2}, {0, 1, 2}, Matrix(3, 3)).gens();
  auto v3 = validate(point_base(), g3, d3);
  REQUIRE(!v3.ok());
  CHECK(v3.problems[0].find("(2,0)") != std::string::npos);
  // disconnected epigraph
  auto p2 = path_graph(2);
  auto two = pointwise_min(TameFunction::skyscraper(p2, GraphPoint::vertex(0), 0),
                           TameFunction::skyscraper(p2, GraphPoint::vertex(2), 0));
  CHECK(!validate(p2, {{two, 0}}, Matrix(1, 1)).ok());
  auto split = split_components(p2, {{two, 0}}, Matrix(1, 1));
  CHECK(split.size() == 2);
}

TEST_CASE("hom complexes") {
  auto hc = hom_complex(single(0), single(0));
  CHECK(hc.cohomology_at(0) == 1);
  CHECK(hc.cohomology_at(1) == 0);
  auto hb = hom_complex(bar(0, 1), bar(0, 1));
  CHECK(hb.cohomology_at(0) == 1);
  CHECK(hb.cohomology_at(-1) == 0);
  CHECK(hb.cohomology_at(1) == 0);
  auto hs = hom_complex(single(0), shift(single(3), 1));
  CHECK(hs.dim_at(0) == 0);
  CHECK(hs.cohomology_at(0) == 0);
}

TEST_CASE("Euler characteristic of hom complexes") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    auto F = random_point_complex(rng, 6, 4);
    auto G = random_point_complex(rng, 6, 4);
    Rational c = random_rational(rng, 0, 3, 1);
    auto hc = hom_complex(F, G, c);
    long chi_spaces = 0, chi_h = 0;
    for (std::size_t k = 0; k < hc.spaces.size(); ++k) {
      long sign = ((hc.min_degree + static_cast<int>(k)) % 2 == 0) ? 1 : -1;
      chi_spaces += sign * static_cast<long>(hc.spaces[k].dim());
      chi_h += sign * static_cast<long>(hc.cohomology[k]);
    }
    CHECK(chi_spaces == chi_h);
    for (std::size_t k = 0; k + 1 < hc.d.size(); ++k) CHECK((hc.d[k + 1] * hc.d[k]).is_zero());
  }
}

TEST_CASE("mapping cones") {
  auto G = bar(0, 2);
  auto id = Matrix::identity(G.size());
  auto cone = mapping_cone(G, G, id);
  auto cid = Matrix::identity(cone.complex.size());
  CHECK(is_null_homotopic(cone.complex, cone.complex, cid));

  // the only map between two rays goes up: [0, inf) -> [1, inf)
  Matrix rho(1, 1);
  rho.set(0, 0);
  auto c = mapping_cone(single(0), single(1), rho).complex;
  CHECK(c.size() == 2);
  CHECK(c.gen(0).deg == -1);
  CHECK(c.diff().get(1, 0));
  CHECK_THROWS_AS(mapping_cone(single(1), single(0), rho), conedensity::Error);

  auto F = bar(1, 3);
  auto zero = mapping_cone(F, G, Matrix(G.size(), F.size())).complex;
  CHECK(zero == direct_sum({shift(F, 1), G}));
}

TEST_CASE("null homotopies") {
  auto F = single(0);
  auto h = null_homotopy(F, F, Matrix(1, 1));
  REQUIRE(h.has_value());
  CHECK(h->is_zero());
  CHECK(!is_null_homotopic(F, F, Matrix::identity(1)));
  auto B = bar(0, 1);
  CHECK(!is_null_homotopic(B, B, Matrix::identity(2)));
  CHECK(!is_null_homotopic(B, B, Matrix::identity(2), Rational(0)));
  // tau_1 kills the bar [0, 1)
  CHECK(is_null_homotopic(B, translate(B, 1), Matrix::identity(2), Rational(0)));
}

TEST_CASE("shift, translate and tau") {
  std::mt19937 rng(43);
  auto C = random_point_complex(rng, 6);
  CHECK(shift(shift(C, 1), -1) == C);
  CHECK(translate(C, 0) == C);
  CHECK(translate(translate(C, 1), 2) == translate(C, 3));
  auto I = Matrix::identity(C.size());
  CHECK(is_chain_map(C, translate(C, 2), I));
  CHECK(is_chain_map(translate(C, 2), translate(C, 5), I));
  CHECK(is_chain_map(C, translate(C, 5), I * I));
  CHECK(!supported(C, translate(C, -1), I, Rational(0)) == (C.size() > 0));
  CHECK(translate(single(2), 3) == single(5));
}

TEST_CASE("octahedral fiber sequence composite is null-homotopic") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto A = random_point_complex(rng, 4, 3);
    auto A2 = translate(A, 1);  // A -> T_1 A via tau, i.e. u = identity
    auto B = translate(A, 2);
    Matrix u = Matrix::identity(A.size());
    Matrix f = Matrix::identity(A.size());
    auto cu = mapping_cone(A, A2, u).complex;          // Cone(u: A -> A2)
    auto cfu = mapping_cone(A, B, f * u).complex;      // Cone(f u: A -> B)
    auto cf = mapping_cone(A2, B, f).complex;          // Cone(f: A2 -> B)
    const auto n = A.size();
    // Cone(u) -> Cone(fu): [[1, 0], [0, f]]; Cone(fu) -> Cone(f): [[u, 0], [0, 1]]
    Matrix p = block_diagonal({Matrix::identity(n), f});
    Matrix q = block_diagonal({u, Matrix::identity(n)});
    CHECK(is_chain_map(cu, cfu, p));
    CHECK(is_chain_map(cfu, cf, q));
    CHECK(is_null_homotopic(cu, cf, q * p));
  }
}

TEST_CASE("minimal models are strong deformation retracts") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 60; ++trial) {
    auto C = random_point_complex(rng, 10, 3);
    auto r = minimal_model(C);
    const auto& R = r.reduced;
    CHECK(is_chain_map(C, R, r.project));
    CHECK(is_chain_map(R, C, r.include));
    CHECK(supported(C, C, r.homotopy, Rational(0), -1));
    CHECK(r.project * r.include == Matrix::identity(R.size()));
    CHECK(r.include * r.project + Matrix::identity(C.size()) == homotopy_boundary(C, C, r.homotopy));
    CHECK((r.homotopy * r.include).is_zero());
    CHECK((r.project * r.homotopy).is_zero());
    CHECK((r.homotopy * r.homotopy).is_zero());
    for (std::size_t i = 0; i < R.size(); ++i)
      for (auto j : R.diff().row(i).ones()) CHECK(!(R.gen(i).fn == R.gen(j).fn));
  }
}
