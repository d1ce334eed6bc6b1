#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "conedensity/barcode.hpp"

namespace conedensity {

inline constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 20;

struct CheckResult {
  enum class Outcome { Feasible, Infeasible, UndecidedAtCap };
  Outcome outcome = Outcome::Infeasible;
  std::optional<InterleavingCertificate> certificate;
  std::uint64_t candidates = 0;  // u classes that had to be tried

  bool feasible() const { return outcome == Outcome::Feasible; }
  bool undecided() const { return outcome == Outcome::UndecidedAtCap; }
};

// Pruned: linearized and stalk-rank infeasibility tests plus a fixed-seed
// sample before enumerating. Exhaustive: enumeration only.
enum class Search { Pruned, Exhaustive };

// Decides whether an (a, b)-interleaving exists. Both complexes are first
// replaced by minimal models. The conditions [v u] = [1], [u v] = [1] are
// bilinear in hom cohomology classes: one side is enumerated (modulo
// classes pairing to zero with everything) and the other solved for. More
// than `cap` enumerated classes gives UndecidedAtCap. Homotopies come from
// one final linear solve per side.
CheckResult check_interleaving(const TwistedComplex& F, const TwistedComplex& G, const Rational& a,
                               const Rational& b, std::uint64_t cap = kDefaultCap, Search search = Search::Pruned);

// sup_difference over all generator pairs across and within F and G,
// clipped at 0, with 0 included.
std::vector<Rational> critical_shifts(const TwistedComplex& F, const TwistedComplex& G);

// Values of a (resp. b) at which some support pattern changes: cross
// thresholds, and internal thresholds minus the opposite cross thresholds.
// Minimal a + b is attained on this grid.
struct ShiftGrid {
  std::vector<Rational> a, b;
};
ShiftGrid shift_grid(const TwistedComplex& F, const TwistedComplex& G);

// Stalk evidence behind a lower bound.
struct StalkBound {
  GraphPoint point;
  Barcode source, target;
  ExtValue bottleneck;    // standard matching distance
  ExtValue interleaving;  // interleaving_bottleneck, the bound actually used
};

struct DistanceResult {
  enum class Mode { Exact, Bounds };
  Mode mode = Mode::Exact;
  ExtValue lower, upper;
  std::optional<InterleavingCertificate> witness;  // attains upper
  // Exact mode: grid points checked infeasible; every grid point with
  // a + b < upper lies below one of them.
  std::vector<std::pair<Rational, Rational>> infeasible;
  std::vector<StalkBound> stalks;
  bool hit_cap = false;
};

DistanceResult distance_exact(const TwistedComplex& F, const TwistedComplex& G, std::uint64_t cap = kDefaultCap,
                              Search search = Search::Pruned);

struct BoundsOptions {
  std::uint64_t cap = kDefaultCap;
  // Known certificate to start the upper bound from.
  std::optional<InterleavingCertificate> seed;
  // Skip exact checks whose linear systems would exceed this many unknowns.
  std::size_t max_unknowns = 4000;
  std::size_t max_checks = 24;
};

DistanceResult distance_bounds(const TwistedComplex& F, const TwistedComplex& G,
                               const std::vector<GraphPoint>& samples, const BoundsOptions& options = {});

// Generator-wise r-Lipschitz envelope then +c. Throws NonLipschitz unless
// every generator is already r-Lipschitz, in which case it equals
// translate(C, c). The tau map C -> result is the identity matrix.
struct Wrapped {
  TwistedComplex complex;
  gf2::Matrix tau;
};
Wrapped wrapped_translate(const TwistedComplex& C, const Rational& c, const Rational& r = Rational(1));

// Certificates carried through 1-Lipschitz functors, same (a, b).
InterleavingCertificate restrict_certificate(const Split& F, const Split& G, const InterleavingCertificate& cert);
InterleavingCertificate stalk_certificate(const Stalk& F, const Stalk& G, const InterleavingCertificate& cert);

}  // namespace conedensity
