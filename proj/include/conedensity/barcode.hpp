#pragma once

#include <compare>
#include <vector>

#include "conedensity/certificate.hpp"

namespace conedensity {

// [birth, death) in the given degree; death may be +inf.
struct Bar {
  Rational birth;
  ExtValue death = ExtValue::pos_inf();
  int degree = 0;

  bool infinite() const { return death.is_pos_inf(); }
  friend bool operator==(const Bar&, const Bar&) = default;
  friend std::strong_ordering operator<=>(const Bar& x, const Bar& y);
};

// Sorted multiset of bars. Throws InvalidInput when birth >= death.
class Barcode {
 public:
  Barcode() = default;
  explicit Barcode(std::vector<Bar> bars);

  const std::vector<Bar>& bars() const { return bars_; }
  std::size_t size() const { return bars_.size(); }
  bool empty() const { return bars_.empty(); }
  std::vector<int> degrees() const;
  // Number of bars of the degree containing t.
  std::size_t betti(int degree, const Rational& t) const;

  friend bool operator==(const Barcode&, const Barcode&) = default;

 private:
  std::vector<Bar> bars_;
};

// Generators with fn(x) < inf as constants on the point base; the
// differential is restricted to them. kept[i] is the source index.
struct Stalk {
  TwistedComplex complex;
  std::vector<std::size_t> kept;
};
Stalk stalk_at(const TwistedComplex& F, const GraphPoint& x);
TwistedComplex stalk_complex(const TwistedComplex& F, const GraphPoint& x);

// Levels of a point-base complex. Throws InvalidInput on any other base.
std::vector<Rational> point_levels(const TwistedComplex& C);

// Bars of a point-base complex with the tower they describe; the
// certificate witnesses C ~ tower at (0, 0) and its maps are a minimal
// model followed by a filtered change of basis.
struct GabrielDecomposition {
  Barcode barcode;
  TwistedComplex tower;
  InterleavingCertificate certificate;
};
GabrielDecomposition gabriel_decompose(const TwistedComplex& C);

// Skyscrapers at x: a bar [a, inf)[d] is (x, a) in degree d, a finite bar
// [a, b)[d] is (x, a) in degree d mapping to (x, b) in degree d + 1. Bars are
// laid out in barcode order. On the point base x is its vertex.
TwistedComplex cone_tower_from_barcode(const Barcode& B, const GraphRef& graph, const GraphPoint& x);
TwistedComplex cone_tower_from_barcode(const Barcode& B);

// Same matrices, each point-base generator placed as a skyscraper at x.
// Thresholds are unchanged, so point-base certificates carry over.
TwistedComplex place_at(const TwistedComplex& point_complex, const GraphRef& graph, const GraphPoint& x);

// Standard bottleneck distance; +inf when some degree has a different count
// of infinite bars.
ExtValue bottleneck(const Barcode& B1, const Barcode& B2);

// min over s of max(2 * bottleneck(B1, B2 + s), 2|s|), where B2 + s moves
// every endpoint by s. This is the least a + b of an (a, b)-interleaving
// between the towers of B1 and B2.
ExtValue interleaving_bottleneck(const Barcode& B1, const Barcode& B2);

// Every endpoint moved by s.
Barcode shifted(const Barcode& B, const Rational& s);

}  // namespace conedensity
