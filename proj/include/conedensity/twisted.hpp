#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conedensity/gf2.hpp"
#include "conedensity/tame.hpp"

namespace conedensity {

// Summand k_{Epi(fn)}[-deg].
struct Generator {
  TameFunction fn;
  int deg = 0;
};

struct Validation {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Checks the hom rule on every nonzero entry, d^2 = 0, and that every
// generator has a nonempty connected epigraph.
Validation validate(const GraphRef& graph, const std::vector<Generator>& gens, const gf2::Matrix& diff);

// Finite complex of epigraph generators. diff(i, j) = 1 means gens[j] maps to
// gens[i]; this needs deg_i = deg_j + 1 and fn_j <= fn_i.
class TwistedComplex {
 public:
  explicit TwistedComplex(GraphRef graph);
  // Throws InvalidStructure listing the first violations.
  TwistedComplex(GraphRef graph, std::vector<Generator> gens, gf2::Matrix diff);

  const GraphRef& graph() const { return graph_; }
  std::size_t size() const { return gens_.size(); }
  const std::vector<Generator>& gens() const { return gens_; }
  const Generator& gen(std::size_t i) const { return gens_.at(i); }
  const gf2::Matrix& diff() const { return diff_; }

  friend bool operator==(const TwistedComplex& a, const TwistedComplex& b);

 private:
  GraphRef graph_;
  std::vector<Generator> gens_;
  gf2::Matrix diff_;
};

// Shared single-vertex graph used for stalks and barcodes.
const GraphRef& point_base();

// Point-base complex from levels and degrees.
TwistedComplex point_complex(const std::vector<Rational>& levels, const std::vector<int>& degrees,
                             const gf2::Matrix& diff);

// Hom(from, to) is one-dimensional (in degree to.deg - from.deg) iff
// from.fn <= to.fn.
bool hom_rule(const Generator& from, const Generator& to);

// Maps are GF(2) matrices with rows indexed by target generators and columns
// by source generators. A map F -> T_c G has the same matrix as F -> G; only
// the allowed support depends on c.

// sup_difference(F_j, G_i) for every pair: entry (i, j) of a map F -> G is
// allowed at shift c iff this is <= c and the degrees match.
class Thresholds {
 public:
  Thresholds(const TwistedComplex& from, const TwistedComplex& to);
  const ExtValue& at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  bool allowed(std::size_t i, std::size_t j, int degree, const Rational& shift) const;
  // Finite nonnegative values, sorted and deduplicated.
  std::vector<Rational> critical_values() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<int> row_deg_, col_deg_;
  std::vector<ExtValue> values_;
};

// Basis of Hom^k(F, T_c G): allowed entries (i, j) with deg G_i - deg F_j = k.
struct HomSpace {
  std::size_t rows = 0, cols = 0;
  std::vector<std::pair<std::size_t, std::size_t>> basis;
  std::vector<long> index;  // rows * cols, -1 when not in the basis

  std::size_t dim() const { return basis.size(); }
  long find(std::size_t i, std::size_t j) const { return index[i * cols + j]; }
  gf2::Matrix to_matrix(const gf2::BitVec& x) const;
  // nullopt when the matrix has support outside the space.
  std::optional<gf2::BitVec> coordinates(const gf2::Matrix& m) const;
};

HomSpace hom_space(const Thresholds& thr, const TwistedComplex& F, const TwistedComplex& G, int degree,
                   const Rational& shift);
// Matrix of phi -> delta_G phi + phi delta_F from `from` (degree k) to `to` (degree k + 1).
gf2::Matrix hom_differential(const TwistedComplex& F, const TwistedComplex& G, const HomSpace& from,
                             const HomSpace& to);

struct HomComplex {
  int min_degree = 0;
  std::vector<HomSpace> spaces;         // degrees min_degree, min_degree + 1, ...
  std::vector<gf2::Matrix> d;           // d[k]: spaces[k] -> spaces[k + 1]
  std::vector<std::size_t> cohomology;  // dimension of H at each degree

  std::size_t dim_at(int degree) const;
  std::size_t cohomology_at(int degree) const;
};

HomComplex hom_complex(const TwistedComplex& F, const TwistedComplex& G, const Rational& shift = Rational(0));

// Every nonzero entry of phi is an allowed degree-k entry of a map F -> T_c G.
bool supported(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& phi, const Rational& shift,
               int degree = 0);
// delta_G phi + phi delta_F = 0.
bool commutes(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& phi);
bool is_chain_map(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& phi,
                  const Rational& shift = Rational(0));

// h in Hom^{-1}(F, T_c G) with delta_G h + h delta_F = phi, if one exists.
std::optional<gf2::Matrix> null_homotopy(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& phi,
                                         const Rational& shift = Rational(0));
bool is_null_homotopic(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& phi,
                       const Rational& shift = Rational(0));

// delta_G h + h delta_F
gf2::Matrix homotopy_boundary(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& h);

// Cone(phi) = F[1] (+) G with differential [[d_F, 0], [phi, d_G]]; source
// generators come first. phi must be a degree-0 chain map at shift 0.
struct Cone {
  TwistedComplex complex;
  gf2::Matrix inclusion;   // G -> Cone
  gf2::Matrix projection;  // Cone -> F[1]
};
Cone mapping_cone(const TwistedComplex& F, const TwistedComplex& G, const gf2::Matrix& phi);

TwistedComplex direct_sum(const std::vector<TwistedComplex>& parts);
gf2::Matrix block_diagonal(const std::vector<gf2::Matrix>& blocks);
// [k]: every degree drops by k.
TwistedComplex shift(const TwistedComplex& C, int k);
// T_c: every function raised by c.
TwistedComplex translate(const TwistedComplex& C, const Rational& c);
// Project every generator function through Pi_r. Throws EmptySheaf.
TwistedComplex project(const TwistedComplex& C, const Rational& slope = Rational(1));

// Cancels differential entries between generators with equal functions.
// project: C -> reduced, include: reduced -> C, homotopy on C, with
// project * include = 1, include * project + 1 = d h + h d, h * include = 0,
// project * h = 0, h * h = 0.
struct Reduction {
  TwistedComplex reduced;
  gf2::Matrix project;
  gf2::Matrix include;
  gf2::Matrix homotopy;
};
Reduction minimal_model(const TwistedComplex& C);

// Splits generators with disconnected epigraphs into their components.
TwistedComplex split_components(const GraphRef& graph, const std::vector<Generator>& gens, const gf2::Matrix& diff);

// split_components keeping, per new generator, the index it came from.
struct Split {
  TwistedComplex complex;
  std::vector<std::size_t> origin;
};
Split split_with_origin(const GraphRef& graph, const std::vector<Generator>& gens, const gf2::Matrix& diff);
// Carries a map between the unsplit complexes to the split ones: a source
// piece feeds every target piece whose region it contains.
gf2::Matrix split_map(const Split& from, const Split& to, const gf2::Matrix& phi);

// C tensor k_Z generator-wise, empty generators dropped, components split.
Split tensor_complex(const TwistedComplex& C, const ClosedSubset& z);

}  // namespace conedensity
