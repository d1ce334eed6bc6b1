#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conedensity/cone_calculus.hpp"
#include "conedensity/interleave.hpp"

namespace conedensity {

// Slope-1 cone level + d(., basepoint) in the given degree.
struct WGenerator {
  GraphPoint basepoint;
  Rational level;
  int degree = 0;
};

TameFunction w_function(const GraphRef& graph, const WGenerator& w);
// Complex on W generators with the given differential.
TwistedComplex w_complex(const GraphRef& graph, const std::vector<WGenerator>& gens, const gf2::Matrix& diff);

// The W generator fn is, if any: the minimum point and value, checked
// against the cone they determine.
std::optional<WGenerator> as_w_generator(const Generator& g);

// Least a + b between W(x, a) and W(y, b): 2d if |a - b| <= d, else
// |a - b| + d, with d = d(x, y).
Rational w_distance(const MetricGraph& g, const GraphPoint& x, const Rational& a, const GraphPoint& y,
                    const Rational& b);

// Two-step Cech tower of F over a cover: stage 0 is the sum of the pieces
// F (x) k_{U_i}, stage 1 the sum over pairwise intersections, both in
// degree shift -1 so that the tower total sits in F's degrees. The
// augmentation F -> total is checked stalkwise: at every sample point the
// stalk of its cone has an empty barcode.
struct CechTower {
  CechCover cover;
  std::vector<Split> pieces;    // per cover piece
  std::vector<Split> overlaps;  // per nerve element
  Tower tower;
  gf2::Matrix augmentation;
  std::vector<GraphPoint> checked;
};

// Vertices and edge midpoints.
std::vector<GraphPoint> sample_points(const MetricGraph& g);

// Throws InvalidStructure naming the first point where exactness fails.
CechTower cech_tower(const TwistedComplex& F, const CechCover& cover);

// The projected tower restricted to a spanning tree of the nerve, rooted at
// a cover piece, with a certificate F ~ total. The model's cones do not wrap
// around cycles, so cycle-closing intersections are left out; the
// certificate is augmentation / root projection with the tree contraction
// as homotopy. Needs every generator of F finite everywhere.
struct TreeTower {
  std::size_t root = 0;
  std::vector<std::size_t> overlaps;  // nerve indices kept, in nerve order
  std::vector<TwistedComplex> pieces;  // projected, per cover piece
  std::vector<TwistedComplex> kept;    // projected, per kept overlap
  Tower tower;
  InterleavingCertificate certificate;  // F ~ tower_total(tower)
};
TreeTower tree_tower(const TwistedComplex& F, const CechTower& cech);

// Pi(piece) against Pi(D), where D is the Gabriel tower of the stalk at x
// placed at x. The certificate passes through Pi(stalk at x) and costs at
// most 4 epsilon; the piece's finite region must lie within epsilon of x.
struct StalkReplacement {
  TwistedComplex projected{point_base()};  // Pi(piece)
  Barcode barcode;
  TwistedComplex replacement{point_base()};  // Pi(D), W generators at x
  std::vector<WGenerator> generators;
  InterleavingCertificate certificate;
};
StalkReplacement stalk_replace(const TwistedComplex& piece, const GraphPoint& x, const Rational& radius,
                               const Rational& epsilon);

struct DensityReport {
  TwistedComplex input{point_base()};  // F on the subdivided graph
  Rational epsilon{0};
  Rational mesh{0};
  CechCover cover;
  std::size_t root = 0;
  std::vector<std::size_t> tree_overlaps;
  std::vector<std::string> trace;
  TwistedComplex output{point_base()};
  std::vector<WGenerator> generators;  // one per output generator
  std::vector<std::size_t> layer_sizes;
  std::vector<Rational> layer_shifts;
  InterleavingCertificate certificate;  // input ~ output
  Rational cech_cost{0}, piece_cost{0}, transport_cost{0};
  Rational certified_bound{0};  // 10 * 8 * epsilon
  ExtValue measured_lower, measured_upper;

  std::size_t layers() const { return layer_sizes.size(); }
  bool within_bound() const { return certificate.cost() <= certified_bound; }
};

struct DensifyOptions {
  std::uint64_t cap = kDefaultCap;
  bool measure = true;  // run distance_bounds on the result
};

// Throws NonLipschitz unless every generator is 1-Lipschitz; other stage
// failures propagate with the stage named.
DensityReport densify(const TwistedComplex& F, const Rational& epsilon, const DensifyOptions& options = {});

// Replays the report's certificate and its structural claims. Returns the
// first problem found.
Replay check_report(const DensityReport& r);

struct ChainStep {
  WGenerator at;
  Rational step;  // w_distance from the previous element
};

struct SoloReport {
  struct Chain {
    std::size_t from = 0, to = 0;
    std::vector<ChainStep> steps;
    Rational longest{0};
    bool ok = false;  // every step below 2 epsilon
  };
  struct Item {
    std::string name;
    std::size_t layers = 0;
    Rational cost{0}, bound{0};
    bool replays = false;
    bool ok = false;  // replays, two layers, cost within bound
    std::optional<DensityReport> report;
  };
  Rational epsilon{0};
  std::vector<Chain> chains;
  std::vector<Item> items;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

struct CorpusEntry {
  std::string name;
  TwistedComplex sheaf;
};

// Pairwise chains between the family along geodesics with steps below
// 2 epsilon, and a densify run per corpus entry.
SoloReport solo_approximator_check(const std::vector<WGenerator>& family, const GraphRef& graph,
                                   const std::vector<CorpusEntry>& corpus, const Rational& epsilon,
                                   const DensifyOptions& options = {});

// Points along a shortest path from p to q, both ends included, with
// consecutive points at most `step` apart.
std::vector<GraphPoint> geodesic_points(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q,
                                        const Rational& step);

}  // namespace conedensity
