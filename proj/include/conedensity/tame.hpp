#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "conedensity/graph.hpp"
#include "conedensity/rational.hpp"

namespace conedensity {

using GraphRef = std::shared_ptr<const MetricGraph>;

// Open piece of an edge between two consecutive knots. When finite, the
// function is the affine interpolation of the two one-sided limits.
struct Segment {
  bool finite = false;
  Rational left;
  Rational right;

  static Segment infinite() { return {}; }
  static Segment linear(Rational l, Rational r) { return {true, std::move(l), std::move(r)}; }
  friend bool operator==(const Segment& a, const Segment& b) {
    return a.finite == b.finite && (!a.finite || (a.left == b.left && a.right == b.right));
  }
};

// Restriction of a tame function to one edge, parametrized by the offset from
// edge.a. Endpoint values live in the vertex table of the owning function.
struct EdgeProfile {
  std::vector<Rational> cuts;         // strictly increasing, inside (0, length)
  std::vector<ExtValue> knot_values;  // one per cut
  std::vector<Segment> segments;      // cuts.size() + 1

  friend bool operator==(const EdgeProfile&, const EdgeProfile&) = default;
};

// Affine function intercept + slope * t restricted to the closed range [lo, hi].
struct PartialLinear {
  Rational lo, hi, intercept, slope;
  Rational at(const Rational& t) const { return intercept + slope * t; }
};

struct Envelope {
  ExtValue at_start;
  ExtValue at_end;
  EdgeProfile profile;
};

enum class EnvelopeKernel { Serial, Parallel };

// Pointwise minimum of partial linear functions on [0, length] as a canonical
// lower semicontinuous profile (+inf where no piece is defined).
Envelope lower_envelope(const Rational& length, std::vector<PartialLinear> pieces);

// Lower semicontinuous piecewise-linear function on a metric graph with values
// in Q u {+inf}. Stored in canonical form, so == is equality of functions.
class TameFunction {
 public:
  // Validates lower semicontinuity and canonicalizes; throws InvalidInput.
  TameFunction(GraphRef graph, std::vector<ExtValue> vertex_values, std::vector<EdgeProfile> edges);

  static TameFunction constant(GraphRef graph, const Rational& c);
  static TameFunction infinite(GraphRef graph);
  static TameFunction skyscraper(GraphRef graph, const GraphPoint& x, const Rational& level);
  // level + r * d(., x)
  static TameFunction distance_cone(GraphRef graph, const GraphPoint& x, const Rational& level,
                                    const Rational& slope = Rational(1));

  const GraphRef& graph() const { return graph_; }
  const std::vector<ExtValue>& vertex_values() const { return vertex_values_; }
  const std::vector<EdgeProfile>& edge_profiles() const { return edges_; }

  ExtValue evaluate(const GraphPoint& p) const;
  bool identically_infinite() const;
  bool finite_everywhere() const;
  // Finite, continuous, and every segment slope bounded by r in absolute value.
  bool is_lipschitz(const Rational& r = Rational(1)) const;

  // Pieces whose pointwise minimum is this function on the given edge.
  std::vector<PartialLinear> edge_pieces(std::size_t edge) const;

  TameFunction translated(const Rational& c) const;
  // Re-expresses the function on a subdivision of its graph.
  TameFunction transported(const Subdivision& sub, GraphRef fine) const;

  friend bool operator==(const TameFunction& a, const TameFunction& b);

 private:
  GraphRef graph_;
  std::vector<ExtValue> vertex_values_;
  std::vector<EdgeProfile> edges_;
};

bool same_graph(const TameFunction& f, const TameFunction& g);

// f(x) <= g(x) for every x. Throws InvalidInput on graph mismatch.
bool pointwise_leq(const TameFunction& f, const TameFunction& g);

// sup_x (f(x) - g(x)) with inf - inf = -inf and finite - inf = -inf, so the
// result is the least c with f <= g + c (+inf when none, -inf when any c works).
ExtValue sup_difference(const TameFunction& f, const TameFunction& g);

TameFunction pointwise_min(const TameFunction& f, const TameFunction& g);

// f on Z, +inf off Z.
TameFunction tensor_indicator(const TameFunction& f, const ClosedSubset& z);

// x -> min over d(x,y) <= radius of f(y) + slope * d(x,y). A missing radius
// means unbounded (the Lipschitz envelope).
TameFunction inf_convolution(const TameFunction& f, const std::optional<Rational>& radius,
                             const Rational& slope, EnvelopeKernel kernel = EnvelopeKernel::Parallel);

// Restrictions of f to the connected components of {f < inf}, ordered by
// their first vertex or edge element.
std::vector<TameFunction> finite_components(const TameFunction& f);

// Largest slope-Lipschitz minorant. Throws EmptySheaf on f == +inf.
TameFunction lipschitz_envelope(const TameFunction& f, const Rational& slope = Rational(1));

}  // namespace conedensity
