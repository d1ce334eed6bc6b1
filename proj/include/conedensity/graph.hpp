#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "conedensity/error.hpp"
#include "conedensity/rational.hpp"

namespace conedensity {

struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  Rational length;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class MetricGraph;

// A vertex, or a point strictly inside an edge at `offset` from edge.a.
class GraphPoint {
 public:
  static GraphPoint vertex(std::size_t v) { return GraphPoint(v, npos, Rational(0)); }
  // Offsets at 0 or at the edge length collapse to the endpoint vertex.
  static GraphPoint on_edge(const MetricGraph& g, std::size_t edge, const Rational& offset);

  bool is_vertex() const { return edge_ == npos; }
  std::size_t vertex_id() const { return vertex_; }
  std::size_t edge_id() const { return edge_; }
  const Rational& offset() const { return offset_; }

  friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
    return a.vertex_ == b.vertex_ && a.edge_ == b.edge_ && a.offset_ == b.offset_;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  GraphPoint(std::size_t v, std::size_t e, Rational t) : vertex_(v), edge_(e), offset_(std::move(t)) {}
  std::size_t vertex_;
  std::size_t edge_;
  Rational offset_;
};

// Finite connected weighted graph; parallel edges allowed, self-loops not.
// A single vertex with no edges models the point base.
class MetricGraph {
 public:
  MetricGraph(std::vector<std::string> vertex_names, std::vector<Edge> edges);
  static MetricGraph point(std::string name = "pt");

  std::size_t vertex_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  std::size_t vertex_index(const std::string& name) const;
  const std::vector<std::size_t>& incident_edges(std::size_t v) const { return incident_.at(v); }

  const Rational& vertex_distance(std::size_t u, std::size_t v) const { return dist_[u][v]; }
  // Distance from an arbitrary point to a vertex.
  Rational distance_to_vertex(const GraphPoint& p, std::size_t v) const;

  friend bool operator==(const MetricGraph& a, const MetricGraph& b);

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::vector<Rational>> dist_;
};

Rational geodesic_distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q);

// Result of splitting every edge into equal pieces of length <= mesh. Original
// vertices keep their indices; edge e of the input becomes the chain
// pieces[e][0..k-1], each oriented from the old edge.a side.
struct Subdivision {
  MetricGraph graph;
  std::vector<std::vector<std::size_t>> pieces;
  std::vector<Rational> piece_length;  // per input edge

  GraphPoint relocate(const GraphPoint& p) const;
};

Subdivision subdivide(const MetricGraph& g, const Rational& mesh);

// Closed subset of a graph: a vertex set plus closed intervals on edges.
// Intervals touching an endpoint imply that vertex is in the set.
class ClosedSubset {
 public:
  explicit ClosedSubset(const MetricGraph& g);
  static ClosedSubset whole(const MetricGraph& g);
  static ClosedSubset single_point(const MetricGraph& g, const GraphPoint& p);

  void add_vertex(std::size_t v);
  void add_interval(std::size_t edge, Rational lo, Rational hi);

  bool contains(const GraphPoint& p) const;
  bool empty() const;
  bool connected() const;
  const std::vector<bool>& vertices() const { return vertices_; }
  // Disjoint, sorted closed intervals per edge.
  const std::vector<std::pair<Rational, Rational>>& intervals(std::size_t edge) const {
    return intervals_.at(edge);
  }

  ClosedSubset intersect(const ClosedSubset& o) const;
  friend bool operator==(const ClosedSubset&, const ClosedSubset&) = default;

 private:
  std::vector<Edge> edges_;
  std::vector<bool> vertices_;
  std::vector<std::vector<std::pair<Rational, Rational>>> intervals_;
};

struct CechPiece {
  std::vector<std::size_t> index_set;  // J, sorted
  ClosedSubset region;
  GraphPoint center;                   // basepoint x_J with region inside its closed ball
  Rational radius;                     // max distance from center to the region
};

struct CechCover {
  std::vector<CechPiece> pieces;  // U_i, |J| = 1
  std::vector<CechPiece> nerve;   // nonempty U_J with |J| = 2
  Rational mesh;                  // max piece diameter
};

// Cover by closed half-stars: vertex v together with the closed half of every
// incident edge. Throws Error{CoverViolation} naming J when some U_J is
// disconnected or a triple intersection is nonempty.
CechCover closed_star_cover(const MetricGraph& g);

}  // namespace conedensity
