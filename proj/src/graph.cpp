#include "conedensity/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>

namespace conedensity {

GraphPoint GraphPoint::on_edge(const MetricGraph& g, std::size_t edge, const Rational& offset) {
  const Edge& e = g.edge(edge);
  if (offset < 0 || offset > e.length)
    throw Error(ErrorKind::InvalidInput, "point offset outside edge " + std::to_string(edge));
  if (offset == 0) return vertex(e.a);
  if (offset == e.length) return vertex(e.b);
  return GraphPoint(npos, edge, offset);
}

MetricGraph::MetricGraph(std::vector<std::string> vertex_names, std::vector<Edge> edges)
    : names_(std::move(vertex_names)), edges_(std::move(edges)) {
  const std::size_t n = names_.size();
  if (n == 0) throw Error(ErrorKind::InvalidInput, "graph has no vertices");
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != n) throw Error(ErrorKind::InvalidInput, "duplicate vertex names");
  incident_.assign(n, {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.a >= n || e.b >= n) throw Error(ErrorKind::InvalidInput, "edge endpoint out of range");
    if (e.a == e.b) throw Error(ErrorKind::InvalidInput, "self-loop at " + names_[e.a]);
    if (e.length <= 0) throw Error(ErrorKind::InvalidInput, "non-positive edge length");
    incident_[e.a].push_back(i);
    incident_[e.b].push_back(i);
  }

  // Dijkstra from every vertex; graphs are desk-scale.
  dist_.assign(n, std::vector<Rational>(n));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::optional<Rational>> d(n);
    std::vector<bool> done(n, false);
    d[s] = Rational(0);
    for (std::size_t iter = 0; iter < n; ++iter) {
      std::size_t best = n;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && d[v] && (best == n || *d[v] < *d[best])) best = v;
      if (best == n) break;
      done[best] = true;
      for (auto ei : incident_[best]) {
        const Edge& e = edges_[ei];
        const std::size_t w = e.a == best ? e.b : e.a;
        Rational cand = *d[best] + e.length;
        if (!d[w] || cand < *d[w]) d[w] = cand;
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!d[v]) throw Error(ErrorKind::InvalidInput, "graph is disconnected");
      dist_[s][v] = *d[v];
    }
  }
}

MetricGraph MetricGraph::point(std::string name) {
  return MetricGraph({std::move(name)}, {});
}

std::size_t MetricGraph::vertex_index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorKind::InvalidInput, "unknown vertex '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

Rational MetricGraph::distance_to_vertex(const GraphPoint& p, std::size_t v) const {
  if (p.is_vertex()) return dist_[p.vertex_id()][v];
  const Edge& e = edges_[p.edge_id()];
  Rational via_a = p.offset() + dist_[e.a][v];
  Rational via_b = e.length - p.offset() + dist_[e.b][v];
  return via_a < via_b ? via_a : via_b;
}

bool operator==(const MetricGraph& a, const MetricGraph& b) {
  return a.names_ == b.names_ && a.edges_ == b.edges_;
}

Rational geodesic_distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
  if (q.is_vertex()) return g.distance_to_vertex(p, q.vertex_id());
  if (p.is_vertex()) return g.distance_to_vertex(q, p.vertex_id());
  const Edge& e = g.edge(q.edge_id());
  Rational best = q.offset() + g.distance_to_vertex(p, e.a);
  Rational other = e.length - q.offset() + g.distance_to_vertex(p, e.b);
  if (other < best) best = other;
  if (p.edge_id() == q.edge_id()) {
    Rational direct = abs(p.offset() - q.offset());
    if (direct < best) best = direct;
  }
  return best;
}

Subdivision subdivide(const MetricGraph& g, const Rational& mesh) {
  if (mesh <= 0) throw Error(ErrorKind::InvalidInput, "subdivision mesh must be positive");
  std::vector<std::string> names = g.vertex_names();
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> pieces(g.edge_count());
  std::vector<Rational> piece_length(g.edge_count());
  for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
    const Edge& e = g.edge(ei);
    Rational ratio = e.length / mesh;
    mpz_class k = ratio.get_num() / ratio.get_den();
    if (k * ratio.get_den() != ratio.get_num()) k += 1;  // ceiling
    const auto count = k.get_ui();
    piece_length[ei] = e.length / Rational(k);
    std::size_t prev = e.a;
    for (unsigned long i = 1; i <= count; ++i) {
      std::size_t next = e.b;
      if (i < count) {
        next = names.size();
        names.push_back("e" + std::to_string(ei) + "." + std::to_string(i));
      }
      pieces[ei].push_back(edges.size());
      edges.push_back(Edge{prev, next, piece_length[ei]});
      prev = next;
    }
  }
  return Subdivision{MetricGraph(std::move(names), std::move(edges)), std::move(pieces),
                     std::move(piece_length)};
}

GraphPoint Subdivision::relocate(const GraphPoint& p) const {
  if (p.is_vertex()) return p;
  const auto& chain = pieces.at(p.edge_id());
  const Rational& len = piece_length[p.edge_id()];
  Rational q = p.offset() / len;
  mpz_class idx = q.get_num() / q.get_den();  // floor, offset > 0
  auto i = idx.get_ui();
  if (i >= chain.size()) i = chain.size() - 1;
  return GraphPoint::on_edge(graph, chain[i], p.offset() - len * Rational(idx));
}

// ---------------------------------------------------------------------------

ClosedSubset::ClosedSubset(const MetricGraph& g)
    : edges_(g.edges()), vertices_(g.vertex_count(), false), intervals_(g.edge_count()) {}

ClosedSubset ClosedSubset::whole(const MetricGraph& g) {
  ClosedSubset s(g);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) s.add_vertex(v);
  for (std::size_t e = 0; e < g.edge_count(); ++e) s.add_interval(e, 0, g.edge(e).length);
  return s;
}

ClosedSubset ClosedSubset::single_point(const MetricGraph& g, const GraphPoint& p) {
  ClosedSubset s(g);
  if (p.is_vertex()) s.add_vertex(p.vertex_id());
  else s.add_interval(p.edge_id(), p.offset(), p.offset());
  return s;
}

void ClosedSubset::add_vertex(std::size_t v) {
  vertices_.at(v) = true;
  // keep the degenerate endpoint intervals implicit: vertices live in vertices_
}

void ClosedSubset::add_interval(std::size_t edge, Rational lo, Rational hi) {
  const Edge& e = edges_.at(edge);
  if (lo > hi || lo < 0 || hi > e.length)
    throw Error(ErrorKind::InvalidInput, "bad interval on edge " + std::to_string(edge));
  if (lo == 0) vertices_[e.a] = true;
  if (hi == e.length) vertices_[e.b] = true;
  auto& iv = intervals_[edge];
  iv.emplace_back(std::move(lo), std::move(hi));
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<Rational, Rational>> merged;
  for (auto& x : iv) {
    if (!merged.empty() && x.first <= merged.back().second) {
      if (x.second > merged.back().second) merged.back().second = x.second;
    } else {
      merged.push_back(x);
    }
  }
  iv = std::move(merged);
}

bool ClosedSubset::contains(const GraphPoint& p) const {
  if (p.is_vertex()) return vertices_.at(p.vertex_id());
  for (const auto& [lo, hi] : intervals_.at(p.edge_id()))
    if (lo <= p.offset() && p.offset() <= hi) return true;
  return false;
}

bool ClosedSubset::empty() const {
  if (std::any_of(vertices_.begin(), vertices_.end(), [](bool b) { return b; })) return false;
  return std::all_of(intervals_.begin(), intervals_.end(), [](const auto& v) { return v.empty(); });
}

bool ClosedSubset::connected() const {
  // union-find over vertices followed by intervals
  const std::size_t nv = vertices_.size();
  std::vector<std::size_t> node_of_vertex(nv, 0);
  std::vector<std::size_t> parent;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> members;
  for (std::size_t v = 0; v < nv; ++v) {
    node_of_vertex[v] = parent.size();
    parent.push_back(parent.size());
    if (vertices_[v]) members.push_back(node_of_vertex[v]);
  }
  for (std::size_t e = 0; e < intervals_.size(); ++e) {
    for (const auto& [lo, hi] : intervals_[e]) {
      const std::size_t id = parent.size();
      parent.push_back(id);
      members.push_back(id);
      if (lo == 0) parent[find(id)] = find(node_of_vertex[edges_[e].a]);
      if (hi == edges_[e].length) parent[find(id)] = find(node_of_vertex[edges_[e].b]);
    }
  }
  if (members.empty()) return true;
  const std::size_t root = find(members.front());
  return std::all_of(members.begin(), members.end(), [&](std::size_t m) { return find(m) == root; });
}

ClosedSubset ClosedSubset::intersect(const ClosedSubset& o) const {
  ClosedSubset out = *this;
  for (std::size_t v = 0; v < vertices_.size(); ++v) out.vertices_[v] = vertices_[v] && o.vertices_[v];
  for (std::size_t e = 0; e < intervals_.size(); ++e) {
    std::vector<std::pair<Rational, Rational>> res;
    for (const auto& a : intervals_[e])
      for (const auto& b : o.intervals_[e]) {
        const Rational& lo = a.first > b.first ? a.first : b.first;
        const Rational& hi = a.second < b.second ? a.second : b.second;
        if (lo <= hi) res.emplace_back(lo, hi);
      }
    std::sort(res.begin(), res.end());
    // endpoint-only pieces are already represented by the vertex flags
    std::erase_if(res, [&](const auto& iv) {
      return iv.first == iv.second && (iv.first == 0 || iv.first == edges_[e].length);
    });
    out.intervals_[e] = std::move(res);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string describe(const std::vector<std::size_t>& j) {
  std::string s = "{";
  for (std::size_t i = 0; i < j.size(); ++i) s += (i ? "," : "") + std::to_string(j[i]);
  return s + "}";
}

}  // namespace

CechCover closed_star_cover(const MetricGraph& g) {
  CechCover cover;
  const std::size_t n = g.vertex_count();
  cover.mesh = 0;
  for (std::size_t v = 0; v < n; ++v) {
    ClosedSubset star(g);
    star.add_vertex(v);
    Rational radius = 0, first = 0, second = 0;
    for (auto ei : g.incident_edges(v)) {
      const Edge& e = g.edge(ei);
      Rational half = e.length / 2;
      if (e.a == v) star.add_interval(ei, 0, half);
      else star.add_interval(ei, half, e.length);
      if (half > first) { second = first; first = half; }
      else if (half > second) second = half;
    }
    radius = first;
    Rational diameter = first + second;
    if (diameter > cover.mesh) cover.mesh = diameter;
    cover.pieces.push_back(CechPiece{{v}, std::move(star), GraphPoint::vertex(v), radius});
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ClosedSubset u = cover.pieces[i].region.intersect(cover.pieces[j].region);
      if (u.empty()) continue;
      if (!u.connected())
        throw Error(ErrorKind::CoverViolation, "disconnected intersection U_J for J=" + describe({i, j}));
      // the intersection of two half-stars is a single edge midpoint
      std::optional<GraphPoint> center;
      for (std::size_t e = 0; e < g.edge_count() && !center; ++e)
        if (!u.intervals(e).empty()) center = GraphPoint::on_edge(g, e, u.intervals(e).front().first);
      if (!center)
        throw Error(ErrorKind::CoverViolation, "degenerate intersection U_J for J=" + describe({i, j}));
      cover.nerve.push_back(CechPiece{{i, j}, std::move(u), *center, Rational(0)});
    }

  // triples: any point lies in at most two half-stars unless edges overlap
  for (std::size_t a = 0; a < cover.nerve.size(); ++a)
    for (std::size_t k = 0; k < n; ++k) {
      const auto& J = cover.nerve[a].index_set;
      if (k == J[0] || k == J[1]) continue;
      if (!cover.nerve[a].region.intersect(cover.pieces[k].region).empty()) {
        std::vector<std::size_t> triple{J[0], J[1], k};
        std::sort(triple.begin(), triple.end());
        throw Error(ErrorKind::CoverViolation, "nonempty triple intersection for J=" + describe(triple));
      }
    }
  return cover;
}

}  // namespace conedensity
