#include "conedensity/tame.hpp"

#include <algorithm>

namespace conedensity {

namespace {

const Rational& rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
const Rational& rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational seg_lo(const EdgeProfile& p, std::size_t i) { return i == 0 ? Rational(0) : p.cuts[i - 1]; }
Rational seg_hi(const EdgeProfile& p, const Rational& len, std::size_t i) {
  return i == p.cuts.size() ? len : p.cuts[i];
}

Rational interpolate(const Segment& s, const Rational& lo, const Rational& hi, const Rational& t) {
  return s.left + (s.right - s.left) * (t - lo) / (hi - lo);
}

// t strictly inside (0, len)
ExtValue eval_profile(const EdgeProfile& p, const Rational& len, const Rational& t) {
  auto it = std::lower_bound(p.cuts.begin(), p.cuts.end(), t);
  auto idx = static_cast<std::size_t>(it - p.cuts.begin());
  if (it != p.cuts.end() && *it == t) return p.knot_values[idx];
  const Segment& s = p.segments[idx];
  if (!s.finite) return ExtValue::pos_inf();
  return ExtValue(interpolate(s, seg_lo(p, idx), seg_hi(p, len, idx), t));
}

// One-sided limits at lo and hi of the function restricted to (lo, hi), which
// lies inside a single segment. nullopt means +inf there.
std::optional<std::pair<Rational, Rational>> limits_on(const EdgeProfile& p, const Rational& len,
                                                       const Rational& lo, const Rational& hi) {
  auto it = std::upper_bound(p.cuts.begin(), p.cuts.end(), lo);
  auto idx = static_cast<std::size_t>(it - p.cuts.begin());
  const Segment& s = p.segments[idx];
  if (!s.finite) return std::nullopt;
  Rational a = seg_lo(p, idx), b = seg_hi(p, len, idx);
  return std::make_pair(interpolate(s, a, b, lo), interpolate(s, a, b, hi));
}

Rational slope_of(const Segment& s, const Rational& lo, const Rational& hi) {
  return (s.right - s.left) / (hi - lo);
}

EdgeProfile canonicalize(const EdgeProfile& in, const Rational& len) {
  EdgeProfile out;
  out.segments.push_back(in.segments.front());
  for (std::size_t i = 0; i < in.cuts.size(); ++i) {
    const Segment& next = in.segments[i + 1];
    const Segment& prev = out.segments.back();
    const Rational prev_lo = out.cuts.empty() ? Rational(0) : out.cuts.back();
    const Rational& c = in.cuts[i];
    const Rational next_hi = i + 1 < in.cuts.size() ? in.cuts[i + 1] : len;
    const ExtValue& v = in.knot_values[i];
    bool merge = false;
    if (!prev.finite && !next.finite) {
      merge = v.is_pos_inf();
    } else if (prev.finite && next.finite && v.finite()) {
      merge = v.value() == prev.right && prev.right == next.left &&
              slope_of(prev, prev_lo, c) == slope_of(next, c, next_hi);
    }
    if (merge) {
      if (prev.finite) out.segments.back() = Segment::linear(prev.left, next.right);
    } else {
      out.cuts.push_back(c);
      out.knot_values.push_back(v);
      out.segments.push_back(next);
    }
  }
  return out;
}

ExtValue difference(const ExtValue& a, const ExtValue& b) {
  if (a.is_pos_inf()) return b.is_pos_inf() ? ExtValue::neg_inf() : ExtValue::pos_inf();
  if (b.is_pos_inf()) return ExtValue::neg_inf();
  return ExtValue(Rational(a.value() - b.value()));
}

void require_same_graph(const TameFunction& f, const TameFunction& g) {
  if (!same_graph(f, g)) throw Error(ErrorKind::InvalidInput, "tame functions live on different graphs");
}

std::vector<Rational> merged_cuts(const EdgeProfile& a, const EdgeProfile& b) {
  std::vector<Rational> pts;
  std::merge(a.cuts.begin(), a.cuts.end(), b.cuts.begin(), b.cuts.end(), std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Restrict {t : u + w t >= 0} to [lo, hi]; false when empty.
bool clip_halfline(const Rational& u, const Rational& w, Rational& lo, Rational& hi) {
  if (w == 0) return u >= 0 && lo <= hi;
  Rational root = -u / w;
  if (w > 0) { if (root > lo) lo = root; }
  else { if (root < hi) hi = root; }
  return lo <= hi;
}

void sweep_interval(const Rational& x0, const Rational& x1, const std::vector<const PartialLinear*>& active,
                    std::vector<Rational>& cuts, std::vector<ExtValue>& knots,
                    std::vector<Segment>& segments) {
  const PartialLinear* cur = nullptr;
  Rational best_val;
  for (const auto* p : active) {
    Rational v = p->at(x0);
    if (!cur || v < best_val || (v == best_val && p->slope < cur->slope)) {
      cur = p;
      best_val = v;
    }
  }
  Rational x = x0;
  while (true) {
    const PartialLinear* next = nullptr;
    Rational next_t = x1;
    for (const auto* p : active) {
      if (p->slope >= cur->slope) continue;
      Rational t = (p->intercept - cur->intercept) / (cur->slope - p->slope);
      if (t <= x || t > next_t) continue;
      if (t < next_t || !next || p->slope < next->slope) {
        if (t == x1) continue;
        next = p;
        next_t = t;
      }
    }
    if (!next) break;
    segments.push_back(Segment::linear(cur->at(x), cur->at(next_t)));
    cuts.push_back(next_t);
    knots.emplace_back(cur->at(next_t));
    cur = next;
    x = next_t;
  }
  segments.push_back(Segment::linear(cur->at(x), cur->at(x1)));
}

}  // namespace

Envelope lower_envelope(const Rational& length, std::vector<PartialLinear> pieces) {
  std::vector<PartialLinear> clipped;
  clipped.reserve(pieces.size());
  for (auto& p : pieces) {
    if (p.lo < 0) p.lo = 0;
    if (p.hi > length) p.hi = length;
    if (p.lo <= p.hi) clipped.push_back(std::move(p));
  }
  std::vector<Rational> pts{Rational(0), length};
  for (const auto& p : clipped) {
    pts.push_back(p.lo);
    pts.push_back(p.hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto value_at = [&](const Rational& b) {
    ExtValue best = ExtValue::pos_inf();
    for (const auto& p : clipped)
      if (p.lo <= b && b <= p.hi) {
        ExtValue v(p.at(b));
        if (v < best) best = std::move(v);
      }
    return best;
  };

  Envelope out;
  out.at_start = value_at(pts.front());
  out.at_end = value_at(pts.back());
  EdgeProfile raw;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Rational& x0 = pts[i];
    const Rational& x1 = pts[i + 1];
    if (i > 0) {
      raw.cuts.push_back(x0);
      raw.knot_values.push_back(value_at(x0));
    }
    std::vector<const PartialLinear*> active;
    for (const auto& p : clipped)
      if (p.lo <= x0 && p.hi >= x1) active.push_back(&p);
    if (active.empty()) {
      raw.segments.push_back(Segment::infinite());
      continue;
    }
    sweep_interval(x0, x1, active, raw.cuts, raw.knot_values, raw.segments);
  }
  out.profile = canonicalize(raw, length);
  return out;
}

// ---------------------------------------------------------------------------

TameFunction::TameFunction(GraphRef graph, std::vector<ExtValue> vertex_values, std::vector<EdgeProfile> edges)
    : graph_(std::move(graph)), vertex_values_(std::move(vertex_values)), edges_(std::move(edges)) {
  const MetricGraph& g = *graph_;
  if (vertex_values_.size() != g.vertex_count() || edges_.size() != g.edge_count())
    throw Error(ErrorKind::InvalidInput, "tame function does not match its graph");
  for (const auto& v : vertex_values_)
    if (v.is_neg_inf()) throw Error(ErrorKind::InvalidInput, "tame function takes the value -inf");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto& p = edges_[e];
    const Rational& len = g.edge(e).length;
    const std::string where = "edge " + std::to_string(e);
    if (p.segments.empty() && p.cuts.empty()) p.segments.push_back(Segment::infinite());
    if (p.knot_values.size() != p.cuts.size() || p.segments.size() != p.cuts.size() + 1)
      throw Error(ErrorKind::InvalidInput, where + ": knot/segment count mismatch");
    for (std::size_t i = 0; i < p.cuts.size(); ++i) {
      if (p.cuts[i] <= 0 || p.cuts[i] >= len || (i > 0 && p.cuts[i] <= p.cuts[i - 1]))
        throw Error(ErrorKind::InvalidInput, where + ": knots must increase strictly inside the edge");
      if (p.knot_values[i].is_neg_inf()) throw Error(ErrorKind::InvalidInput, where + ": -inf knot");
    }
    // lower semicontinuity: every point value is at most the adjacent limits
    auto check = [&](const ExtValue& v, const Segment& s, bool use_left) {
      if (!s.finite) return;
      if (ExtValue(use_left ? s.left : s.right) < v)
        throw Error(ErrorKind::InvalidInput, where + ": not lower semicontinuous");
    };
    check(vertex_values_[g.edge(e).a], p.segments.front(), true);
    check(vertex_values_[g.edge(e).b], p.segments.back(), false);
    for (std::size_t i = 0; i < p.cuts.size(); ++i) {
      check(p.knot_values[i], p.segments[i], false);
      check(p.knot_values[i], p.segments[i + 1], true);
    }
    p = canonicalize(p, len);
  }
}

TameFunction TameFunction::constant(GraphRef graph, const Rational& c) {
  const auto n = graph->vertex_count();
  std::vector<EdgeProfile> edges(graph->edge_count());
  for (auto& p : edges) p.segments = {Segment::linear(c, c)};
  return TameFunction(std::move(graph), std::vector<ExtValue>(n, ExtValue(c)), std::move(edges));
}

TameFunction TameFunction::infinite(GraphRef graph) {
  const auto n = graph->vertex_count();
  std::vector<EdgeProfile> edges(graph->edge_count());
  for (auto& p : edges) p.segments = {Segment::infinite()};
  return TameFunction(std::move(graph), std::vector<ExtValue>(n, ExtValue::pos_inf()), std::move(edges));
}

TameFunction TameFunction::skyscraper(GraphRef graph, const GraphPoint& x, const Rational& level) {
  std::vector<ExtValue> values(graph->vertex_count(), ExtValue::pos_inf());
  std::vector<EdgeProfile> edges(graph->edge_count());
  for (auto& p : edges) p.segments = {Segment::infinite()};
  if (x.is_vertex()) {
    values.at(x.vertex_id()) = ExtValue(level);
  } else {
    auto& p = edges.at(x.edge_id());
    p.cuts = {x.offset()};
    p.knot_values = {ExtValue(level)};
    p.segments = {Segment::infinite(), Segment::infinite()};
  }
  return TameFunction(std::move(graph), std::move(values), std::move(edges));
}

TameFunction TameFunction::distance_cone(GraphRef graph, const GraphPoint& x, const Rational& level,
                                         const Rational& slope) {
  return inf_convolution(skyscraper(std::move(graph), x, level), std::nullopt, slope);
}

ExtValue TameFunction::evaluate(const GraphPoint& p) const {
  if (p.is_vertex()) return vertex_values_.at(p.vertex_id());
  return eval_profile(edges_.at(p.edge_id()), graph_->edge(p.edge_id()).length, p.offset());
}

bool TameFunction::identically_infinite() const {
  for (const auto& v : vertex_values_)
    if (v.finite()) return false;
  for (const auto& p : edges_) {
    for (const auto& k : p.knot_values)
      if (k.finite()) return false;
    for (const auto& s : p.segments)
      if (s.finite) return false;
  }
  return true;
}

bool TameFunction::finite_everywhere() const {
  for (const auto& v : vertex_values_)
    if (!v.finite()) return false;
  for (const auto& p : edges_) {
    for (const auto& k : p.knot_values)
      if (!k.finite()) return false;
    for (const auto& s : p.segments)
      if (!s.finite) return false;
  }
  return true;
}

bool TameFunction::is_lipschitz(const Rational& r) const {
  if (!finite_everywhere()) return false;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& p = edges_[e];
    const Edge& edge = graph_->edge(e);
    if (vertex_values_[edge.a].value() != p.segments.front().left) return false;
    if (vertex_values_[edge.b].value() != p.segments.back().right) return false;
    for (std::size_t i = 0; i < p.cuts.size(); ++i) {
      const Rational& v = p.knot_values[i].value();
      if (v != p.segments[i].right || v != p.segments[i + 1].left) return false;
    }
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
      Rational width = seg_hi(p, edge.length, i) - seg_lo(p, i);
      if (abs(p.segments[i].right - p.segments[i].left) > r * width) return false;
    }
  }
  return true;
}

std::vector<PartialLinear> TameFunction::edge_pieces(std::size_t e) const {
  const Edge& edge = graph_->edge(e);
  const auto& p = edges_.at(e);
  std::vector<PartialLinear> out;
  auto point = [&](const Rational& t, const ExtValue& v) {
    if (v.finite()) out.push_back(PartialLinear{t, t, v.value(), Rational(0)});
  };
  point(Rational(0), vertex_values_[edge.a]);
  point(edge.length, vertex_values_[edge.b]);
  for (std::size_t i = 0; i < p.cuts.size(); ++i) point(p.cuts[i], p.knot_values[i]);
  for (std::size_t i = 0; i < p.segments.size(); ++i) {
    const Segment& s = p.segments[i];
    if (!s.finite) continue;
    Rational lo = seg_lo(p, i), hi = seg_hi(p, edge.length, i);
    Rational slope = slope_of(s, lo, hi);
    out.push_back(PartialLinear{lo, hi, s.left - slope * lo, slope});
  }
  return out;
}

TameFunction TameFunction::translated(const Rational& c) const {
  std::vector<ExtValue> values;
  values.reserve(vertex_values_.size());
  for (const auto& v : vertex_values_) values.push_back(v + c);
  std::vector<EdgeProfile> edges = edges_;
  for (auto& p : edges) {
    for (auto& k : p.knot_values) k = k + c;
    for (auto& s : p.segments)
      if (s.finite) {
        s.left += c;
        s.right += c;
      }
  }
  return TameFunction(graph_, std::move(values), std::move(edges));
}

TameFunction TameFunction::transported(const Subdivision& sub, GraphRef fine) const {
  const MetricGraph& g = *graph_;
  std::vector<ExtValue> values(fine->vertex_count(), ExtValue::pos_inf());
  std::vector<EdgeProfile> edges(fine->edge_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) values[v] = vertex_values_[v];
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto pieces = edge_pieces(e);
    const Rational& pl = sub.piece_length[e];
    const auto& chain = sub.pieces[e];
    for (std::size_t j = 0; j < chain.size(); ++j) {
      Rational off = pl * Rational(static_cast<long>(j));
      std::vector<PartialLinear> shifted;
      for (const auto& p : pieces) {
        if (p.hi < off || p.lo > off + pl) continue;
        shifted.push_back(PartialLinear{p.lo - off, p.hi - off, p.intercept + p.slope * off, p.slope});
      }
      edges[chain[j]] = lower_envelope(pl, std::move(shifted)).profile;
      if (j > 0) values[fine->edge(chain[j]).a] = eval_profile(edges_[e], g.edge(e).length, off);
    }
  }
  return TameFunction(std::move(fine), std::move(values), std::move(edges));
}

bool operator==(const TameFunction& a, const TameFunction& b) {
  return same_graph(a, b) && a.vertex_values_ == b.vertex_values_ && a.edges_ == b.edges_;
}

bool same_graph(const TameFunction& f, const TameFunction& g) {
  return f.graph() == g.graph() || *f.graph() == *g.graph();
}

// ---------------------------------------------------------------------------

ExtValue sup_difference(const TameFunction& f, const TameFunction& g) {
  require_same_graph(f, g);
  const MetricGraph& graph = *f.graph();
  ExtValue best = ExtValue::neg_inf();
  auto consider = [&](const ExtValue& d) {
    if (best < d) best = d;
  };
  for (std::size_t v = 0; v < graph.vertex_count(); ++v)
    consider(difference(f.vertex_values()[v], g.vertex_values()[v]));
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    if (best.is_pos_inf()) break;
    const auto& pf = f.edge_profiles()[e];
    const auto& pg = g.edge_profiles()[e];
    const Rational& len = graph.edge(e).length;
    auto pts = merged_cuts(pf, pg);
    for (const auto& t : pts) consider(difference(eval_profile(pf, len, t), eval_profile(pg, len, t)));
    Rational lo = 0;
    for (std::size_t i = 0; i <= pts.size(); ++i) {
      Rational hi = i < pts.size() ? pts[i] : len;
      auto lf = limits_on(pf, len, lo, hi);
      auto lg = limits_on(pg, len, lo, hi);
      if (!lf) consider(lg ? ExtValue::pos_inf() : ExtValue::neg_inf());
      else if (lg) {
        consider(ExtValue(Rational(lf->first - lg->first)));
        consider(ExtValue(Rational(lf->second - lg->second)));
      }
      lo = hi;
    }
  }
  return best;
}

bool pointwise_leq(const TameFunction& f, const TameFunction& g) {
  return sup_difference(f, g) <= ExtValue(0);
}

TameFunction pointwise_min(const TameFunction& f, const TameFunction& g) {
  require_same_graph(f, g);
  const MetricGraph& graph = *f.graph();
  std::vector<ExtValue> values;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v)
    values.push_back(min(f.vertex_values()[v], g.vertex_values()[v]));
  std::vector<EdgeProfile> edges;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    auto pieces = f.edge_pieces(e);
    auto more = g.edge_pieces(e);
    pieces.insert(pieces.end(), more.begin(), more.end());
    edges.push_back(lower_envelope(graph.edge(e).length, std::move(pieces)).profile);
  }
  return TameFunction(f.graph(), std::move(values), std::move(edges));
}

TameFunction tensor_indicator(const TameFunction& f, const ClosedSubset& z) {
  const MetricGraph& graph = *f.graph();
  std::vector<ExtValue> values;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v)
    values.push_back(z.vertices().at(v) ? f.vertex_values()[v] : ExtValue::pos_inf());
  std::vector<EdgeProfile> edges;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    std::vector<PartialLinear> pieces;
    for (const auto& p : f.edge_pieces(e))
      for (const auto& [lo, hi] : z.intervals(e)) {
        PartialLinear q = p;
        q.lo = rmax(p.lo, lo);
        q.hi = rmin(p.hi, hi);
        if (q.lo <= q.hi) pieces.push_back(std::move(q));
      }
    edges.push_back(lower_envelope(graph.edge(e).length, std::move(pieces)).profile);
  }
  return TameFunction(f.graph(), std::move(values), std::move(edges));
}

// ---------------------------------------------------------------------------

namespace {

struct PointSource {
  GraphPoint at;
  Rational value;
};

struct SegmentSource {
  std::size_t edge;
  Rational lo, hi, left, right;
};

struct Route {
  // length = t_coef * t + tau_coef * tau + constant
  int t_coef;
  int tau_coef;
  Rational constant;
  int direct;  // 0: no side condition; +1: tau >= t; -1: tau <= t
};

void point_source_pieces(const MetricGraph& g, std::size_t e, const PointSource& src,
                         const std::optional<Rational>& radius, const Rational& slope,
                         std::vector<PartialLinear>& out) {
  const Edge& edge = g.edge(e);
  auto emit = [&](int t_coef, const Rational& constant, Rational lo, Rational hi) {
    if (radius && !clip_halfline(*radius - constant, Rational(-t_coef), lo, hi)) return;
    if (lo > hi) return;
    out.push_back(PartialLinear{std::move(lo), std::move(hi), src.value + slope * constant,
                                slope * Rational(t_coef)});
  };
  emit(+1, g.distance_to_vertex(src.at, edge.a), Rational(0), edge.length);
  emit(-1, edge.length + g.distance_to_vertex(src.at, edge.b), Rational(0), edge.length);
  if (!src.at.is_vertex() && src.at.edge_id() == e) {
    const Rational& t0 = src.at.offset();
    emit(-1, t0, Rational(0), t0);
    emit(+1, -t0, t0, edge.length);
  }
}

void segment_source_pieces(const MetricGraph& g, std::size_t e, const SegmentSource& src,
                           const std::optional<Rational>& radius, const Rational& slope,
                           std::vector<PartialLinear>& out) {
  const Edge& target = g.edge(e);
  const Edge& source = g.edge(src.edge);
  const Rational sigma = (src.right - src.left) / (src.hi - src.lo);
  if (src.edge == e) {
    // the target point itself lies on the source segment
    out.push_back(PartialLinear{src.lo, src.hi, src.left - sigma * src.lo, sigma});
  }
  if (!radius) return;  // concavity: only endpoints and the point itself can win

  std::vector<Route> routes;
  const std::size_t exits[2] = {target.a, target.b};
  const std::size_t entries[2] = {source.a, source.b};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Rational c = g.vertex_distance(exits[i], entries[j]);
      if (i == 1) c += target.length;
      if (j == 1) c += source.length;
      routes.push_back(Route{i == 0 ? 1 : -1, j == 0 ? 1 : -1, c, 0});
    }
  if (src.edge == e) {
    routes.push_back(Route{-1, 1, Rational(0), +1});
    routes.push_back(Route{1, -1, Rational(0), -1});
  }
  const Rational& s = *radius;
  for (const auto& r : routes) {
    // tau(t) on the sphere of radius s: tau = p + q t
    const Rational p = Rational(r.tau_coef) * (s - r.constant);
    const Rational q = Rational(-r.tau_coef * r.t_coef);
    Rational lo = 0, hi = target.length;
    if (!clip_halfline(p - src.lo, q, lo, hi)) continue;
    if (!clip_halfline(src.hi - p, -q, lo, hi)) continue;
    if (r.direct == 1 && !clip_halfline(p, q - 1, lo, hi)) continue;
    if (r.direct == -1 && !clip_halfline(-p, 1 - q, lo, hi)) continue;
    out.push_back(PartialLinear{lo, hi, src.left + sigma * (p - src.lo) + slope * s, sigma * q});
  }
}

}  // namespace

TameFunction inf_convolution(const TameFunction& f, const std::optional<Rational>& radius,
                             const Rational& slope, EnvelopeKernel kernel) {
  if (radius && *radius < 0) throw Error(ErrorKind::InvalidInput, "negative inf-convolution radius");
  if (slope <= 0) throw Error(ErrorKind::InvalidInput, "inf-convolution slope must be positive");
  const MetricGraph& g = *f.graph();
  if (g.edge_count() == 0 || (radius && *radius == 0)) return f;

  std::vector<PointSource> points;
  std::vector<SegmentSource> segments;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (f.vertex_values()[v].finite()) points.push_back({GraphPoint::vertex(v), f.vertex_values()[v].value()});
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& p = f.edge_profiles()[e];
    for (std::size_t i = 0; i < p.cuts.size(); ++i)
      if (p.knot_values[i].finite())
        points.push_back({GraphPoint::on_edge(g, e, p.cuts[i]), p.knot_values[i].value()});
    for (std::size_t i = 0; i < p.segments.size(); ++i)
      if (p.segments[i].finite)
        segments.push_back({e, seg_lo(p, i), seg_hi(p, g.edge(e).length, i), p.segments[i].left,
                            p.segments[i].right});
  }

  const auto m = static_cast<long>(g.edge_count());
  std::vector<Envelope> env(g.edge_count());
  auto build = [&](long e) {
    const auto ue = static_cast<std::size_t>(e);
    std::vector<PartialLinear> pieces;
    for (const auto& src : points) point_source_pieces(g, ue, src, radius, slope, pieces);
    for (const auto& src : segments) segment_source_pieces(g, ue, src, radius, slope, pieces);
    env[ue] = lower_envelope(g.edge(ue).length, std::move(pieces));
  };
  if (kernel == EnvelopeKernel::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long e = 0; e < m; ++e) build(e);
  } else {
    for (long e = 0; e < m; ++e) build(e);
  }

  std::vector<ExtValue> values(g.vertex_count(), ExtValue::pos_inf());
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto ei = g.incident_edges(v).front();
    values[v] = g.edge(ei).a == v ? env[ei].at_start : env[ei].at_end;
  }
  std::vector<EdgeProfile> edges;
  edges.reserve(env.size());
  for (auto& x : env) edges.push_back(std::move(x.profile));
  return TameFunction(f.graph(), std::move(values), std::move(edges));
}

TameFunction lipschitz_envelope(const TameFunction& f, const Rational& slope) {
  if (f.identically_infinite())
    throw Error(ErrorKind::EmptySheaf, "Lipschitz envelope of the identically +inf function");
  return inf_convolution(f, std::nullopt, slope);
}

}  // namespace conedensity

namespace conedensity {

std::vector<TameFunction> finite_components(const TameFunction& f) {
  const MetricGraph& g = *f.graph();
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> parent;
  auto add_node = [&] {
    parent.push_back(parent.size());
    return parent.size() - 1;
  };
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
  constexpr long none = -1;

  for (std::size_t v = 0; v < n; ++v) add_node();
  // node of every segment / knot element, none when infinite
  std::vector<std::vector<long>> seg_node(g.edge_count()), knot_node(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& p = f.edge_profiles()[e];
    const Edge& edge = g.edge(e);
    seg_node[e].assign(p.segments.size(), none);
    knot_node[e].assign(p.cuts.size(), none);
    long run = f.vertex_values()[edge.a].finite() ? static_cast<long>(edge.a) : none;
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
      if (p.segments[i].finite) {
        if (run == none) run = static_cast<long>(add_node());
        seg_node[e][i] = run;
      } else {
        run = none;
      }
      if (i < p.cuts.size()) {
        if (p.knot_values[i].finite()) {
          if (run == none) run = static_cast<long>(add_node());
          knot_node[e][i] = run;
        } else {
          run = none;
        }
      }
    }
    if (run != none && f.vertex_values()[edge.b].finite()) unite(static_cast<std::size_t>(run), edge.b);
  }

  std::vector<long> label(parent.size(), none);
  std::vector<std::size_t> roots;
  auto label_of = [&](std::size_t node) {
    auto r = find(node);
    if (label[r] == none) {
      label[r] = static_cast<long>(roots.size());
      roots.push_back(r);
    }
    return static_cast<std::size_t>(label[r]);
  };
  for (std::size_t v = 0; v < n; ++v)
    if (f.vertex_values()[v].finite()) label_of(v);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    for (auto x : seg_node[e])
      if (x != none) label_of(static_cast<std::size_t>(x));
    for (auto x : knot_node[e])
      if (x != none) label_of(static_cast<std::size_t>(x));
  }

  std::vector<TameFunction> out;
  for (std::size_t c = 0; c < roots.size(); ++c) {
    auto in_c = [&](long node) { return node != none && label_of(static_cast<std::size_t>(node)) == c; };
    std::vector<ExtValue> values(n, ExtValue::pos_inf());
    for (std::size_t v = 0; v < n; ++v)
      if (f.vertex_values()[v].finite() && in_c(static_cast<long>(v))) values[v] = f.vertex_values()[v];
    std::vector<EdgeProfile> edges = f.edge_profiles();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      for (std::size_t i = 0; i < edges[e].segments.size(); ++i)
        if (!in_c(seg_node[e][i])) edges[e].segments[i] = Segment::infinite();
      for (std::size_t i = 0; i < edges[e].cuts.size(); ++i)
        if (!in_c(knot_node[e][i])) edges[e].knot_values[i] = ExtValue::pos_inf();
    }
    out.emplace_back(f.graph(), std::move(values), std::move(edges));
  }
  return out;
}

}  // namespace conedensity
