#include "conedensity/density.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <numeric>
#include <queue>

#include "conedensity/error.hpp"

namespace conedensity {

using gf2::Matrix;

namespace {

std::string point_name(const MetricGraph& g, const GraphPoint& p) {
  if (p.is_vertex()) return g.vertex_names().at(p.vertex_id());
  return "edge " + std::to_string(p.edge_id()) + " at " + to_string(p.offset());
}

Rational abs_of(const Rational& x) { return x < 0 ? Rational(-x) : x; }

long ceil_of(const Rational& q) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out.get_si();
}

// Least c >= 0 with f <= g + c.
Rational needed_shift(const TameFunction& f, const TameFunction& g) {
  auto s = sup_difference(f, g);
  if (s.is_pos_inf()) throw Error(ErrorKind::InvalidStructure, "no finite shift relates the two generators");
  if (s.is_neg_inf() || s.value() < 0) return Rational(0);
  return s.value();
}

// Identity blocks (row block r, column block c) of size n.
void put_identity(Matrix& m, std::size_t r, std::size_t c, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) m.set(r + k, c + k);
}

TwistedComplex sum_or_empty(const GraphRef& g, const std::vector<TwistedComplex>& parts) {
  return parts.empty() ? TwistedComplex(g) : direct_sum(parts);
}

bool identity_origin(const Split& s, std::size_t n) {
  if (s.origin.size() != n) return false;
  for (std::size_t k = 0; k < n; ++k)
    if (s.origin[k] != k) return false;
  return true;
}

}  // namespace

TameFunction w_function(const GraphRef& graph, const WGenerator& w) {
  return TameFunction::distance_cone(graph, w.basepoint, w.level);
}

TwistedComplex w_complex(const GraphRef& graph, const std::vector<WGenerator>& gens, const Matrix& diff) {
  std::vector<Generator> out;
  for (const auto& w : gens) out.push_back({w_function(graph, w), w.degree});
  return TwistedComplex(graph, std::move(out), diff);
}

std::optional<WGenerator> as_w_generator(const Generator& g) {
  const auto& fn = g.fn;
  if (!fn.finite_everywhere()) return std::nullopt;
  const auto& graph = *fn.graph();
  std::optional<GraphPoint> best;
  Rational low;
  auto consider = [&](const GraphPoint& p, const Rational& v) {
    if (!best || v < low) best = p, low = v;
  };
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) consider(GraphPoint::vertex(v), fn.vertex_values()[v].value());
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& prof = fn.edge_profiles()[e];
    for (std::size_t k = 0; k < prof.cuts.size(); ++k)
      consider(GraphPoint::on_edge(graph, e, prof.cuts[k]), prof.knot_values[k].value());
  }
  WGenerator w{*best, low, g.deg};
  if (!(w_function(fn.graph(), w) == fn)) return std::nullopt;
  return w;
}

Rational w_distance(const MetricGraph& g, const GraphPoint& x, const Rational& a, const GraphPoint& y,
                    const Rational& b) {
  const Rational d = geodesic_distance(g, x, y);
  const Rational gap = abs_of(a - b);
  return gap <= d ? Rational(2 * d) : Rational(gap + d);
}

std::vector<GraphPoint> sample_points(const MetricGraph& g) {
  std::vector<GraphPoint> out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) out.push_back(GraphPoint::vertex(v));
  for (std::size_t e = 0; e < g.edge_count(); ++e) out.push_back(GraphPoint::on_edge(g, e, g.edge(e).length / 2));
  return out;
}

// ---------------------------------------------------------------------------

CechTower cech_tower(const TwistedComplex& F, const CechCover& cover) {
  const auto& graph = F.graph();
  if (cover.pieces.empty()) throw Error(ErrorKind::InvalidInput, "Cech tower over an empty cover");
  for (const auto& p : cover.pieces)
    if (p.region.empty()) throw Error(ErrorKind::InvalidInput, "cover piece with empty region");
  CechTower out;
  out.cover = cover;
  std::vector<TwistedComplex> c0, c1;
  for (const auto& p : cover.pieces) {
    out.pieces.push_back(tensor_complex(F, p.region));
    c0.push_back(out.pieces.back().complex);
  }
  for (const auto& p : cover.nerve) {
    out.overlaps.push_back(tensor_complex(F, p.region));
    c1.push_back(out.overlaps.back().complex);
  }
  const auto n = F.size();
  const Matrix id = Matrix::identity(n);
  std::vector<std::size_t> off0{0}, off1{0};
  for (const auto& c : c0) off0.push_back(off0.back() + c.size());
  for (const auto& c : c1) off1.push_back(off1.back() + c.size());

  Matrix restriction(off1.back(), off0.back());
  for (std::size_t e = 0; e < cover.nerve.size(); ++e)
    for (auto i : cover.nerve[e].index_set) {
      if (i >= cover.pieces.size()) throw Error(ErrorKind::InvalidInput, "nerve refers to a missing piece");
      auto block = split_map(out.pieces[i], out.overlaps[e], id);
      for (std::size_t r = 0; r < block.rows(); ++r)
        for (auto c : block.row(r).ones()) restriction.set(off1[e] + r, off0[i] + c);
    }
  out.tower.stages = {shift(sum_or_empty(graph, c0), -1), shift(sum_or_empty(graph, c1), -1)};
  out.tower.maps = {restriction};
  const auto total = tower_total(out.tower);

  Split whole{F, std::vector<std::size_t>(n)};
  std::iota(whole.origin.begin(), whole.origin.end(), std::size_t{0});
  out.augmentation = Matrix(total.size(), n);
  for (std::size_t i = 0; i < out.pieces.size(); ++i) {
    auto block = split_map(whole, out.pieces[i], id);
    for (std::size_t r = 0; r < block.rows(); ++r)
      for (auto c : block.row(r).ones()) out.augmentation.set(off0[i] + r, c);
  }
  if (!is_chain_map(F, total, out.augmentation))
    throw Error(ErrorKind::InvalidStructure, "Cech augmentation is not a chain map");

  const auto cone = mapping_cone(F, total, out.augmentation).complex;
  for (const auto& x : sample_points(*graph)) {
    if (!gabriel_decompose(stalk_complex(cone, x)).barcode.empty())
      throw Error(ErrorKind::InvalidStructure, "Cech tower is not exact at " + point_name(*graph, x));
    out.checked.push_back(x);
  }
  return out;
}

TreeTower tree_tower(const TwistedComplex& F, const CechTower& cech) {
  const auto& graph = F.graph();
  const auto n = F.size();
  for (const auto& g : F.gens())
    if (!g.fn.finite_everywhere())
      throw Error(ErrorKind::InvalidInput, "tree tower needs generators finite everywhere");
  const auto& cover = cech.cover;
  const auto np = cover.pieces.size();
  for (const auto& s : cech.pieces)
    if (!identity_origin(s, n)) throw Error(ErrorKind::InvalidInput, "cover piece splits a generator");
  for (const auto& s : cech.overlaps)
    if (!identity_origin(s, n)) throw Error(ErrorKind::InvalidInput, "cover overlap splits a generator");

  TreeTower out;
  // Root: the piece whose center has the smallest eccentricity.
  Rational best_ecc;
  for (std::size_t i = 0; i < np; ++i) {
    Rational ecc(0);
    for (std::size_t v = 0; v < graph->vertex_count(); ++v)
      ecc = std::max(ecc, graph->distance_to_vertex(cover.pieces[i].center, v));
    if (i == 0 || ecc < best_ecc) best_ecc = ecc, out.root = i;
  }

  // Breadth-first spanning tree of the nerve.
  std::vector<std::vector<std::size_t>> touching(np);
  for (std::size_t e = 0; e < cover.nerve.size(); ++e)
    for (auto i : cover.nerve[e].index_set) touching[i].push_back(e);
  std::vector<long> parent_edge(np, -1);
  std::vector<bool> seen(np, false);
  std::vector<std::vector<std::size_t>> children(np);
  std::queue<std::size_t> todo;
  seen[out.root] = true;
  todo.push(out.root);
  while (!todo.empty()) {
    auto i = todo.front();
    todo.pop();
    for (auto e : touching[i])
      for (auto j : cover.nerve[e].index_set)
        if (!seen[j]) {
          seen[j] = true;
          parent_edge[j] = static_cast<long>(e);
          children[i].push_back(j);
          todo.push(j);
        }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error(ErrorKind::CoverViolation, "nerve is disconnected");
  std::vector<long> slot(cover.nerve.size(), -1);
  std::vector<std::size_t> child_of;  // per kept overlap, the far side
  for (std::size_t j = 0; j < np; ++j)
    if (parent_edge[j] >= 0) out.overlaps.push_back(static_cast<std::size_t>(parent_edge[j]));
  std::sort(out.overlaps.begin(), out.overlaps.end());
  for (std::size_t k = 0; k < out.overlaps.size(); ++k) slot[out.overlaps[k]] = static_cast<long>(k);
  child_of.resize(out.overlaps.size());
  for (std::size_t j = 0; j < np; ++j)
    if (parent_edge[j] >= 0) child_of[slot[parent_edge[j]]] = j;

  for (const auto& s : cech.pieces) out.pieces.push_back(project(s.complex));
  for (auto e : out.overlaps) out.kept.push_back(project(cech.overlaps[e].complex));

  const auto n0 = np * n, n1 = out.kept.size() * n;
  Matrix restriction(n1, n0);
  for (std::size_t k = 0; k < out.overlaps.size(); ++k)
    for (auto i : cover.nerve[out.overlaps[k]].index_set) put_identity(restriction, k * n, i * n, n);
  out.tower.stages = {shift(sum_or_empty(graph, out.pieces), -1), shift(sum_or_empty(graph, out.kept), -1)};
  out.tower.maps = {restriction};
  const auto total = tower_total(out.tower);

  auto& cert = out.certificate;
  cert.a = 0;
  cert.u = Matrix(n0 + n1, n);
  for (std::size_t i = 0; i < np; ++i) put_identity(cert.u, i * n, 0, n);
  cert.v = Matrix(n, n0 + n1);
  put_identity(cert.v, 0, out.root * n, n);
  cert.h_source = Matrix(n, n);
  cert.h_target = Matrix(n0 + n1, n0 + n1);
  Rational b(0);
  for (std::size_t g = 0; g < n; ++g) b = std::max(b, needed_shift(out.pieces[out.root].gen(g).fn, F.gen(g).fn));
  // Contraction of the tree: an overlap goes to every piece beyond it.
  for (std::size_t k = 0; k < out.overlaps.size(); ++k) {
    std::vector<std::size_t> stack{child_of[k]};
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      put_identity(cert.h_target, i * n, n0 + k * n, n);
      for (std::size_t g = 0; g < n; ++g)
        b = std::max(b, needed_shift(out.kept[k].gen(g).fn, out.pieces[i].gen(g).fn));
      for (auto c : children[i]) stack.push_back(c);
    }
  }
  cert.b = b;
  require_valid(F, total, cert, "tree tower");
  return out;
}

StalkReplacement stalk_replace(const TwistedComplex& piece, const GraphPoint& x, const Rational& radius,
                               const Rational& epsilon) {
  if (radius > epsilon)
    throw Error(ErrorKind::InvalidInput, "stalk replacement: region radius " + to_string(radius) +
                                             " exceeds epsilon " + to_string(epsilon));
  const auto& graph = piece.graph();
  auto st = stalk_at(piece, x);
  if (st.kept.size() != piece.size())
    throw Error(ErrorKind::InvalidInput, "stalk replacement: a generator is infinite at the basepoint");
  auto gd = gabriel_decompose(st.complex);

  StalkReplacement out;
  out.projected = project(piece);
  out.barcode = gd.barcode;
  const auto stalk = project(place_at(st.complex, graph, x));
  out.replacement = project(place_at(gd.tower, graph, x));
  const auto levels = point_levels(gd.tower);
  for (std::size_t k = 0; k < levels.size(); ++k) out.generators.push_back({x, levels[k], gd.tower.gen(k).deg});

  const auto n = piece.size();
  InterleavingCertificate to_stalk{Rational(0), Rational(0), Matrix::identity(n), Matrix::identity(n), Matrix(n, n),
                                   Matrix(n, n)};
  for (std::size_t g = 0; g < n; ++g)
    to_stalk.b = std::max(to_stalk.b, needed_shift(stalk.gen(g).fn, out.projected.gen(g).fn));
  require_valid(out.projected, stalk, to_stalk, "piece to stalk");
  require_valid(stalk, out.replacement, gd.certificate, "stalk to barcode tower");
  out.certificate = compose(to_stalk, gd.certificate);
  require_valid(out.projected, out.replacement, out.certificate, "stalk replacement");
  if (out.certificate.cost() > 4 * epsilon)
    throw Error(ErrorKind::CertificateFailure, "stalk replacement costs " + to_string(out.certificate.cost()) +
                                                   ", above 4 epsilon = " + to_string(Rational(4 * epsilon)));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

DensityReport fixed_point(const TwistedComplex& F, const Rational& epsilon, std::vector<WGenerator> gens) {
  DensityReport r;
  r.input = F;
  r.epsilon = epsilon;
  r.output = F;
  r.generators = std::move(gens);
  r.layer_sizes = {F.size(), 0};
  r.layer_shifts = {Rational(0), Rational(0)};
  r.certificate = identity_certificate(F);
  r.certified_bound = 80 * epsilon;
  r.measured_lower = Rational(0);
  r.measured_upper = Rational(0);
  r.trace.push_back("input is already built from W generators");
  return r;
}

template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), name + ": " + e.what());
  }
}

}  // namespace

DensityReport densify(const TwistedComplex& F0, const Rational& epsilon, const DensifyOptions& options) {
  if (epsilon <= 0) throw Error(ErrorKind::InvalidInput, "densify needs epsilon > 0");
  for (std::size_t g = 0; g < F0.size(); ++g)
    if (!F0.gen(g).fn.is_lipschitz(Rational(1)))
      throw Error(ErrorKind::NonLipschitz, "generator " + std::to_string(g) + " is not 1-Lipschitz");
  {
    std::vector<WGenerator> ws;
    for (const auto& g : F0.gens())
      if (auto w = as_w_generator(g)) ws.push_back(*w);
    if (ws.size() == F0.size()) return fixed_point(F0, epsilon, std::move(ws));
  }

  DensityReport r;
  r.epsilon = epsilon;
  r.certified_bound = 80 * epsilon;

  // Subdivide until the half-star cover is valid (parallel edges need two
  // pieces each).
  Rational mesh = epsilon;
  GraphRef fine;
  std::optional<Subdivision> sub;
  for (int attempt = 0;; ++attempt) {
    sub = subdivide(*F0.graph(), mesh);
    fine = std::make_shared<const MetricGraph>(sub->graph);
    try {
      r.cover = closed_star_cover(*fine);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CoverViolation || attempt == 4) throw Error(e.kind(), std::string("cover: ") + e.what());
      mesh /= 2;
    }
  }
  r.mesh = mesh;
  {
    std::vector<Generator> gens;
    for (const auto& g : F0.gens()) gens.push_back({g.fn.transported(*sub, fine), g.deg});
    r.input = TwistedComplex(fine, std::move(gens), F0.diff());
  }
  const auto& F = r.input;
  r.trace.push_back("subdivided to mesh " + to_string(mesh) + ": " + std::to_string(fine->vertex_count()) +
                    " vertices, " + std::to_string(r.cover.pieces.size()) + " pieces, " +
                    std::to_string(r.cover.nerve.size()) + " overlaps");

  const auto cech = stage("cech", [&] { return cech_tower(F, r.cover); });
  r.trace.push_back("cech: exact at " + std::to_string(cech.checked.size()) + " sample points");
  const auto tree = stage("tree", [&] { return tree_tower(F, cech); });
  r.root = tree.root;
  r.tree_overlaps = tree.overlaps;
  r.cech_cost = tree.certificate.cost();
  r.trace.push_back("tree: root piece " + std::to_string(tree.root) + ", " + std::to_string(tree.overlaps.size()) +
                    " overlaps kept, cost " + to_string(r.cech_cost));

  // Stalk replacements, one per piece then one per kept overlap.
  std::vector<std::pair<const TwistedComplex*, const CechPiece*>> jobs;
  for (std::size_t i = 0; i < r.cover.pieces.size(); ++i)
    jobs.emplace_back(&cech.pieces[i].complex, &r.cover.pieces[i]);
  for (auto e : tree.overlaps) jobs.emplace_back(&cech.overlaps[e].complex, &r.cover.nerve[e]);
  std::vector<std::optional<StalkReplacement>> done(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < static_cast<long>(jobs.size()); ++k) {
    try {
      const auto& [cx, piece] = jobs[k];
      done[k] = stalk_replace(*cx, piece->center, piece->radius, epsilon);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) stage("stalk", [&]() -> int { std::rethrow_exception(e); });

  const auto np = r.cover.pieces.size();
  std::vector<TwistedComplex> d0, d1;
  std::vector<InterleavingCertificate> c0, c1;
  std::vector<WGenerator> w0, w1;
  std::size_t bars = 0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    auto& s = *done[k];
    r.piece_cost = std::max(r.piece_cost, s.certificate.cost());
    bars += s.barcode.size();
    auto& d = k < np ? d0 : d1;
    auto& c = k < np ? c0 : c1;
    auto& w = k < np ? w0 : w1;
    d.push_back(s.replacement);
    c.push_back(s.certificate);
    w.insert(w.end(), s.generators.begin(), s.generators.end());
  }
  r.trace.push_back("stalk: " + std::to_string(jobs.size()) + " replacements, " + std::to_string(bars) +
                    " bars, largest cost " + to_string(r.piece_cost));

  std::vector<TwistedComplex> repl{shift(sum_or_empty(fine, d0), -1), shift(sum_or_empty(fine, d1), -1)};
  std::vector<InterleavingCertificate> certs{sum_certificates(c0), sum_certificates(c1)};
  Rational eps_t = epsilon;
  for (const auto& c : certs) eps_t = std::max(eps_t, c.cost());
  if (eps_t > epsilon) r.trace.push_back("transport: stage cost above epsilon, using " + to_string(eps_t));
  const auto moved = stage("transport", [&] { return transport_tower(tree.tower, repl, certs, eps_t); });
  r.transport_cost = moved.record.certificate.cost();
  for (const auto& t : moved.record.trace) r.trace.push_back("transport: " + t);

  r.output = moved.record.output;
  r.layer_sizes = {moved.tower.stages[0].size(), moved.tower.stages[1].size()};
  r.layer_shifts = moved.shifts;
  for (auto& w : w1) {
    w.level += moved.shifts[1];
    w.degree += 1;
  }
  r.generators = w0;
  r.generators.insert(r.generators.end(), w1.begin(), w1.end());
  r.certificate = compose(tree.certificate, moved.record.certificate);
  stage("final", [&] {
    require_valid(r.input, r.output, r.certificate, "densify");
    return 0;
  });
  r.trace.push_back("final: cost " + to_string(r.certificate.cost()) + ", bound " + to_string(r.certified_bound));

  if (options.measure) {
    BoundsOptions bo;
    bo.cap = options.cap;
    bo.seed = r.certificate;
    auto m = distance_bounds(r.input, r.output, sample_points(*fine), bo);
    r.measured_lower = m.lower;
    r.measured_upper = m.upper;
  } else {
    r.measured_lower = Rational(0);
    r.measured_upper = r.certificate.cost();
  }
  return r;
}

Replay check_report(const DensityReport& r) {
  auto fail = [](std::string why) { return Replay{false, std::move(why)}; };
  if (auto rp = replay(r.input, r.output, r.certificate); !rp) return rp;
  if (r.layers() != 2) return fail("expected 2 layers, found " + std::to_string(r.layers()));
  std::size_t total = 0;
  for (auto s : r.layer_sizes) total += s;
  if (total != r.output.size()) return fail("layer sizes do not add up to the output");
  if (r.generators.size() != r.output.size()) return fail("one W generator per output generator expected");
  for (std::size_t k = 0; k < r.generators.size(); ++k) {
    const auto& w = r.generators[k];
    if (w.degree != r.output.gen(k).deg || !(w_function(r.output.graph(), w) == r.output.gen(k).fn))
      return fail("output generator " + std::to_string(k) + " is not the recorded W generator");
  }
  if (!r.within_bound())
    return fail("certificate cost " + to_string(r.certificate.cost()) + " exceeds " + to_string(r.certified_bound));
  return {};
}

// ---------------------------------------------------------------------------

std::vector<GraphPoint> geodesic_points(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q,
                                        const Rational& step) {
  if (step <= 0) throw Error(ErrorKind::InvalidInput, "geodesic step must be positive");
  // A leg runs along one edge between two offsets.
  struct Leg {
    std::size_t edge;
    Rational from, to;
  };
  auto exits = [&](const GraphPoint& x) {
    std::vector<std::pair<std::size_t, Rational>> out;  // vertex, distance
    if (x.is_vertex()) {
      out.emplace_back(x.vertex_id(), Rational(0));
    } else {
      const auto& e = g.edge(x.edge_id());
      out.emplace_back(e.a, x.offset());
      out.emplace_back(e.b, Rational(e.length - x.offset()));
    }
    return out;
  };
  const Rational target = geodesic_distance(g, p, q);
  std::vector<Leg> legs;
  bool direct = false;
  if (!p.is_vertex() && !q.is_vertex() && p.edge_id() == q.edge_id() && abs_of(p.offset() - q.offset()) == target) {
    legs.push_back({p.edge_id(), p.offset(), q.offset()});
    direct = true;
  }
  if (!direct && !(p == q)) {
    bool found = false;
    for (auto [u, du] : exits(p)) {
      for (auto [w, dw] : exits(q)) {
        if (du + g.vertex_distance(u, w) + dw != target) continue;
        if (!p.is_vertex()) {
          const auto& e = g.edge(p.edge_id());
          legs.push_back({p.edge_id(), p.offset(), u == e.a ? Rational(0) : e.length});
        }
        for (std::size_t at = u; at != w;) {
          bool moved = false;
          for (auto e : g.incident_edges(at)) {
            const auto& ed = g.edge(e);
            const auto next = ed.a == at ? ed.b : ed.a;
            if (ed.length + g.vertex_distance(next, w) == g.vertex_distance(at, w)) {
              legs.push_back({e, ed.a == at ? Rational(0) : ed.length, ed.a == at ? ed.length : Rational(0)});
              at = next;
              moved = true;
              break;
            }
          }
          if (!moved) throw Error(ErrorKind::InvalidStructure, "shortest path reconstruction failed");
        }
        if (!q.is_vertex()) {
          const auto& e = g.edge(q.edge_id());
          legs.push_back({q.edge_id(), w == e.a ? Rational(0) : e.length, q.offset()});
        }
        found = true;
        break;
      }
      if (found) break;
    }
  }
  std::vector<GraphPoint> out{p};
  for (const auto& leg : legs) {
    const Rational len = abs_of(leg.to - leg.from);
    if (len == 0) continue;
    const long parts = std::max(1L, ceil_of(len / step));
    for (long k = 1; k <= parts; ++k) {
      auto pt = GraphPoint::on_edge(g, leg.edge, leg.from + (leg.to - leg.from) * k / parts);
      if (!(pt == out.back())) out.push_back(pt);
    }
  }
  if (!(out.back() == q)) out.push_back(q);
  return out;
}

SoloReport solo_approximator_check(const std::vector<WGenerator>& family, const GraphRef& graph,
                                   const std::vector<CorpusEntry>& corpus, const Rational& epsilon,
                                   const DensifyOptions& options) {
  SoloReport out;
  out.epsilon = epsilon;
  const auto& g = *graph;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      const auto& x = family[i];
      const auto& y = family[j];
      if (x.degree != y.degree) continue;  // no degree-0 maps between them
      SoloReport::Chain chain;
      chain.from = i;
      chain.to = j;
      const Rational d = geodesic_distance(g, x.basepoint, y.basepoint);
      const Rational gap = abs_of(y.level - x.level);
      std::vector<GraphPoint> pts;
      std::vector<Rational> levels;
      if (d == 0) {
        const long parts = std::max(1L, ceil_of(Rational(2 * gap / epsilon)));
        for (long k = 0; k <= parts; ++k) {
          pts.push_back(x.basepoint);
          levels.push_back(x.level + (y.level - x.level) * k / parts);
        }
      } else {
        // Half-epsilon legs in both distance and level.
        const Rational step = epsilon * d / (2 * std::max(d, gap));
        pts = geodesic_points(g, x.basepoint, y.basepoint, step);
        Rational run(0);
        levels.push_back(x.level);
        for (std::size_t k = 1; k < pts.size(); ++k) {
          run += geodesic_distance(g, pts[k - 1], pts[k]);
          levels.push_back(x.level + (y.level - x.level) * run / d);
        }
      }
      chain.ok = true;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        Rational s(0);
        if (k > 0) s = w_distance(g, pts[k - 1], levels[k - 1], pts[k], levels[k]);
        chain.longest = std::max(chain.longest, s);
        if (s >= 2 * epsilon) chain.ok = false;
        chain.steps.push_back({{pts[k], levels[k], x.degree}, s});
      }
      if (!chain.ok)
        out.failures.push_back("chain " + std::to_string(i) + " -> " + std::to_string(j) + " has a step of " +
                               to_string(chain.longest));
      out.chains.push_back(std::move(chain));
    }

  for (const auto& entry : corpus) {
    SoloReport::Item item;
    item.name = entry.name;
    try {
      auto rep = densify(entry.sheaf, epsilon, options);
      item.layers = rep.layers();
      item.cost = rep.certificate.cost();
      item.bound = rep.certified_bound;
      auto check = check_report(rep);
      item.replays = static_cast<bool>(replay(rep.input, rep.output, rep.certificate));
      item.ok = check.ok;
      if (!check.ok) out.failures.push_back(entry.name + ": " + check.reason);
      item.report = std::move(rep);
    } catch (const Error& e) {
      out.failures.push_back(entry.name + ": " + e.what());
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

}  // namespace conedensity
