#include "conedensity/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "conedensity/error.hpp"

namespace conedensity::io {

using gf2::Matrix;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, "at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t k) { return path + "/" + std::to_string(k); }

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(child(path, key), "missing field");
  return *it;
}

const Json& array_at(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

long integer_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<long>();
}

std::size_t index_at(const Json& j, const std::string& path, std::size_t bound) {
  const long v = integer_at(j, path);
  if (v < 0 || static_cast<std::size_t>(v) >= bound)
    bad(path, "index " + std::to_string(v) + " out of range (size " + std::to_string(bound) + ")");
  return static_cast<std::size_t>(v);
}

const std::string& string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get_ref<const std::string&>();
}

bool bool_at(const Json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected a boolean");
  return j.get<bool>();
}

// Re-raises library errors with the document location in front.
template <class Fn>
auto located(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (std::string(e.what()).rfind("at /", 0) == 0) throw;
    throw Error(e.kind(), "at " + (path.empty() ? std::string("/") : path) + ": " + e.what());
  }
}

GraphRef share(MetricGraph g) {
  if (g == *point_base()) return point_base();
  return std::make_shared<const MetricGraph>(std::move(g));
}

Json tool() { return Json{{"name", kToolName}, {"version", kToolVersion}}; }

}  // namespace

// ---------------------------------------------------------------------------

Json document(const char* tag, Json payload) {
  payload["schema"] = std::string(kToolName) + "/" + tag;
  return payload;
}

std::string schema_of(const Json& doc) {
  const auto& s = string_at(field(doc, "schema", ""), "/schema");
  const std::string prefix = std::string(kToolName) + "/";
  static const std::set<std::string> known{kGraph, kFunction, kComplex, kBarcode, kCertificate, kRecord, kReport};
  if (s.rfind(prefix, 0) != 0 || !known.count(s.substr(prefix.size()))) bad("/schema", "unknown schema \"" + s + "\"");
  return s.substr(prefix.size());
}

void expect_schema(const Json& doc, const char* tag) {
  const auto s = schema_of(doc);
  if (s != tag) bad("/schema", std::string("expected ") + tag + ", found " + s);
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_text(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_file(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  out << dump(doc);
}

// ---------------------------------------------------------------------------

Json to_json(const Rational& q) { return to_string(q); }
Json to_json(const ExtValue& v) { return to_string(v); }

Rational rational_at(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) bad(path, "non-rational number; write it as a string such as \"1/3\" or \"0.25\"");
  if (!j.is_string()) bad(path, "expected a rational");
  try {
    return parse_rational(j.get_ref<const std::string&>());
  } catch (const std::invalid_argument&) {
    bad(path, "non-rational number \"" + j.get<std::string>() + "\"");
  }
}

ExtValue ext_at(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf" || s == "-inf") return parse_ext(s);
  }
  return rational_at(j, path);
}

// ---------------------------------------------------------------------------

Json to_json(const MetricGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges())
    edges.push_back(Json{{"a", g.vertex_names()[e.a]}, {"b", g.vertex_names()[e.b]}, {"len", to_json(e.length)}});
  return Json{{"vertices", g.vertex_names()}, {"edges", edges}};
}

MetricGraph graph_from_json(const Json& j, const std::string& path) {
  const auto vp = child(path, "vertices");
  const auto& vs = array_at(field(j, "vertices", path), vp);
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    names.push_back(string_at(vs[k], child(vp, k)));
    if (!index.emplace(names.back(), k).second) bad(child(vp, k), "duplicate vertex \"" + names.back() + "\"");
  }
  if (names.empty()) bad(vp, "graph has no vertices");
  std::vector<Edge> edges;
  const auto ep = child(path, "edges");
  const auto& es = array_at(field(j, "edges", path), ep);
  for (std::size_t k = 0; k < es.size(); ++k) {
    const auto p = child(ep, k);
    auto end = [&](const char* key) {
      const auto& name = string_at(field(es[k], key, p), child(p, key));
      auto it = index.find(name);
      if (it == index.end()) bad(child(p, key), "dangling reference to vertex \"" + name + "\"");
      return it->second;
    };
    Edge e{end("a"), end("b"), rational_at(field(es[k], "len", p), child(p, "len"))};
    if (e.length <= 0) bad(child(p, "len"), "edge length must be positive");
    if (e.a == e.b) bad(p, "self-loop");
    edges.push_back(e);
  }
  return located(path, [&] { return MetricGraph(names, edges); });
}

Json to_json(const MetricGraph& g, const GraphPoint& p) {
  if (p.is_vertex()) return Json{{"vertex", g.vertex_names()[p.vertex_id()]}};
  return Json{{"edge", p.edge_id()}, {"offset", to_json(p.offset())}};
}

GraphPoint point_from_json(const Json& j, const MetricGraph& g, const std::string& path) {
  if (!j.is_object()) bad(path, "expected a point");
  if (j.contains("vertex")) {
    const auto& name = string_at(j["vertex"], child(path, "vertex"));
    const auto& names = g.vertex_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) bad(child(path, "vertex"), "dangling reference to vertex \"" + name + "\"");
    return GraphPoint::vertex(static_cast<std::size_t>(it - names.begin()));
  }
  const auto e = index_at(field(j, "edge", path), child(path, "edge"), g.edge_count());
  const auto t = rational_at(field(j, "offset", path), child(path, "offset"));
  if (t < 0 || t > g.edge(e).length) bad(child(path, "offset"), "offset outside the edge");
  return GraphPoint::on_edge(g, e, t);
}

// ---------------------------------------------------------------------------

Json to_json(const TameFunction& f) {
  const auto& g = *f.graph();
  Json vertices = Json::object();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) vertices[g.vertex_names()[v]] = to_json(f.vertex_values()[v]);
  Json edges = Json::array();
  for (const auto& prof : f.edge_profiles()) {
    Json cuts = Json::array(), knots = Json::array(), segs = Json::array();
    for (const auto& c : prof.cuts) cuts.push_back(to_json(c));
    for (const auto& k : prof.knot_values) knots.push_back(to_json(k));
    for (const auto& s : prof.segments)
      segs.push_back(s.finite ? Json::array({to_json(s.left), to_json(s.right)}) : Json("inf"));
    edges.push_back(Json{{"cuts", cuts}, {"knots", knots}, {"segments", segs}});
  }
  return Json{{"vertices", vertices}, {"edges", edges}};
}

TameFunction function_from_json(const Json& j, const GraphRef& graph, const std::string& path) {
  const auto& g = *graph;
  const auto vp = child(path, "vertices");
  const auto& vj = field(j, "vertices", path);
  if (!vj.is_object()) bad(vp, "expected an object keyed by vertex name");
  std::vector<ExtValue> values(g.vertex_count());
  std::vector<bool> given(g.vertex_count(), false);
  for (auto it = vj.begin(); it != vj.end(); ++it) {
    const auto& names = g.vertex_names();
    auto pos = std::find(names.begin(), names.end(), it.key());
    if (pos == names.end()) bad(child(vp, it.key()), "dangling reference to vertex \"" + it.key() + "\"");
    const auto v = static_cast<std::size_t>(pos - names.begin());
    values[v] = ext_at(it.value(), child(vp, it.key()));
    given[v] = true;
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (!given[v]) bad(vp, "no value for vertex \"" + g.vertex_names()[v] + "\"");

  const auto ep = child(path, "edges");
  const auto& ej = array_at(field(j, "edges", path), ep);
  if (ej.size() != g.edge_count())
    bad(ep, "expected " + std::to_string(g.edge_count()) + " edge profiles, found " + std::to_string(ej.size()));
  std::vector<EdgeProfile> profiles;
  for (std::size_t e = 0; e < ej.size(); ++e) {
    const auto p = child(ep, e);
    EdgeProfile prof;
    const auto& cuts = array_at(field(ej[e], "cuts", p), child(p, "cuts"));
    for (std::size_t k = 0; k < cuts.size(); ++k) prof.cuts.push_back(rational_at(cuts[k], child(child(p, "cuts"), k)));
    const auto& knots = array_at(field(ej[e], "knots", p), child(p, "knots"));
    for (std::size_t k = 0; k < knots.size(); ++k)
      prof.knot_values.push_back(ext_at(knots[k], child(child(p, "knots"), k)));
    const auto sp = child(p, "segments");
    const auto& segs = array_at(field(ej[e], "segments", p), sp);
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const auto q = child(sp, k);
      if (segs[k].is_string() && segs[k].get<std::string>() == "inf") {
        prof.segments.push_back(Segment::infinite());
      } else {
        if (!segs[k].is_array() || segs[k].size() != 2) bad(q, "segment must be \"inf\" or [left, right]");
        prof.segments.push_back(Segment::linear(rational_at(segs[k][0], child(q, 0)), rational_at(segs[k][1], child(q, 1))));
      }
    }
    if (prof.knot_values.size() != prof.cuts.size()) bad(child(p, "knots"), "one knot value per cut expected");
    if (prof.segments.size() != prof.cuts.size() + 1) bad(sp, "expected cuts + 1 segments");
    profiles.push_back(std::move(prof));
  }
  return located(path, [&] { return TameFunction(graph, values, profiles); });
}

// ---------------------------------------------------------------------------

Json to_json(const gf2::Matrix& m) {
  Json ones = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto c : m.row(r).ones()) ones.push_back(Json::array({r, c}));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"ones", ones}};
}

gf2::Matrix matrix_from_json(const Json& j, const std::string& path) {
  const auto rows = static_cast<std::size_t>(integer_at(field(j, "rows", path), child(path, "rows")));
  const auto cols = static_cast<std::size_t>(integer_at(field(j, "cols", path), child(path, "cols")));
  Matrix m(rows, cols);
  const auto op = child(path, "ones");
  const auto& ones = array_at(field(j, "ones", path), op);
  for (std::size_t k = 0; k < ones.size(); ++k) {
    const auto p = child(op, k);
    if (!ones[k].is_array() || ones[k].size() != 2) bad(p, "expected [row, col]");
    m.set(index_at(ones[k][0], child(p, 0), rows), index_at(ones[k][1], child(p, 1), cols));
  }
  return m;
}

Json to_json(const TwistedComplex& C, bool embed_graph) {
  Json gens = Json::array();
  for (const auto& g : C.gens()) gens.push_back(Json{{"degree", g.deg}, {"fn", to_json(g.fn)}});
  Json diff = Json::array();
  for (std::size_t i = 0; i < C.size(); ++i)
    for (auto j : C.diff().row(i).ones()) diff.push_back(Json::array({i, j}));
  Json out{{"generators", gens}, {"differential", diff}};
  if (embed_graph) out["graph"] = to_json(*C.graph());
  return out;
}

GraphRef embedded_graph(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("graph")) return nullptr;
  return share(graph_from_json(j["graph"], child(path, "graph")));
}

TwistedComplex complex_from_json(const Json& j, const GraphRef& given, const std::string& path) {
  GraphRef graph = embedded_graph(j, path);
  if (!graph) graph = given;
  if (!graph) bad(path, "complex needs a graph (embed one or pass --graph)");
  std::map<std::string, TameFunction> table;
  if (j.contains("functions")) {
    const auto fp = child(path, "functions");
    if (!j["functions"].is_object()) bad(fp, "expected an object of named functions");
    for (auto it = j["functions"].begin(); it != j["functions"].end(); ++it)
      table.emplace(it.key(), function_from_json(it.value(), graph, child(fp, it.key())));
  }
  const auto gp = child(path, "generators");
  const auto& gj = array_at(field(j, "generators", path), gp);
  std::vector<Generator> gens;
  for (std::size_t k = 0; k < gj.size(); ++k) {
    const auto p = child(gp, k);
    const int deg = static_cast<int>(integer_at(field(gj[k], "degree", p), child(p, "degree")));
    const auto& fj = field(gj[k], "fn", p);
    if (fj.is_string()) {
      auto it = table.find(fj.get<std::string>());
      if (it == table.end()) bad(child(p, "fn"), "dangling reference to function \"" + fj.get<std::string>() + "\"");
      gens.push_back({it->second, deg});
    } else {
      gens.push_back({function_from_json(fj, graph, child(p, "fn")), deg});
    }
  }
  Matrix d(gens.size(), gens.size());
  const auto dp = child(path, "differential");
  const auto& dj = array_at(field(j, "differential", path), dp);
  for (std::size_t k = 0; k < dj.size(); ++k) {
    const auto p = child(dp, k);
    if (!dj[k].is_array() || dj[k].size() != 2) bad(p, "expected [target, source]");
    d.set(index_at(dj[k][0], child(p, 0), gens.size()), index_at(dj[k][1], child(p, 1), gens.size()));
  }
  return located(path, [&] { return TwistedComplex(graph, gens, d); });
}

// ---------------------------------------------------------------------------

Json to_json(const Barcode& B) {
  Json bars = Json::array();
  for (const auto& b : B.bars())
    bars.push_back(Json{{"birth", to_json(b.birth)}, {"death", to_json(b.death)}, {"degree", b.degree}});
  return Json{{"bars", bars}};
}

Barcode barcode_from_json(const Json& j, const std::string& path) {
  const auto bp = child(path, "bars");
  const auto& bj = array_at(field(j, "bars", path), bp);
  std::vector<Bar> bars;
  for (std::size_t k = 0; k < bj.size(); ++k) {
    const auto p = child(bp, k);
    Bar b;
    b.birth = rational_at(field(bj[k], "birth", p), child(p, "birth"));
    b.death = ext_at(field(bj[k], "death", p), child(p, "death"));
    b.degree = static_cast<int>(integer_at(field(bj[k], "degree", p), child(p, "degree")));
    if (!(ExtValue(b.birth) < b.death)) bad(p, "birth must be below death");
    bars.push_back(b);
  }
  return Barcode(bars);
}

Json to_json(const InterleavingCertificate& c) {
  return Json{{"a", to_json(c.a)},       {"b", to_json(c.b)},
              {"u", to_json(c.u)},       {"v", to_json(c.v)},
              {"h_source", to_json(c.h_source)}, {"h_target", to_json(c.h_target)}};
}

InterleavingCertificate certificate_from_json(const Json& j, const std::string& path) {
  InterleavingCertificate c;
  c.a = rational_at(field(j, "a", path), child(path, "a"));
  c.b = rational_at(field(j, "b", path), child(path, "b"));
  c.u = matrix_from_json(field(j, "u", path), child(path, "u"));
  c.v = matrix_from_json(field(j, "v", path), child(path, "v"));
  c.h_source = matrix_from_json(field(j, "h_source", path), child(path, "h_source"));
  c.h_target = matrix_from_json(field(j, "h_target", path), child(path, "h_target"));
  return c;
}

Json to_json(const MetricGraph& g, const WGenerator& w) {
  return Json{{"basepoint", to_json(g, w.basepoint)}, {"level", to_json(w.level)}, {"degree", w.degree}};
}

WGenerator w_generator_from_json(const Json& j, const MetricGraph& g, const std::string& path) {
  return WGenerator{point_from_json(field(j, "basepoint", path), g, child(path, "basepoint")),
                    rational_at(field(j, "level", path), child(path, "level")),
                    static_cast<int>(integer_at(field(j, "degree", path), child(path, "degree")))};
}

// ---------------------------------------------------------------------------

Json certificate_document(const TwistedComplex& F, const TwistedComplex& G, const InterleavingCertificate& c) {
  Json out = to_json(c);
  out["graph"] = to_json(*F.graph());
  out["source"] = to_json(F);
  out["target"] = to_json(G);
  return document(kCertificate, out);
}

Json record_document(const ConeTransportRecord& r) {
  check_record(r);
  Json out{{"lemma", r.lemma},
           {"epsilon", to_json(r.epsilon)},
           {"claimed_bound", to_json(r.claimed_bound)},
           {"graph", to_json(*r.input.graph())},
           {"input", to_json(r.input)},
           {"output", to_json(r.output)},
           {"certificate", to_json(r.certificate)},
           {"trace", r.trace}};
  return document(kRecord, out);
}

Json densify_report(const DensityReport& r, const Provenance& p) {
  const auto& g = *r.input.graph();
  Json gens = Json::array();
  for (const auto& w : r.generators) gens.push_back(to_json(g, w));
  Json shifts = Json::array();
  for (const auto& s : r.layer_shifts) shifts.push_back(to_json(s));
  Json out{{"kind", "densify"},
           {"tool", tool()},
           {"command", p.command},
           {"graph", to_json(g)},
           {"input", to_json(r.input)},
           {"output", to_json(r.output)},
           {"certificate", to_json(r.certificate)},
           {"epsilon", to_json(r.epsilon)},
           {"mesh", to_json(r.mesh)},
           {"certified_bound", to_json(r.certified_bound)},
           {"cost", to_json(r.certificate.cost())},
           {"within_bound", r.within_bound()},
           {"costs", Json{{"cech", to_json(r.cech_cost)}, {"piece", to_json(r.piece_cost)},
                          {"transport", to_json(r.transport_cost)}}},
           {"measured", Json{{"lower", to_json(r.measured_lower)}, {"upper", to_json(r.measured_upper)}}},
           {"layers", Json{{"sizes", r.layer_sizes}, {"shifts", shifts}}},
           {"generators", gens},
           {"cover", Json{{"pieces", r.cover.pieces.size()},
                          {"overlaps", r.cover.nerve.size()},
                          {"root", r.root},
                          {"tree_overlaps", r.tree_overlaps}}},
           {"trace", r.trace}};
  return document(kReport, out);
}

DensityReport densify_report_from_json(const Json& doc) {
  DensityReport r;
  auto graph = share(graph_from_json(field(doc, "graph", ""), "/graph"));
  r.input = complex_from_json(field(doc, "input", ""), graph, "/input");
  r.output = complex_from_json(field(doc, "output", ""), graph, "/output");
  r.certificate = certificate_from_json(field(doc, "certificate", ""), "/certificate");
  r.epsilon = rational_at(field(doc, "epsilon", ""), "/epsilon");
  r.mesh = rational_at(field(doc, "mesh", ""), "/mesh");
  r.certified_bound = rational_at(field(doc, "certified_bound", ""), "/certified_bound");
  const auto& layers = field(doc, "layers", "");
  const auto& sizes = array_at(field(layers, "sizes", "/layers"), "/layers/sizes");
  for (std::size_t k = 0; k < sizes.size(); ++k)
    r.layer_sizes.push_back(static_cast<std::size_t>(integer_at(sizes[k], child("/layers/sizes", k))));
  const auto& shifts = array_at(field(layers, "shifts", "/layers"), "/layers/shifts");
  for (std::size_t k = 0; k < shifts.size(); ++k) r.layer_shifts.push_back(rational_at(shifts[k], child("/layers/shifts", k)));
  const auto& gens = array_at(field(doc, "generators", ""), "/generators");
  for (std::size_t k = 0; k < gens.size(); ++k) r.generators.push_back(w_generator_from_json(gens[k], *graph, child("/generators", k)));
  const auto& costs = field(doc, "costs", "");
  r.cech_cost = rational_at(field(costs, "cech", "/costs"), "/costs/cech");
  r.piece_cost = rational_at(field(costs, "piece", "/costs"), "/costs/piece");
  r.transport_cost = rational_at(field(costs, "transport", "/costs"), "/costs/transport");
  const auto& measured = field(doc, "measured", "");
  r.measured_lower = ext_at(field(measured, "lower", "/measured"), "/measured/lower");
  r.measured_upper = ext_at(field(measured, "upper", "/measured"), "/measured/upper");
  const auto& trace = array_at(field(doc, "trace", ""), "/trace");
  for (std::size_t k = 0; k < trace.size(); ++k) r.trace.push_back(string_at(trace[k], child("/trace", k)));
  const auto& cover = field(doc, "cover", "");
  r.root = static_cast<std::size_t>(integer_at(field(cover, "root", "/cover"), "/cover/root"));
  const auto& kept = array_at(field(cover, "tree_overlaps", "/cover"), "/cover/tree_overlaps");
  for (std::size_t k = 0; k < kept.size(); ++k)
    r.tree_overlaps.push_back(static_cast<std::size_t>(integer_at(kept[k], child("/cover/tree_overlaps", k))));
  return r;
}

Json distance_report(const TwistedComplex& F, const TwistedComplex& G, const DistanceResult& r, const Provenance& p) {
  const auto& g = *F.graph();
  Json infeasible = Json::array();
  for (const auto& [a, b] : r.infeasible) infeasible.push_back(Json::array({to_json(a), to_json(b)}));
  Json stalks = Json::array();
  for (const auto& s : r.stalks)
    stalks.push_back(Json{{"point", to_json(g, s.point)},
                          {"source", to_json(s.source)},
                          {"target", to_json(s.target)},
                          {"bottleneck", to_json(s.bottleneck)},
                          {"interleaving", to_json(s.interleaving)}});
  const bool exact = r.mode == DistanceResult::Mode::Exact;
  Json out{{"kind", "distance"},
           {"tool", tool()},
           {"command", p.command},
           {"graph", to_json(g)},
           {"source", to_json(F)},
           {"target", to_json(G)},
           {"mode", exact ? "exact" : "bounds"},
           {"lower", to_json(r.lower)},
           {"upper", to_json(r.upper)},
           {"value", exact ? to_json(r.upper) : Json(nullptr)},
           {"witness", r.witness ? to_json(*r.witness) : Json(nullptr)},
           {"infeasible", infeasible},
           {"stalks", stalks},
           {"hit_cap", r.hit_cap}};
  return document(kReport, out);
}

Json decompose_report(const TwistedComplex& F, const GraphPoint& x, const Stalk& stalk, const GabrielDecomposition& d,
                      const Provenance& p) {
  const auto& g = *F.graph();
  Json out{{"kind", "decompose"},
           {"tool", tool()},
           {"command", p.command},
           {"graph", to_json(g)},
           {"source", to_json(F)},
           {"point", to_json(g, x)},
           {"stalk", to_json(stalk.complex)},
           {"kept", stalk.kept},
           {"barcode", to_json(d.barcode)},
           {"tower", to_json(d.tower)},
           {"certificate", to_json(d.certificate)}};
  return document(kReport, out);
}

Json irdim_report(const std::vector<IrdimGroup>& groups, const Rational& epsilon, const Provenance& p) {
  Json gj = Json::array(), items = Json::array(), failures = Json::array();
  bool two_layers = true;
  for (const auto& group : groups) {
    const auto& g = *group.graph;
    Json family = Json::array();
    for (const auto& w : group.family) family.push_back(to_json(g, w));
    Json chains = Json::array();
    for (const auto& c : group.solo.chains) {
      Json steps = Json::array();
      for (const auto& s : c.steps) steps.push_back(Json{{"at", to_json(g, s.at)}, {"step", to_json(s.step)}});
      chains.push_back(Json{{"from", c.from}, {"to", c.to}, {"longest", to_json(c.longest)}, {"ok", c.ok},
                            {"steps", steps}});
    }
    gj.push_back(Json{{"graph", to_json(g)}, {"family", family}, {"chains", chains}});
    for (const auto& item : group.solo.items) {
      two_layers = two_layers && item.ok && item.layers == 2;
      items.push_back(Json{{"name", item.name},
                           {"layers", item.layers},
                           {"cost", to_json(item.cost)},
                           {"bound", to_json(item.bound)},
                           {"replays", item.replays},
                           {"ok", item.ok},
                           {"report", item.report ? densify_report(*item.report, p) : Json(nullptr)}});
    }
    for (const auto& f : group.solo.failures) failures.push_back(f);
  }
  Json out{{"kind", "irdim"},
           {"tool", tool()},
           {"command", p.command},
           {"epsilon", to_json(epsilon)},
           {"groups", gj},
           {"items", items},
           {"failures", failures},
           {"two_layers_suffice", two_layers && failures.empty()}};
  return document(kReport, out);
}

// ---------------------------------------------------------------------------

namespace {

Replay fail(std::string why) { return Replay{false, std::move(why)}; }

Replay verify_densify(const Json& doc) {
  auto r = densify_report_from_json(doc);
  if (auto c = check_report(r); !c) return c;
  if (rational_at(field(doc, "cost", ""), "/cost") != r.certificate.cost()) return fail("recorded cost differs");
  if (r.measured_upper > ExtValue(r.certificate.cost())) return fail("measured upper bound above the certificate");
  return {};
}

Replay verify_distance(const Json& doc) {
  auto graph = share(graph_from_json(field(doc, "graph", ""), "/graph"));
  auto F = complex_from_json(field(doc, "source", ""), graph, "/source");
  auto G = complex_from_json(field(doc, "target", ""), graph, "/target");
  auto upper = ext_at(field(doc, "upper", ""), "/upper");
  auto lower = ext_at(field(doc, "lower", ""), "/lower");
  if (upper < lower) return fail("upper bound below lower bound");
  const auto& w = field(doc, "witness", "");
  if (w.is_null()) {
    if (upper.finite()) return fail("finite upper bound without a witness");
    return {};
  }
  auto cert = certificate_from_json(w, "/witness");
  if (auto rp = replay(F, G, cert); !rp) return rp;
  if (!(ExtValue(cert.cost()) == upper)) return fail("witness cost differs from the upper bound");
  if (string_at(field(doc, "mode", ""), "/mode") == "exact" && !(lower == upper))
    return fail("exact mode with a gap between bounds");
  return {};
}

Replay verify_decompose(const Json& doc) {
  auto stalk = complex_from_json(field(doc, "stalk", ""), point_base(), "/stalk");
  auto tower = complex_from_json(field(doc, "tower", ""), point_base(), "/tower");
  auto bars = barcode_from_json(field(doc, "barcode", ""), "/barcode");
  auto cert = certificate_from_json(field(doc, "certificate", ""), "/certificate");
  if (!(tower == cone_tower_from_barcode(bars))) return fail("tower does not match the barcode");
  return replay(stalk, tower, cert);
}

Replay verify_irdim(const Json& doc) {
  const auto& items = array_at(field(doc, "items", ""), "/items");
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& rep = field(items[k], "report", child("/items", k));
    if (!rep.is_null()) {
      auto r = verify_densify(rep);
      if (!r) return fail("item " + std::to_string(k) + ": " + r.reason);
    }
  }
  return {};
}

}  // namespace

Replay verify_document(const Json& doc) {
  const auto tag = schema_of(doc);
  if (tag == kCertificate) {
    auto graph = share(graph_from_json(field(doc, "graph", ""), "/graph"));
    auto F = complex_from_json(field(doc, "source", ""), graph, "/source");
    auto G = complex_from_json(field(doc, "target", ""), graph, "/target");
    return replay(F, G, certificate_from_json(doc));
  }
  if (tag == kRecord) {
    auto graph = share(graph_from_json(field(doc, "graph", ""), "/graph"));
    auto F = complex_from_json(field(doc, "input", ""), graph, "/input");
    auto G = complex_from_json(field(doc, "output", ""), graph, "/output");
    auto cert = certificate_from_json(field(doc, "certificate", ""), "/certificate");
    if (auto rp = replay(F, G, cert); !rp) return rp;
    if (cert.cost() > rational_at(field(doc, "claimed_bound", ""), "/claimed_bound"))
      return fail("certificate cost exceeds the claimed bound");
    return {};
  }
  if (tag == kReport) {
    const auto& kind = string_at(field(doc, "kind", ""), "/kind");
    if (kind == "densify") return verify_densify(doc);
    if (kind == "distance") return verify_distance(doc);
    if (kind == "decompose") return verify_decompose(doc);
    if (kind == "irdim") return verify_irdim(doc);
    bad("/kind", "unknown report kind \"" + kind + "\"");
  }
  bad("/schema", "nothing to verify in a " + tag + " document");
}

}  // namespace conedensity::io
