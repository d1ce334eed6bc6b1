// conedensity command line: densify, verify, distance, decompose, irdim.

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "conedensity/io.hpp"

using namespace conedensity;
using namespace conedensity::io;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCertificate = 2;
constexpr int kExitUndecided = 3;
constexpr int kExitInput = 4;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::CertificateFailure:
      return kExitCertificate;
    case ErrorKind::UndecidedAtCap:
      return kExitUndecided;
    default:
      return kExitInput;
  }
}

// Replay command: argv without the options that do not change the output.
std::string replay_command(int argc, char** argv) {
  std::string out = "conedensity";
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    if (a == "--threads" || a == "--out" || a == "-o") {
      ++k;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0 || a.rfind("--out=", 0) == 0) continue;
    out += " " + a;
  }
  return out;
}

Rational rational_arg(const std::string& s, const char* what) {
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": not a rational \"" + s + "\"");
  }
}

GraphRef load_graph(const std::string& path) {
  if (path.empty()) return nullptr;
  auto doc = read_file(path);
  if (doc.contains("schema")) expect_schema(doc, kGraph);
  auto g = graph_from_json(doc);
  if (g == *point_base()) return point_base();
  return std::make_shared<const MetricGraph>(std::move(g));
}

// A cx@1 document with an embedded graph, or one on the graph given by
// --graph. When both are present they must agree.
TwistedComplex load_complex(const std::string& path, const GraphRef& given) {
  auto doc = read_file(path);
  if (doc.contains("schema")) expect_schema(doc, kComplex);
  auto embedded = embedded_graph(doc);
  if (embedded && given && !(*embedded == *given))
    throw Error(ErrorKind::InvalidInput, path + ": embedded graph differs from --graph");
  try {
    return complex_from_json(doc, embedded ? embedded : given);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

// "v0" names a vertex; "e3@1/2" is offset 1/2 along edge 3.
GraphPoint parse_point(const std::string& s, const MetricGraph& g) {
  const auto at = s.find('@');
  if (at != std::string::npos && !s.empty() && s[0] == 'e') {
    std::size_t e = 0;
    try {
      e = std::stoul(s.substr(1, at - 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput, "--point: bad edge in \"" + s + "\"");
    }
    if (e >= g.edge_count()) throw Error(ErrorKind::InvalidInput, "--point: no edge " + std::to_string(e));
    const Rational t = rational_arg(s.substr(at + 1), "--point");
    if (t < 0 || t > g.edge(e).length) throw Error(ErrorKind::InvalidInput, "--point: offset outside edge");
    return GraphPoint::on_edge(g, e, t);
  }
  const auto& names = g.vertex_names();
  auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) throw Error(ErrorKind::InvalidInput, "--point: no vertex \"" + s + "\"");
  return GraphPoint::vertex(static_cast<std::size_t>(it - names.begin()));
}

void emit(const Json& doc, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << dump(doc);
  else
    write_file(out, doc);
}

struct Globals {
  int threads = 0;
  std::uint64_t cap = kDefaultCap;
  std::uint64_t seed = 1;
  std::string command;
};

int run_densify(const Globals& G, const std::string& graph, const std::string& sheaf, const std::string& eps,
                const std::string& out, bool measure) {
  auto F = load_complex(sheaf, load_graph(graph));
  DensifyOptions opts;
  opts.cap = G.cap;
  opts.measure = measure;
  auto r = densify(F, rational_arg(eps, "--epsilon"), opts);
  if (auto c = check_report(r); !c) throw Error(ErrorKind::CertificateFailure, "densify report: " + c.reason);
  emit(densify_report(r, Provenance{G.command}), out);
  std::cerr << "densify: " << r.generators.size() << " W generators in " << r.layers() << " layers, cost "
            << to_string(r.certificate.cost()) << " <= " << to_string(r.certified_bound) << ", measured ["
            << to_string(r.measured_lower) << ", " << to_string(r.measured_upper) << "]\n";
  return kExitOk;
}

int run_verify(const std::string& path) {
  auto doc = read_file(path);
  auto r = verify_document(doc);
  if (!r) {
    std::cerr << "verify: FAIL " << r.reason << "\n";
    return kExitCertificate;
  }
  std::cout << "verify: OK " << schema_of(doc) << "\n";
  return kExitOk;
}

int run_distance(const Globals& G, const std::string& graph, const std::string& a, const std::string& b, bool bounds,
                 std::size_t samples, bool exhaustive, const std::string& out) {
  auto gref = load_graph(graph);
  auto F = load_complex(a, gref);
  auto H = load_complex(b, gref);
  if (!(*F.graph() == *H.graph())) throw Error(ErrorKind::InvalidInput, "the two complexes live on different graphs");
  DistanceResult d;
  if (bounds) {
    const auto& g = *F.graph();
    auto pts = sample_points(g);
    std::mt19937_64 rng(G.seed);
    for (std::size_t k = 0; k < samples && g.edge_count() > 0; ++k) {
      std::uniform_int_distribution<std::size_t> edge(0, g.edge_count() - 1);
      std::uniform_int_distribution<int> num(0, 16);
      const auto e = edge(rng);
      pts.push_back(GraphPoint::on_edge(g, e, g.edge(e).length * Rational(num(rng)) / 16));
    }
    BoundsOptions opts;
    opts.cap = G.cap;
    d = distance_bounds(F, H, pts, opts);
  } else {
    d = distance_exact(F, H, G.cap, exhaustive ? Search::Exhaustive : Search::Pruned);
  }
  if (d.witness) require_valid(F, H, *d.witness, "distance witness");
  emit(distance_report(F, H, d, Provenance{G.command}), out);
  std::cerr << "distance: [" << to_string(d.lower) << ", " << to_string(d.upper) << "]"
            << (d.hit_cap ? " (cap reached)" : "") << "\n";
  if (!bounds && d.hit_cap && !(d.lower == d.upper)) return kExitUndecided;
  return kExitOk;
}

int run_decompose(const Globals& G, const std::string& graph, const std::string& sheaf, const std::string& point,
                  const std::string& out) {
  auto F = load_complex(sheaf, load_graph(graph));
  auto x = parse_point(point, *F.graph());
  auto stalk = stalk_at(F, x);
  auto dec = gabriel_decompose(stalk.complex);
  require_valid(stalk.complex, dec.tower, dec.certificate, "gabriel decomposition");
  emit(decompose_report(F, x, stalk, dec, Provenance{G.command}), out);
  std::cerr << "decompose: " << dec.barcode.bars().size() << " bars\n";
  return kExitOk;
}

int run_irdim(const Globals& G, const std::string& dir, const std::string& eps, const std::string& out) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorKind::InvalidInput, "--corpus: not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::InvalidInput, "--corpus: no .json files in " + dir);

  // Entries grouped by graph, groups in order of first appearance.
  std::vector<IrdimGroup> groups;
  std::vector<std::vector<CorpusEntry>> entries;
  for (const auto& f : files) {
    auto C = load_complex(f.string(), nullptr);
    std::size_t k = 0;
    while (k < groups.size() && !(*groups[k].graph == *C.graph())) ++k;
    if (k == groups.size()) {
      groups.push_back({C.graph(), {}, {}});
      entries.emplace_back();
    }
    entries[k].push_back({f.stem().string(), C});
  }
  const Rational epsilon = rational_arg(eps, "--epsilon");
  DensifyOptions opts;
  opts.cap = G.cap;
  bool ok = true;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    auto& grp = groups[k];
    for (std::size_t v = 0; v < grp.graph->vertex_count(); ++v) grp.family.push_back({GraphPoint::vertex(v), 0, 0});
    grp.solo = solo_approximator_check(grp.family, grp.graph, entries[k], epsilon, opts);
    ok = ok && grp.solo.ok();
    for (const auto& item : grp.solo.items)
      std::cerr << "irdim: " << item.name << " layers " << item.layers << " cost " << to_string(item.cost)
                << " bound " << to_string(item.bound) << (item.ok ? " ok" : " FAIL") << "\n";
  }
  emit(irdim_report(groups, epsilon, Provenance{G.command}), out);
  return ok ? kExitOk : kExitCertificate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified density of wrapped cone towers in the sheaf model"};
  app.require_subcommand(1);
  Globals G;
  app.add_option("--threads", G.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--cap", G.cap, "enumeration cap for interleaving searches");
  app.add_option("--seed", G.seed, "seed for random sample points");

  std::string graph, sheaf, eps, out, point, corpus, file_a, file_b, verify_path;
  bool exact = false, bounds = false, exhaustive = false, no_measure = false;
  std::size_t samples = 0;

  auto* densify_cmd = app.add_subcommand("densify", "approximate a sheaf by a two-layer W-generator tower");
  densify_cmd->add_option("--graph", graph, "graph@1 document (optional if the sheaf embeds its graph)");
  densify_cmd->add_option("--sheaf", sheaf, "cx@1 document")->required();
  densify_cmd->add_option("--epsilon", eps, "target precision, e.g. 1/4")->required();
  densify_cmd->add_option("--out,-o", out, "report path (default stdout)");
  densify_cmd->add_flag("--no-measure", no_measure, "skip the independent distance measurement");

  auto* verify_cmd = app.add_subcommand("verify", "replay a certificate, record or report document");
  verify_cmd->add_option("file", verify_path)->required();

  auto* distance_cmd = app.add_subcommand("distance", "interleaving distance between two complexes");
  distance_cmd->add_option("a", file_a)->required();
  distance_cmd->add_option("b", file_b)->required();
  distance_cmd->add_option("--graph", graph, "graph@1 document for complexes without an embedded graph");
  auto* exact_flag = distance_cmd->add_flag("--exact", exact, "exact search (default)");
  auto* bounds_flag = distance_cmd->add_flag("--bounds", bounds, "stalk lower bound and certified upper bound");
  exact_flag->excludes(bounds_flag);
  distance_cmd->add_flag("--exhaustive", exhaustive, "plain enumeration without pruning (cap applies)")->excludes(bounds_flag);
  distance_cmd->add_option("--samples", samples, "extra random sample points for --bounds")->needs(bounds_flag);
  distance_cmd->add_option("--out,-o", out, "report path (default stdout)");

  auto* decompose_cmd = app.add_subcommand("decompose", "stalk barcode and cone tower at a point");
  decompose_cmd->add_option("--graph", graph, "graph@1 document");
  decompose_cmd->add_option("--sheaf", sheaf, "cx@1 document")->required();
  decompose_cmd->add_option("--point", point, "vertex name, or e<k>@<offset>")->required();
  decompose_cmd->add_option("--out,-o", out, "report path (default stdout)");

  auto* irdim_cmd = app.add_subcommand("irdim", "two-layer sufficiency over a corpus directory");
  irdim_cmd->add_option("--corpus", corpus, "directory of cx@1 documents with embedded graphs")->required();
  irdim_cmd->add_option("--epsilon", eps, "target precision")->required();
  irdim_cmd->add_option("--out,-o", out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (G.threads > 0) omp_set_num_threads(G.threads);
  G.command = replay_command(argc, argv);

  try {
    if (*densify_cmd) return run_densify(G, graph, sheaf, eps, out, !no_measure);
    if (*verify_cmd) return run_verify(verify_path);
    if (*distance_cmd) return run_distance(G, graph, file_a, file_b, bounds, samples, exhaustive, out);
    if (*decompose_cmd) return run_decompose(G, graph, sheaf, point, out);
    if (*irdim_cmd) return run_irdim(G, corpus, eps, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }
  return kExitInput;
}
