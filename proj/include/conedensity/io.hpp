#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "conedensity/density.hpp"

namespace conedensity::io {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "conedensity";
inline constexpr const char* kToolVersion = "0.1.0";

// Schema tags, written as "conedensity/<tag>".
inline constexpr const char* kGraph = "graph@1";
inline constexpr const char* kFunction = "tamefn@1";
inline constexpr const char* kComplex = "cx@1";
inline constexpr const char* kBarcode = "barcode@1";
inline constexpr const char* kCertificate = "cert@1";
inline constexpr const char* kRecord = "record@1";
inline constexpr const char* kReport = "report@1";

// Errors carry the JSON pointer of the offending value:
// Error{InvalidInput, "at /edges/0/len: ..."}.

Json document(const char* tag, Json payload);
// Tag of a document; throws InvalidInput when missing or unknown.
std::string schema_of(const Json& doc);
void expect_schema(const Json& doc, const char* tag);

// Sorted keys, two-space indent, trailing newline.
std::string dump(const Json& doc);
Json parse_text(const std::string& text);
Json read_file(const std::string& path);
void write_file(const std::string& path, const Json& doc);

// Rationals are "p/q" strings; integers may also be plain JSON integers.
Json to_json(const Rational& q);
Json to_json(const ExtValue& v);
Rational rational_at(const Json& j, const std::string& path);
ExtValue ext_at(const Json& j, const std::string& path);

Json to_json(const MetricGraph& g);
MetricGraph graph_from_json(const Json& j, const std::string& path = "");

Json to_json(const MetricGraph& g, const GraphPoint& p);
GraphPoint point_from_json(const Json& j, const MetricGraph& g, const std::string& path);

Json to_json(const TameFunction& f);
TameFunction function_from_json(const Json& j, const GraphRef& graph, const std::string& path = "");

// Generators inline; a "functions" table with string references is
// accepted on input. With embed_graph the graph travels along.
Json to_json(const TwistedComplex& C, bool embed_graph = false);
// Uses the embedded graph when present, else `graph` (which may be null
// only when a graph is embedded).
TwistedComplex complex_from_json(const Json& j, const GraphRef& graph, const std::string& path = "");
// Embedded graph of a complex document, or null.
GraphRef embedded_graph(const Json& j, const std::string& path = "");

Json to_json(const Barcode& B);
Barcode barcode_from_json(const Json& j, const std::string& path = "");

Json to_json(const gf2::Matrix& m);
gf2::Matrix matrix_from_json(const Json& j, const std::string& path);

Json to_json(const InterleavingCertificate& c);
InterleavingCertificate certificate_from_json(const Json& j, const std::string& path = "");

Json to_json(const MetricGraph& g, const WGenerator& w);
WGenerator w_generator_from_json(const Json& j, const MetricGraph& g, const std::string& path);

// Self-contained certificate document: graph, source, target, maps.
Json certificate_document(const TwistedComplex& F, const TwistedComplex& G, const InterleavingCertificate& c);
// Refuses (CertificateFailure) records that do not replay.
Json record_document(const ConeTransportRecord& r);

struct Provenance {
  std::string command;  // replay command line
};

Json densify_report(const DensityReport& r, const Provenance& p);
DensityReport densify_report_from_json(const Json& doc);
Json distance_report(const TwistedComplex& F, const TwistedComplex& G, const DistanceResult& r, const Provenance& p);
Json decompose_report(const TwistedComplex& F, const GraphPoint& x, const Stalk& stalk,
                      const GabrielDecomposition& d, const Provenance& p);

// One graph's share of an irdim run: the vertex family, its chains and the
// corpus items living on that graph.
struct IrdimGroup {
  GraphRef graph;
  std::vector<WGenerator> family;
  SoloReport solo;
};
Json irdim_report(const std::vector<IrdimGroup>& groups, const Rational& epsilon, const Provenance& p);

// Replays a cert@1, record@1 or report@1 document using only its contents.
Replay verify_document(const Json& doc);

}  // namespace conedensity::io
