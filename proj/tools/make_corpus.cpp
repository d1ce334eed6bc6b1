// Writes the fixture corpus as self-contained cx@1 documents.

#include <filesystem>
#include <iostream>

#include "conedensity/io.hpp"
#include "corpus.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_corpus <dir>\n";
    return 4;
  }
  namespace io = conedensity::io;
  std::filesystem::create_directories(argv[1]);
  for (const auto& e : testing_support::fixture_corpus()) {
    const auto path = std::filesystem::path(argv[1]) / (e.name + ".json");
    io::write_file(path.string(), io::document(io::kComplex, io::to_json(e.sheaf, true)));
  }
  return 0;
}
