#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "wlmsc/corpusgen.hpp"
#include "wlmsc/io.hpp"

// Regenerates the bundled toy corpus: gen_toy_corpus <count> <seed> <out>.
int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: gen_toy_corpus <count> <seed> <out_path>\n";
    return 2;
  }
  const size_t count = std::strtoull(argv[1], nullptr, 10);
  const uint64_t seed = std::strtoull(argv[2], nullptr, 10);
  std::ostringstream out;
  for (const std::string& line : wlmsc::generate_toy_corpus(count, seed)) {
    out << line << '\n';
  }
  wlmsc::write_file_atomic(argv[3], out.str());
  std::cout << "wrote " << count << " lines to " << argv[3] << "\n";
  return 0;
}
