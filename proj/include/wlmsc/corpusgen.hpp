#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wlmsc {

// Deterministic voice-assistant-style command sentences from a small template
// grammar (~200 distinct words, well over 100k distinct sentences). Used for
// the bundled toy corpus and synthetic experiments.
std::vector<std::string> generate_toy_corpus(size_t count, uint64_t seed);

}  // namespace wlmsc
