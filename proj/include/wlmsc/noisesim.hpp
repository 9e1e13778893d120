#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wlmsc/dataset.hpp"
#include "wlmsc/hypothesis.hpp"
#include "wlmsc/rng.hpp"
#include "wlmsc/vocab.hpp"

namespace wlmsc {

struct NoiseProfile {
  double sub_rate = 0.28;
  double del_rate = 0.025;
  double ins_rate = 0.025;
  double confusion_temperature = 1.5;
  int n_best = 5;
  uint64_t seed = 0;

  void validate() const;
};

// Rates tuned so the emitted top hypothesis lands near 15% channel WER for
// the ASR-like profile and 12% for the human-like one.
NoiseProfile default_asr_profile(uint64_t seed);
NoiseProfile default_human_profile(uint64_t seed);

// Substitution sampler over non-special vocabulary ids, weighted by unigram
// frequency raised to 1/temperature.
class ConfusionTable {
 public:
  ConfusionTable(const Vocabulary& vocab, double temperature);

  TokenId sample(Rng& rng) const;
  // Resamples until the draw differs from `avoid` (needs >= 2 candidates).
  TokenId sample_excluding(Rng& rng, TokenId avoid) const;
  size_t size() const { return ids_.size(); }

 private:
  std::vector<TokenId> ids_;
  std::vector<double> cumulative_;
};

struct NoisyDraw {
  TokenSeq tokens;
  double confidence = 1.0;
  int corruptions = 0;
};

// One pass over the truth: substitute / delete by a shared uniform draw, then
// an independent insertion after each surviving slot. Deterministic per
// (truth, profile, draw_seed).
NoisyDraw corrupt(const TokenSeq& truth, const NoiseProfile& profile,
                  const ConfusionTable& table, uint64_t draw_seed);

// n_best independent draws; the most confident becomes the top hypothesis,
// the rest are additional, sorted by descending score.
HypothesisSet simulate_set(const TokenSeq& truth, const NoiseProfile& profile,
                           const ConfusionTable& table, uint64_t utterance_index,
                           const std::string& id);

struct CorpusSplits {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> dev;
  std::vector<DatasetRecord> test;
};

// Corrupts every source line with the ASR profile (n-best set) and the human
// profile (single draw), then splits by largest-remainder apportionment after
// a seeded shuffle.
CorpusSplits generate_corpus(const std::vector<std::string>& lines,
                             const Vocabulary& vocab, const NoiseProfile& asr_profile,
                             const NoiseProfile& human_profile,
                             const std::array<double, 3>& split_fractions,
                             uint64_t seed);

}  // namespace wlmsc
