#pragma once

#include <string>
#include <vector>

#include "wlmsc/common.hpp"
#include "wlmsc/hypothesis.hpp"

namespace wlmsc {

struct UtteranceWer {
  std::string id;
  int distance = 0;
  int golden_len = 0;
};

// Corpus-level word error rate: total edit distance divided by total golden
// length. Per-utterance WER can exceed 1.
struct WerReport {
  long total_edit_distance = 0;
  long total_golden_tokens = 0;
  std::vector<UtteranceWer> per_utterance;

  double wer() const {
    return static_cast<double>(total_edit_distance) / static_cast<double>(total_golden_tokens);
  }
};

WerReport corpus_wer(const std::vector<TokenSeq>& candidates,
                     const std::vector<TokenSeq>& goldens,
                     const std::vector<std::string>* ids = nullptr);

// Picks, per utterance, the hypothesis (top or additional) with minimum edit
// distance to golden; distance ties go to the higher confidence.
WerReport oracle_wer(const std::vector<HypothesisSet>& sets);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wlmsc
