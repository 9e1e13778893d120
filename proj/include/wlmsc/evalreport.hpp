#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlmsc/dataset.hpp"
#include "wlmsc/vocab.hpp"

namespace wlmsc {

struct BinStat {
  std::string label;
  size_t count = 0;
  int64_t golden_tokens = 0;
  int64_t original_edits = 0;
  int64_t corrected_edits = 0;

  double original_wer() const;
  double corrected_wer() const;
  // (original - corrected) / original * 100; absent when original WER is 0.
  std::optional<double> relative_diff() const;
};

struct EvaluationReport {
  size_t num_utterances = 0;
  int64_t golden_tokens = 0;
  int64_t original_edits = 0;
  int64_t corrected_edits = 0;
  int64_t oracle_edits = 0;
  std::vector<BinStat> confidence_bins;  // keyed on the ASR 1-best score
  std::vector<BinStat> wer_bins;         // keyed on per-utterance ASR-top WER
  double spearman_confidence_wer = 0.0;

  double original_wer() const;
  double corrected_wer() const;
  double oracle_wer() const;
  std::optional<double> relative_diff() const;

  std::string to_json() const;
  std::string to_table() const;
};

// Joins corrected output to the dataset by id and computes overall plus
// stratified WER. `source` picks which transcription counts as the original:
// the best ASR hypothesis or the human one. The oracle is always taken over
// the ASR n-best list. Throws when ids are missing from `corrected`, listing
// them.
EvaluationReport evaluate_corrections(const std::vector<DatasetRecord>& dataset,
                                      const std::vector<CorrectedRecord>& corrected,
                                      const Vocabulary& vocab, CorrectionSource source);

}  // namespace wlmsc
