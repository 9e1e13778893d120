#pragma once

#include <string>
#include <vector>

#include "wlmsc/correction.hpp"
#include "wlmsc/edit.hpp"
#include "wlmsc/hypothesis.hpp"
#include "wlmsc/train.hpp"
#include "wlmsc/vocab.hpp"
#include "wlmsc/warp.hpp"

namespace wlmsc {

struct ScoredText {
  std::string text;
  double score = 0.0;
};

// One utterance as stored on disk:
// {"id", "golden", "hyps": [{"text", "score"}, ...], "human"}.
struct DatasetRecord {
  std::string id;
  std::string golden;
  std::vector<ScoredText> hyps;
  std::string human;
};

struct CorrectedEditRecord {
  int pos = 0;
  std::string op;
  std::string token;  // empty for INSERT
};

// {"id", "corrected", "edits": [{"pos", "op", "token"}, ...]}
struct CorrectedRecord {
  std::string id;
  std::string corrected;
  std::vector<CorrectedEditRecord> edits;
};

// Which transcription plays the role of the top hypothesis.
enum class CorrectionSource { Asr, Human };

std::vector<DatasetRecord> read_dataset(const std::string& path);
void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records);

std::vector<CorrectedRecord> read_corrected(const std::string& path);
void write_corrected(const std::string& path, const std::vector<CorrectedRecord>& records);

// For Asr, the best-scored hypothesis is the top and the rest are additional.
// For Human, the human transcription is the top and the ASR hypotheses (up to
// max_hypotheses - 1 of them) are additional; its score defaults to 1.
HypothesisSet to_hypothesis_set(const DatasetRecord& record, const Vocabulary& vocab,
                                CorrectionSource source, int max_hypotheses);

// Pretraining samples: {"input", "targets", "ops", "mask"}, arrays of ints.
void write_pretrain_samples(const std::string& path,
                            const std::vector<WarpedSample>& samples);
std::vector<WarpedSample> read_pretrain_samples(const std::string& path);

TrainExample pretrain_to_example(const WarpedSample& sample);

// Labeled alignment dump for one utterance (the `align` subcommand output).
struct AlignedRecord {
  std::string id;
  std::string golden;
  std::string top;  // [DUM]-padded top hypothesis
  std::vector<ScoredText> additional;
  std::vector<std::string> target_tokens;
  std::vector<std::string> target_ops;
  bool lossy = false;
};
void write_aligned(const std::string& path, const std::vector<AlignedRecord>& records);

}  // namespace wlmsc
