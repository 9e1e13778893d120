#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wlmsc/common.hpp"

namespace wlmsc {

struct ScoredHypothesis {
  TokenSeq tokens;
  double score = 0.0;  // confidence in [0,1]
};

// One utterance: the transcription being corrected plus side information.
// `top` is the ASR 1-best or a human transcription; `additional` holds up to
// max_hypotheses-1 further ASR hypotheses sorted by descending score.
struct HypothesisSet {
  std::string id;
  std::optional<TokenSeq> golden;  // absent at pure inference
  ScoredHypothesis top;
  std::vector<ScoredHypothesis> additional;
};

// Throws when invariants are violated: sorting, the additional-hypothesis
// cap, or special tokens inside raw hypotheses ([UNK] is allowed).
void validate(const HypothesisSet& set, int max_hypotheses);

}  // namespace wlmsc
