#pragma once

#include <vector>

#include "wlmsc/edit.hpp"
#include "wlmsc/hypothesis.hpp"
#include "wlmsc/model.hpp"
#include "wlmsc/train.hpp"

namespace wlmsc {

struct PositionPrediction {
  TokenId token_id = kPadId;
  WarpOp op = WarpOp::Keep;
  double token_prob = 1.0;
  double op_prob = 1.0;
};

// Segment 0 is the [DUM]-padded top hypothesis; additional hypotheses follow
// in score order. Every segment is right-padded with [PAD] to the common
// length, position ids restart at 0 per segment, slot ids are the segment
// index.
struct AssembledInput {
  TokenSeq padded_top;  // segment-0 content before [PAD] padding
  Batch batch;          // single row, seq_len = num_segments * segment_len
  int segment_len = 0;
  int num_segments = 0;
};

// Throws "sequence too long" when any padded hypothesis exceeds
// config.max_positions.
AssembledInput assemble_input(const HypothesisSet& set, const ModelConfig& config);

// Fine-tuning example for one utterance: warp labels against the golden
// sentence for every segment, loss over all non-[PAD] positions.
TrainExample build_finetune_example(const HypothesisSet& set, const ModelConfig& config);

// Runs the model in evaluation mode and returns one prediction per non-[PAD]
// position of segment 0, [DUM] slots included.
std::vector<PositionPrediction> predict_top(const ModelParams<float>& params,
                                            const HypothesisSet& set);

struct ReconstructStats {
  int special_fallbacks = 0;  // special token predicted where a word was needed
};

// Inverse of the warping semantics. KEEP emits the input token ([DUM] slots
// emit nothing), RAND and MASK emit the predicted token, DROP emits the
// predicted token then the input token, INSERT emits nothing.
TokenSeq reconstruct(const TokenSeq& input, const std::vector<PositionPrediction>& preds,
                     ReconstructStats* stats = nullptr);

struct CorrectOptions {
  // Predicted ops with op_prob below this are demoted to KEEP; 0 applies
  // every predicted edit.
  double op_confidence_threshold = 0.0;
  bool use_additional = true;
};

struct AppliedEdit {
  int pos = 0;  // index into the padded top hypothesis
  WarpOp op = WarpOp::Keep;
  TokenId token = -1;  // predicted token where the op uses one, else -1
};

struct CorrectionResult {
  TokenSeq corrected;
  std::vector<AppliedEdit> edits;
  ReconstructStats stats;
};

CorrectionResult correct(const ModelParams<float>& params, const HypothesisSet& set,
                         const CorrectOptions& options = {});

}  // namespace wlmsc
