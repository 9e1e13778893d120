#pragma once

#include <array>
#include <cstdint>

#include "wlmsc/common.hpp"

namespace wlmsc {

// Controls sentence corruption for pretraining. op_weights is indexed by the
// WarpOp label id and must sum to 1.
struct WarpPolicy {
  double select_rate = 0.15;
  std::array<double, kNumWarpOps> op_weights = {0.2, 0.2, 0.2, 0.2, 0.2};
  std::uint64_t rng_seed = 0;

  void validate() const;  // throws on out-of-range rates or weights
};

// A corrupted sentence with per-position supervision for both heads.
struct WarpedSample {
  TokenSeq input_ids;
  TokenSeq target_ids;
  std::vector<WarpOp> target_ops;
  std::vector<std::uint8_t> loss_mask;  // 1 = supervised position
};

// Applies the five warping operations to a clean sentence. Deterministic in
// (tokens, policy). DROP supervision lands on the following surviving
// position, which is forced to stay intact; a DROP that would leave no
// surviving host is re-drawn from the remaining operations.
WarpedSample warp_sentence(const TokenSeq& tokens, const WarpPolicy& policy,
                           int vocab_size);

// True iff all WarpedSample invariants hold. Used by the generator pipeline
// and property tests.
bool verify_sample(const WarpedSample& sample, int vocab_size);

}  // namespace wlmsc
