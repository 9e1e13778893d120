#include "wlmsc/warp.hpp"

#include <cmath>
#include <stdexcept>

#include "wlmsc/rng.hpp"

namespace wlmsc {

void WarpPolicy::validate() const {
  if (!(select_rate >= 0.0 && select_rate <= 1.0)) {
    throw std::invalid_argument("select_rate must be in [0,1]");
  }
  double sum = 0.0;
  for (double w : op_weights) {
    if (w < 0.0) throw std::invalid_argument("op_weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("op_weights must sum to 1");
  }
}

namespace {

TokenId random_word(Rng& rng, int vocab_size) {
  return kNumSpecialTokens +
         static_cast<TokenId>(rng.next_below(static_cast<std::uint64_t>(vocab_size - kNumSpecialTokens)));
}

// Draws an op from the policy weights; when drop is disallowed its weight is
// renormalized away. Returns Keep-with-no-supervision as WarpOp count
// sentinel when no weight remains.
constexpr int kNoOp = -1;

int draw_op(Rng& rng, const WarpPolicy& policy, bool allow_drop) {
  double total = 0.0;
  for (int op = 0; op < kNumWarpOps; ++op) {
    if (!allow_drop && op == static_cast<int>(WarpOp::Drop)) continue;
    total += policy.op_weights[static_cast<size_t>(op)];
  }
  if (total <= 0.0) return kNoOp;
  double u = rng.next_double() * total;
  for (int op = 0; op < kNumWarpOps; ++op) {
    if (!allow_drop && op == static_cast<int>(WarpOp::Drop)) continue;
    u -= policy.op_weights[static_cast<size_t>(op)];
    if (u < 0.0) return op;
  }
  return static_cast<int>(WarpOp::Keep);
}

}  // namespace

WarpedSample warp_sentence(const TokenSeq& tokens, const WarpPolicy& policy,
                           int vocab_size) {
  policy.validate();
  if (tokens.empty()) throw std::invalid_argument("cannot warp an empty sentence");
  if (vocab_size <= kNumSpecialTokens) {
    throw std::invalid_argument("vocabulary has no non-special tokens");
  }
  for (TokenId id : tokens) {
    if (id < 0 || id >= vocab_size) throw std::invalid_argument("token id out of range");
    if (is_special(id)) throw std::invalid_argument("cannot warp special tokens");
  }

  Rng rng(policy.rng_seed);
  WarpedSample s;
  const size_t n = tokens.size();
  s.input_ids.reserve(n + 2);

  auto emit = [&](TokenId input, TokenId target, WarpOp op, bool supervised) {
    s.input_ids.push_back(input);
    s.target_ids.push_back(target);
    s.target_ops.push_back(op);
    s.loss_mask.push_back(supervised ? 1 : 0);
  };

  bool pending_drop = false;
  TokenId dropped = 0;
  for (size_t i = 0; i < n; ++i) {
    const TokenId tok = tokens[i];
    if (pending_drop) {
      // This position hosts the supervision for the dropped predecessor and
      // must survive unchanged.
      emit(tok, dropped, WarpOp::Drop, true);
      pending_drop = false;
      continue;
    }
    const bool selected = rng.next_double() < policy.select_rate;
    if (!selected) {
      emit(tok, tok, WarpOp::Keep, false);
      continue;
    }
    const bool allow_drop = i + 1 < n;
    const int op = draw_op(rng, policy, allow_drop);
    if (op == kNoOp) {
      emit(tok, tok, WarpOp::Keep, false);
      continue;
    }
    switch (static_cast<WarpOp>(op)) {
      case WarpOp::Mask:
        emit(kMaskId, tok, WarpOp::Mask, true);
        break;
      case WarpOp::Rand:
        emit(random_word(rng, vocab_size), tok, WarpOp::Rand, true);
        break;
      case WarpOp::Drop:
        pending_drop = true;
        dropped = tok;
        break;
      case WarpOp::Insert:
        emit(random_word(rng, vocab_size), kInsertId, WarpOp::Insert, true);
        emit(tok, tok, WarpOp::Keep, false);
        break;
      case WarpOp::Keep:
        emit(tok, tok, WarpOp::Keep, true);
        break;
    }
  }
  return s;
}

bool verify_sample(const WarpedSample& s, int vocab_size) {
  const size_t n = s.input_ids.size();
  if (s.target_ids.size() != n || s.target_ops.size() != n || s.loss_mask.size() != n) {
    return false;
  }
  for (size_t i = 0; i < n; ++i) {
    if (s.input_ids[i] < 0 || s.input_ids[i] >= vocab_size) return false;
    if (s.target_ids[i] < 0 || s.target_ids[i] >= vocab_size) return false;
    if (s.loss_mask[i] != 0 && s.loss_mask[i] != 1) return false;
    if (s.target_ops[i] == WarpOp::Insert && s.target_ids[i] != kInsertId) return false;
    if (s.loss_mask[i] == 0 &&
        (s.target_ops[i] != WarpOp::Keep || s.target_ids[i] != s.input_ids[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace wlmsc
