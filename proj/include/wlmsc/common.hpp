#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlmsc {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Special token ids are frozen at 0..4 so checkpoints and sample files stay
// portable across runs.
enum SpecialId : TokenId {
  kPadId = 0,
  kUnkId = 1,
  kMaskId = 2,
  kInsertId = 3,
  kDumId = 4,
};

inline constexpr int kNumSpecialTokens = 5;

inline constexpr const char* kPadTok = "[PAD]";
inline constexpr const char* kUnkTok = "[UNK]";
inline constexpr const char* kMaskTok = "[MASK]";
inline constexpr const char* kInsertTok = "[INSERT]";
inline constexpr const char* kDumTok = "[DUM]";

inline bool is_special(TokenId id) { return id >= 0 && id < kNumSpecialTokens; }

// The five warping operations. Label ids 0..4 in this order everywhere:
// sample files, the op head, checkpoints.
enum class WarpOp : std::uint8_t {
  Mask = 0,
  Rand = 1,
  Drop = 2,
  Insert = 3,
  Keep = 4,
};

inline constexpr int kNumWarpOps = 5;

const char* to_string(WarpOp op);
WarpOp warp_op_from_string(const std::string& name);  // throws on unknown name

}  // namespace wlmsc
