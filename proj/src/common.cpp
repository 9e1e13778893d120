#include "wlmsc/common.hpp"

namespace wlmsc {

const char* to_string(WarpOp op) {
  switch (op) {
    case WarpOp::Mask: return "MASK";
    case WarpOp::Rand: return "RAND";
    case WarpOp::Drop: return "DROP";
    case WarpOp::Insert: return "INSERT";
    case WarpOp::Keep: return "KEEP";
  }
  throw std::logic_error("invalid WarpOp");
}

WarpOp warp_op_from_string(const std::string& name) {
  if (name == "MASK") return WarpOp::Mask;
  if (name == "RAND") return WarpOp::Rand;
  if (name == "DROP") return WarpOp::Drop;
  if (name == "INSERT") return WarpOp::Insert;
  if (name == "KEEP") return WarpOp::Keep;
  throw std::invalid_argument("unknown warping operation: " + name);
}

}  // namespace wlmsc
