#include "wlmsc/kernels.hpp"

#include <atomic>

namespace wlmsc::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel(bool enabled) { g_parallel.store(enabled, std::memory_order_relaxed); }

}  // namespace wlmsc::kernels
