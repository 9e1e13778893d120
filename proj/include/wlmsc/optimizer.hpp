#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wlmsc/kernels.hpp"
#include "wlmsc/model.hpp"

namespace wlmsc {

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;

  void validate() const {
    if (lr < 0.0 || beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0 ||
        eps <= 0.0 || weight_decay < 0.0) {
      throw std::invalid_argument("bad optimizer config");
    }
  }
};

// First/second Adam moments, flattened across all tensors in declaration
// order. `step` counts applied updates.
template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  int64_t step = 0;

  explicit AdamState(size_t num_params)
      : m(num_params, T{0}), v(num_params, T{0}) {}
};

// Linear warmup to `lr`, then constant.
inline double lr_at_step(double lr, int64_t step, int64_t warmup_steps) {
  if (warmup_steps <= 0 || step >= warmup_steps) return lr;
  return lr * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
}

// One AdamW update. Weight decay is decoupled and applied only to weight
// matrices (kind 0), never to biases or layer-norm parameters.
template <typename T>
void adam_step(ModelParams<T>& params, ModelParams<T>& grads, AdamState<T>& state,
               const OptimizerConfig& cfg, double lr_now) {
  if (state.m.size() != params.num_params()) {
    throw std::invalid_argument("optimizer state size mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  struct View {
    T* p;
    T* g;
    size_t n;
    int kind;
  };
  std::vector<View> views;
  size_t offset = 0;
  params.for_each_tensor([&](const std::string&, T* ptr, size_t n, int kind) {
    views.push_back({ptr, nullptr, n, kind});
    offset += n;
  });
  size_t vi = 0;
  grads.for_each_tensor([&](const std::string&, T* ptr, size_t n, int) {
    if (views[vi].n != n) throw std::invalid_argument("gradient shape mismatch");
    views[vi].g = ptr;
    ++vi;
  });

  offset = 0;
  for (const View& view : views) {
    T* m = state.m.data() + offset;
    T* v = state.v.data() + offset;
    const bool decay = view.kind == 0 && cfg.weight_decay > 0.0;
    kernels::parallel_for(static_cast<int>(view.n), [&](int i) {
      const double g = static_cast<double>(view.g[i]);
      const double m_new = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * g;
      const double v_new =
          cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * g * g;
      m[i] = static_cast<T>(m_new);
      v[i] = static_cast<T>(v_new);
      const double update = (m_new / bc1) / (std::sqrt(v_new / bc2) + cfg.eps);
      double p = static_cast<double>(view.p[i]);
      p -= lr_now * update;
      if (decay) p -= lr_now * cfg.weight_decay * static_cast<double>(view.p[i]);
      view.p[i] = static_cast<T>(p);
    });
    offset += view.n;
  }
}

}  // namespace wlmsc
