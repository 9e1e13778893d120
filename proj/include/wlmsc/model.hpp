#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlmsc/common.hpp"
#include "wlmsc/kernels.hpp"
#include "wlmsc/model_config.hpp"
#include "wlmsc/rng.hpp"

namespace wlmsc {

// One flattened batch of [batch_size x seq_len] positions.
struct Batch {
  int batch_size = 0;
  int seq_len = 0;
  std::vector<TokenId> input_ids;
  std::vector<int32_t> position_ids;
  std::vector<int32_t> segment_ids;
  std::vector<uint8_t> attention_mask;  // 1 = real token, 0 = padding
  std::vector<TokenId> target_ids;
  std::vector<uint8_t> target_ops;
  std::vector<uint8_t> loss_mask;  // 1 = position contributes to the loss

  int flat_size() const { return batch_size * seq_len; }

  void validate(const ModelConfig& config) const {
    const size_t n = static_cast<size_t>(flat_size());
    if (batch_size <= 0 || seq_len <= 0) {
      throw std::invalid_argument("batch dimensions must be positive");
    }
    if (input_ids.size() != n || position_ids.size() != n || segment_ids.size() != n ||
        attention_mask.size() != n || target_ids.size() != n || target_ops.size() != n ||
        loss_mask.size() != n) {
      throw std::invalid_argument("batch field length mismatch");
    }
    for (size_t i = 0; i < n; ++i) {
      if (input_ids[i] < 0 || input_ids[i] >= config.vocab_size) {
        throw std::invalid_argument("batch input id out of vocabulary range");
      }
      if (position_ids[i] < 0 || position_ids[i] >= config.max_positions) {
        throw std::invalid_argument("batch position id out of range");
      }
      if (segment_ids[i] < 0 || segment_ids[i] >= config.max_hypotheses) {
        throw std::invalid_argument("batch segment id out of range");
      }
      if (attention_mask[i] > 1 || loss_mask[i] > 1) {
        throw std::invalid_argument("batch masks must be 0/1");
      }
      if (loss_mask[i] && !attention_mask[i]) {
        throw std::invalid_argument("loss mask set on a padded position");
      }
      if (loss_mask[i]) {
        if (target_ids[i] < 0 || target_ids[i] >= config.vocab_size) {
          throw std::invalid_argument("batch target id out of vocabulary range");
        }
        if (target_ops[i] >= kNumWarpOps) {
          throw std::invalid_argument("batch target op out of range");
        }
      }
    }
  }
};

template <typename T>
struct ModelParams {
  struct Layer {
    Mat<T> wq, wk, wv, wo;
    std::vector<T> bq, bk, bv, bo;
    std::vector<T> ln1_g, ln1_b;
    Mat<T> w1;
    std::vector<T> b1;
    Mat<T> w2;
    std::vector<T> b2;
    std::vector<T> ln2_g, ln2_b;
  };

  ModelConfig config;
  Mat<T> token_embedding;     // [vocab x d]
  Mat<T> position_embedding;  // [max_positions x d]
  Mat<T> slot_embedding;      // [max_hypotheses x d], present only when enabled
  std::vector<Layer> layers;
  Mat<T> token_head;  // [d x vocab], bias-free
  Mat<T> op_head;     // [d x num_ops], bias-free

  explicit ModelParams(const ModelConfig& cfg) : config(cfg) {
    config.validate();
    const int d = config.hidden_dim;
    token_embedding = Mat<T>(config.vocab_size, d);
    position_embedding = Mat<T>(config.max_positions, d);
    if (config.use_slot_embedding) slot_embedding = Mat<T>(config.max_hypotheses, d);
    layers.resize(config.num_layers);
    for (auto& l : layers) {
      l.wq = Mat<T>(d, d);
      l.wk = Mat<T>(d, d);
      l.wv = Mat<T>(d, d);
      l.wo = Mat<T>(d, d);
      l.bq.assign(d, T{0});
      l.bk.assign(d, T{0});
      l.bv.assign(d, T{0});
      l.bo.assign(d, T{0});
      l.ln1_g.assign(d, T{0});
      l.ln1_b.assign(d, T{0});
      l.w1 = Mat<T>(d, config.ff_dim);
      l.b1.assign(config.ff_dim, T{0});
      l.w2 = Mat<T>(config.ff_dim, d);
      l.b2.assign(d, T{0});
      l.ln2_g.assign(d, T{0});
      l.ln2_b.assign(d, T{0});
    }
    token_head = Mat<T>(d, config.vocab_size);
    op_head = Mat<T>(d, kNumWarpOps);
  }

  // Visits every tensor in declaration order; this order defines the
  // checkpoint layout. kind: 0 = weight matrix, 1 = bias, 2 = ln gain.
  template <typename Visitor>
  void for_each_tensor(Visitor&& v) {
    v("token_embedding", token_embedding.data.data(), token_embedding.size(), 0);
    v("position_embedding", position_embedding.data.data(), position_embedding.size(), 0);
    if (config.use_slot_embedding) {
      v("slot_embedding", slot_embedding.data.data(), slot_embedding.size(), 0);
    }
    for (size_t i = 0; i < layers.size(); ++i) {
      auto& l = layers[i];
      const std::string p = "layers." + std::to_string(i) + ".";
      v(p + "wq", l.wq.data.data(), l.wq.size(), 0);
      v(p + "bq", l.bq.data(), l.bq.size(), 1);
      v(p + "wk", l.wk.data.data(), l.wk.size(), 0);
      v(p + "bk", l.bk.data(), l.bk.size(), 1);
      v(p + "wv", l.wv.data.data(), l.wv.size(), 0);
      v(p + "bv", l.bv.data(), l.bv.size(), 1);
      v(p + "wo", l.wo.data.data(), l.wo.size(), 0);
      v(p + "bo", l.bo.data(), l.bo.size(), 1);
      v(p + "ln1_g", l.ln1_g.data(), l.ln1_g.size(), 2);
      v(p + "ln1_b", l.ln1_b.data(), l.ln1_b.size(), 1);
      v(p + "w1", l.w1.data.data(), l.w1.size(), 0);
      v(p + "b1", l.b1.data(), l.b1.size(), 1);
      v(p + "w2", l.w2.data.data(), l.w2.size(), 0);
      v(p + "b2", l.b2.data(), l.b2.size(), 1);
      v(p + "ln2_g", l.ln2_g.data(), l.ln2_g.size(), 2);
      v(p + "ln2_b", l.ln2_b.data(), l.ln2_b.size(), 1);
    }
    v("token_head", token_head.data.data(), token_head.size(), 0);
    v("op_head", op_head.data.data(), op_head.size(), 0);
  }

  template <typename Visitor>
  void for_each_tensor(Visitor&& v) const {
    const_cast<ModelParams*>(this)->for_each_tensor(
        [&](const std::string& name, T* ptr, size_t n, int kind) {
          v(name, static_cast<const T*>(ptr), n, kind);
        });
  }

  size_t num_params() const {
    size_t total = 0;
    for_each_tensor([&](const std::string&, const T*, size_t n, int) { total += n; });
    return total;
  }

  void zero() {
    for_each_tensor([](const std::string&, T* ptr, size_t n, int) {
      std::fill(ptr, ptr + n, T{0});
    });
  }
};

// Weight matrices get truncated-normal(0, 0.02) entries, layer-norm gains 1,
// everything else 0. Tensors are filled in declaration order from one stream,
// so the same config and seed always reproduce identical parameters.
template <typename T>
ModelParams<T> init_params(const ModelConfig& config) {
  ModelParams<T> params(config);
  Rng rng(config.init_seed);
  params.for_each_tensor([&](const std::string&, T* ptr, size_t n, int kind) {
    if (kind == 0) {
      for (size_t i = 0; i < n; ++i) {
        ptr[i] = static_cast<T>(rng.next_truncated_normal(0.02));
      }
    } else if (kind == 2) {
      std::fill(ptr, ptr + n, T{1});
    } else {
      std::fill(ptr, ptr + n, T{0});
    }
  });
  return params;
}

template <typename T>
struct LayerCache {
  Mat<T> x_in, q, k, v, ctx;
  std::vector<T> probs;  // [B*H*L*L]
  Mat<T> resid1, ln1_out, ff_pre, ff_act, resid2, ln2_out;
  std::vector<T> ln1_mean, ln1_rstd, ln2_mean, ln2_rstd;
};

template <typename T>
struct Activations {
  Mat<T> embedded;
  std::vector<LayerCache<T>> layers;
  Mat<T> final_out;
  bool training = false;
  uint64_t dropout_seed = 0;
};

template <typename T>
struct ForwardResult {
  Mat<T> token_logits;  // [B*L x vocab]
  Mat<T> op_logits;     // [B*L x num_ops]
};

struct LossStats {
  double loss = 0.0;
  double token_loss = 0.0;
  double op_loss = 0.0;
  int supervised = 0;
};

namespace detail {

// Inverted dropout driven by a counter-based hash, so the mask at an index
// never depends on evaluation order and the backward pass can recompute it.
template <typename T>
void apply_dropout(Mat<T>& m, double rate, uint64_t seed) {
  if (rate <= 0.0) return;
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  kernels::parallel_for(m.rows, [&](int i) {
    T* row = m.row(i);
    const uint64_t base = static_cast<uint64_t>(i) * m.cols;
    for (int j = 0; j < m.cols; ++j) {
      if (uniform_at(seed, base + j) < rate) {
        row[j] = T{0};
      } else {
        row[j] *= scale;
      }
    }
  });
}

inline uint64_t dropout_site_seed(uint64_t base, int layer, int site) {
  return derive_seed(base, "dropout", static_cast<uint64_t>(layer) * 8 + site);
}

}  // namespace detail

template <typename T>
ForwardResult<T> forward(const ModelParams<T>& params, const Batch& batch, bool training,
                         uint64_t dropout_seed, Activations<T>& acts) {
  const ModelConfig& cfg = params.config;
  batch.validate(cfg);
  const int b_count = batch.batch_size;
  const int seq = batch.seq_len;
  const int n = b_count * seq;
  const int d = cfg.hidden_dim;
  const int heads = cfg.num_heads;
  const int hd = cfg.head_dim();
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(hd)));
  const bool drop = training && cfg.dropout_rate > 0.0;

  acts.training = drop;
  acts.dropout_seed = dropout_seed;
  acts.layers.assign(cfg.num_layers, LayerCache<T>{});

  acts.embedded = Mat<T>(n, d);
  kernels::parallel_for(n, [&](int i) {
    T* row = acts.embedded.row(i);
    const T* tok = params.token_embedding.row(batch.input_ids[i]);
    const T* pos = params.position_embedding.row(batch.position_ids[i]);
    for (int j = 0; j < d; ++j) row[j] = tok[j] + pos[j];
    if (cfg.use_slot_embedding) {
      const T* slot = params.slot_embedding.row(batch.segment_ids[i]);
      for (int j = 0; j < d; ++j) row[j] += slot[j];
    }
  });
  if (drop) {
    detail::apply_dropout(acts.embedded, cfg.dropout_rate,
                          detail::dropout_site_seed(dropout_seed, -1, 0));
  }

  Mat<T> x = acts.embedded;
  for (int li = 0; li < cfg.num_layers; ++li) {
    const auto& l = params.layers[li];
    LayerCache<T>& c = acts.layers[li];
    c.x_in = x;

    c.q = Mat<T>(n, d);
    c.k = Mat<T>(n, d);
    c.v = Mat<T>(n, d);
    kernels::matmul(x, l.wq, c.q);
    kernels::add_bias(c.q, l.bq);
    kernels::matmul(x, l.wk, c.k);
    kernels::add_bias(c.k, l.bk);
    kernels::matmul(x, l.wv, c.v);
    kernels::add_bias(c.v, l.bv);

    c.ctx = Mat<T>(n, d);
    c.probs.assign(static_cast<size_t>(b_count) * heads * seq * seq, T{0});
    kernels::parallel_for(b_count * heads, [&](int bh) {
      const int b = bh / heads;
      const int h = bh % heads;
      const int off = h * hd;
      std::vector<T> scores(seq);
      for (int i = 0; i < seq; ++i) {
        const int qi = b * seq + i;
        if (!batch.attention_mask[qi]) continue;
        const T* qrow = c.q.row(qi) + off;
        T max_s = T{0};
        bool any = false;
        for (int j = 0; j < seq; ++j) {
          const int kj = b * seq + j;
          if (!batch.attention_mask[kj]) continue;
          const T* krow = c.k.row(kj) + off;
          T s{0};
          for (int e = 0; e < hd; ++e) s += qrow[e] * krow[e];
          s *= scale;
          scores[j] = s;
          if (!any || s > max_s) max_s = s;
          any = true;
        }
        if (!any) continue;
        T denom{0};
        for (int j = 0; j < seq; ++j) {
          if (!batch.attention_mask[b * seq + j]) continue;
          scores[j] = std::exp(scores[j] - max_s);
          denom += scores[j];
        }
        T* prow = c.probs.data() + ((static_cast<size_t>(bh) * seq) + i) * seq;
        T* crow = c.ctx.row(qi) + off;
        for (int j = 0; j < seq; ++j) {
          if (!batch.attention_mask[b * seq + j]) continue;
          const T p = scores[j] / denom;
          prow[j] = p;
          const T* vrow = c.v.row(b * seq + j) + off;
          for (int e = 0; e < hd; ++e) crow[e] += p * vrow[e];
        }
      }
    });

    Mat<T> attn_proj(n, d);
    kernels::matmul(c.ctx, l.wo, attn_proj);
    kernels::add_bias(attn_proj, l.bo);
    if (drop) {
      detail::apply_dropout(attn_proj, cfg.dropout_rate,
                            detail::dropout_site_seed(dropout_seed, li, 1));
    }
    c.resid1 = c.x_in;
    kernels::add_scaled(c.resid1, attn_proj, T{1});

    c.ln1_out = Mat<T>(n, d);
    c.ln1_mean.assign(n, T{0});
    c.ln1_rstd.assign(n, T{0});
    kernels::layer_norm_forward(c.resid1, l.ln1_g, l.ln1_b, c.ln1_out, c.ln1_mean,
                                c.ln1_rstd, static_cast<T>(cfg.layer_norm_eps));

    c.ff_pre = Mat<T>(n, cfg.ff_dim);
    kernels::matmul(c.ln1_out, l.w1, c.ff_pre);
    kernels::add_bias(c.ff_pre, l.b1);
    c.ff_act = Mat<T>(n, cfg.ff_dim);
    kernels::gelu_forward(c.ff_pre, c.ff_act);
    Mat<T> ff_out(n, d);
    kernels::matmul(c.ff_act, l.w2, ff_out);
    kernels::add_bias(ff_out, l.b2);
    if (drop) {
      detail::apply_dropout(ff_out, cfg.dropout_rate,
                            detail::dropout_site_seed(dropout_seed, li, 2));
    }
    c.resid2 = c.ln1_out;
    kernels::add_scaled(c.resid2, ff_out, T{1});

    c.ln2_out = Mat<T>(n, d);
    c.ln2_mean.assign(n, T{0});
    c.ln2_rstd.assign(n, T{0});
    kernels::layer_norm_forward(c.resid2, l.ln2_g, l.ln2_b, c.ln2_out, c.ln2_mean,
                                c.ln2_rstd, static_cast<T>(cfg.layer_norm_eps));
    x = c.ln2_out;
  }

  acts.final_out = x;
  ForwardResult<T> out;
  out.token_logits = Mat<T>(n, cfg.vocab_size);
  out.op_logits = Mat<T>(n, kNumWarpOps);
  kernels::matmul(x, params.token_head, out.token_logits);
  kernels::matmul(x, params.op_head, out.op_logits);
  return out;
}

// Mean cross-entropy over supervised positions for both heads; sums and the
// log-sum-exp run in double regardless of T.
template <typename T>
LossStats compute_loss(const Mat<T>& token_logits, const Mat<T>& op_logits,
                       const Batch& batch, Mat<T>* d_token = nullptr,
                       Mat<T>* d_op = nullptr) {
  const int n = batch.flat_size();
  if (token_logits.rows != n || op_logits.rows != n) {
    throw std::invalid_argument("logit row count does not match batch");
  }
  int supervised = 0;
  for (int i = 0; i < n; ++i) supervised += batch.loss_mask[i];
  if (supervised == 0) throw std::invalid_argument("no supervised positions");

  if (d_token) *d_token = Mat<T>(n, token_logits.cols);
  if (d_op) *d_op = Mat<T>(n, op_logits.cols);

  const double inv_m = 1.0 / supervised;
  double token_total = 0.0;
  double op_total = 0.0;
  std::vector<double> token_losses(n, 0.0), op_losses(n, 0.0);
  kernels::parallel_for(n, [&](int i) {
    if (!batch.loss_mask[i]) return;
    auto head = [&](const Mat<T>& logits, int target, Mat<T>* grad) {
      const T* row = logits.row(i);
      double max_l = static_cast<double>(row[0]);
      for (int j = 1; j < logits.cols; ++j) {
        max_l = std::max(max_l, static_cast<double>(row[j]));
      }
      double denom = 0.0;
      for (int j = 0; j < logits.cols; ++j) {
        denom += std::exp(static_cast<double>(row[j]) - max_l);
      }
      const double log_denom = std::log(denom) + max_l;
      if (grad) {
        T* grow = grad->row(i);
        for (int j = 0; j < logits.cols; ++j) {
          const double p = std::exp(static_cast<double>(row[j]) - log_denom);
          grow[j] = static_cast<T>((p - (j == target ? 1.0 : 0.0)) * inv_m);
        }
      }
      return log_denom - static_cast<double>(row[target]);
    };
    token_losses[i] = head(token_logits, batch.target_ids[i], d_token);
    op_losses[i] = head(op_logits, batch.target_ops[i], d_op);
  });
  for (int i = 0; i < n; ++i) {
    token_total += token_losses[i];
    op_total += op_losses[i];
  }

  LossStats stats;
  stats.supervised = supervised;
  stats.token_loss = token_total * inv_m;
  stats.op_loss = op_total * inv_m;
  stats.loss = stats.token_loss + stats.op_loss;
  return stats;
}

// Full backward pass; fills `grads` (same shape as params, zeroed here) and
// returns the loss stats from the cached forward. Throws if any gradient
// turns non-finite, naming the tensor.
template <typename T>
LossStats backward(const ModelParams<T>& params, const Batch& batch,
                   const ForwardResult<T>& fwd, const Activations<T>& acts,
                   ModelParams<T>& grads) {
  const ModelConfig& cfg = params.config;
  const int b_count = batch.batch_size;
  const int seq = batch.seq_len;
  const int n = b_count * seq;
  const int d = cfg.hidden_dim;
  const int heads = cfg.num_heads;
  const int hd = cfg.head_dim();
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(hd)));

  grads.zero();
  Mat<T> d_token, d_op;
  const LossStats stats = compute_loss(fwd.token_logits, fwd.op_logits, batch, &d_token, &d_op);

  Mat<T> dx(n, d);
  kernels::matmul_bt(d_token, params.token_head, dx);
  kernels::matmul_bt(d_op, params.op_head, dx, /*accumulate=*/true);
  kernels::matmul_at(acts.final_out, d_token, grads.token_head, /*accumulate=*/true);
  kernels::matmul_at(acts.final_out, d_op, grads.op_head, /*accumulate=*/true);

  for (int li = cfg.num_layers - 1; li >= 0; --li) {
    const auto& l = params.layers[li];
    auto& g = grads.layers[li];
    const LayerCache<T>& c = acts.layers[li];

    // ln2
    Mat<T> d_resid2(n, d);
    kernels::layer_norm_backward(dx, c.resid2, l.ln2_g, c.ln2_mean, c.ln2_rstd, d_resid2,
                                 g.ln2_g, g.ln2_b);

    // ffn branch
    Mat<T> d_ff_out = d_resid2;
    if (acts.training) {
      detail::apply_dropout(d_ff_out, cfg.dropout_rate,
                            detail::dropout_site_seed(acts.dropout_seed, li, 2));
    }
    kernels::matmul_at(c.ff_act, d_ff_out, g.w2, /*accumulate=*/true);
    kernels::col_sums(d_ff_out, g.b2);
    Mat<T> d_ff_act(n, cfg.ff_dim);
    kernels::matmul_bt(d_ff_out, l.w2, d_ff_act);
    Mat<T> d_ff_pre(n, cfg.ff_dim);
    kernels::gelu_backward(d_ff_act, c.ff_pre, d_ff_pre);
    kernels::matmul_at(c.ln1_out, d_ff_pre, g.w1, /*accumulate=*/true);
    kernels::col_sums(d_ff_pre, g.b1);
    Mat<T> d_ln1_out(n, d);
    kernels::matmul_bt(d_ff_pre, l.w1, d_ln1_out);
    kernels::add_scaled(d_ln1_out, d_resid2, T{1});  // residual branch

    // ln1
    Mat<T> d_resid1(n, d);
    kernels::layer_norm_backward(d_ln1_out, c.resid1, l.ln1_g, c.ln1_mean, c.ln1_rstd,
                                 d_resid1, g.ln1_g, g.ln1_b);

    // attention branch
    Mat<T> d_attn_proj = d_resid1;
    if (acts.training) {
      detail::apply_dropout(d_attn_proj, cfg.dropout_rate,
                            detail::dropout_site_seed(acts.dropout_seed, li, 1));
    }
    kernels::matmul_at(c.ctx, d_attn_proj, g.wo, /*accumulate=*/true);
    kernels::col_sums(d_attn_proj, g.bo);
    Mat<T> d_ctx(n, d);
    kernels::matmul_bt(d_attn_proj, l.wo, d_ctx);

    Mat<T> dq(n, d), dk(n, d), dv(n, d);
    kernels::parallel_for(b_count * heads, [&](int bh) {
      const int b = bh / heads;
      const int h = bh % heads;
      const int off = h * hd;
      std::vector<T> dp(seq), dscore(seq);
      for (int i = 0; i < seq; ++i) {
        const int qi = b * seq + i;
        if (!batch.attention_mask[qi]) continue;
        const T* prow = c.probs.data() + ((static_cast<size_t>(bh) * seq) + i) * seq;
        const T* dctx_row = d_ctx.row(qi) + off;
        T dot_pd{0};
        for (int j = 0; j < seq; ++j) {
          const int kj = b * seq + j;
          if (!batch.attention_mask[kj]) continue;
          const T* vrow = c.v.row(kj) + off;
          T acc{0};
          for (int e = 0; e < hd; ++e) acc += dctx_row[e] * vrow[e];
          dp[j] = acc;
          dot_pd += prow[j] * acc;
          T* dvrow = dv.row(kj) + off;
          for (int e = 0; e < hd; ++e) dvrow[e] += prow[j] * dctx_row[e];
        }
        const T* qrow = c.q.row(qi) + off;
        T* dqrow = dq.row(qi) + off;
        for (int j = 0; j < seq; ++j) {
          const int kj = b * seq + j;
          if (!batch.attention_mask[kj]) continue;
          const T ds = prow[j] * (dp[j] - dot_pd) * scale;
          dscore[j] = ds;
          const T* krow = c.k.row(kj) + off;
          for (int e = 0; e < hd; ++e) dqrow[e] += ds * krow[e];
          T* dkrow = dk.row(kj) + off;
          for (int e = 0; e < hd; ++e) dkrow[e] += ds * qrow[e];
        }
      }
    });

    kernels::matmul_at(c.x_in, dq, g.wq, /*accumulate=*/true);
    kernels::col_sums(dq, g.bq);
    kernels::matmul_at(c.x_in, dk, g.wk, /*accumulate=*/true);
    kernels::col_sums(dk, g.bk);
    kernels::matmul_at(c.x_in, dv, g.wv, /*accumulate=*/true);
    kernels::col_sums(dv, g.bv);

    Mat<T> d_x_in(n, d);
    kernels::matmul_bt(dq, l.wq, d_x_in);
    kernels::matmul_bt(dk, l.wk, d_x_in, /*accumulate=*/true);
    kernels::matmul_bt(dv, l.wv, d_x_in, /*accumulate=*/true);
    kernels::add_scaled(d_x_in, d_resid1, T{1});  // residual branch
    dx = std::move(d_x_in);
  }

  if (acts.training) {
    detail::apply_dropout(dx, cfg.dropout_rate,
                          detail::dropout_site_seed(acts.dropout_seed, -1, 0));
  }
  for (int i = 0; i < n; ++i) {
    const T* row = dx.row(i);
    T* tok = grads.token_embedding.row(batch.input_ids[i]);
    T* pos = grads.position_embedding.row(batch.position_ids[i]);
    for (int j = 0; j < d; ++j) {
      tok[j] += row[j];
      pos[j] += row[j];
    }
    if (cfg.use_slot_embedding) {
      T* slot = grads.slot_embedding.row(batch.segment_ids[i]);
      for (int j = 0; j < d; ++j) slot[j] += row[j];
    }
  }

  grads.for_each_tensor([](const std::string& name, T* ptr, size_t count, int) {
    for (size_t i = 0; i < count; ++i) {
      if (!std::isfinite(static_cast<double>(ptr[i]))) {
        throw std::runtime_error("non-finite gradient in tensor " + name);
      }
    }
  });
  return stats;
}

// Argmax accuracy over supervised positions, token head and op head.
template <typename T>
std::pair<double, double> head_accuracy(const ForwardResult<T>& fwd, const Batch& batch) {
  int supervised = 0, token_hits = 0, op_hits = 0;
  for (int i = 0; i < batch.flat_size(); ++i) {
    if (!batch.loss_mask[i]) continue;
    ++supervised;
    const T* trow = fwd.token_logits.row(i);
    int best = 0;
    for (int j = 1; j < fwd.token_logits.cols; ++j) {
      if (trow[j] > trow[best]) best = j;
    }
    if (best == batch.target_ids[i]) ++token_hits;
    const T* orow = fwd.op_logits.row(i);
    best = 0;
    for (int j = 1; j < fwd.op_logits.cols; ++j) {
      if (orow[j] > orow[best]) best = j;
    }
    if (best == batch.target_ops[i]) ++op_hits;
  }
  if (supervised == 0) return {0.0, 0.0};
  return {static_cast<double>(token_hits) / supervised,
          static_cast<double>(op_hits) / supervised};
}

}  // namespace wlmsc
