#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wlmsc {

// Dense row-major matrix.
template <typename T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, T{0}) {}

  T* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const T* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
  T& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  T at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  size_t size() const { return data.size(); }
  void zero() { std::fill(data.begin(), data.end(), T{0}); }
};

namespace kernels {

// Global switch between the OpenMP path and serial execution of the same
// code. Work is partitioned over independent output rows with a fixed
// per-element accumulation order, so results are bit-identical either way.
bool parallel_enabled();
void set_parallel(bool enabled);

template <typename F>
inline void parallel_for(int n, F&& body) {
#ifdef _OPENMP
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < n; ++i) body(i);
#else
  for (int i = 0; i < n; ++i) body(i);
#endif
}

// C = A * B, or C += A * B when accumulate is set.
template <typename T>
void matmul(const Mat<T>& a, const Mat<T>& b, Mat<T>& c, bool accumulate = false) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols) {
    throw std::invalid_argument("matmul shape mismatch");
  }
  parallel_for(a.rows, [&](int i) {
    T* crow = c.row(i);
    if (!accumulate) {
      for (int j = 0; j < c.cols; ++j) crow[j] = T{0};
    }
    const T* arow = a.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const T aik = arow[k];
      const T* brow = b.row(k);
      for (int j = 0; j < c.cols; ++j) crow[j] += aik * brow[j];
    }
  });
}

// C = A^T * B (A is [n x m], B is [n x k], C is [m x k]).
template <typename T>
void matmul_at(const Mat<T>& a, const Mat<T>& b, Mat<T>& c, bool accumulate = false) {
  if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols) {
    throw std::invalid_argument("matmul_at shape mismatch");
  }
  parallel_for(a.cols, [&](int r) {
    T* crow = c.row(r);
    if (!accumulate) {
      for (int j = 0; j < c.cols; ++j) crow[j] = T{0};
    }
    for (int n = 0; n < a.rows; ++n) {
      const T anr = a.at(n, r);
      const T* brow = b.row(n);
      for (int j = 0; j < c.cols; ++j) crow[j] += anr * brow[j];
    }
  });
}

// C = A * B^T (A is [m x k], B is [n x k], C is [m x n]).
template <typename T>
void matmul_bt(const Mat<T>& a, const Mat<T>& b, Mat<T>& c, bool accumulate = false) {
  if (a.cols != b.cols || c.rows != a.rows || c.cols != b.rows) {
    throw std::invalid_argument("matmul_bt shape mismatch");
  }
  parallel_for(a.rows, [&](int i) {
    T* crow = c.row(i);
    const T* arow = a.row(i);
    for (int j = 0; j < c.cols; ++j) {
      T acc{0};
      const T* brow = b.row(j);
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  });
}

template <typename T>
void add_bias(Mat<T>& m, const std::vector<T>& bias) {
  if (static_cast<int>(bias.size()) != m.cols) {
    throw std::invalid_argument("add_bias shape mismatch");
  }
  parallel_for(m.rows, [&](int i) {
    T* row = m.row(i);
    for (int j = 0; j < m.cols; ++j) row[j] += bias[j];
  });
}

// out[j] += sum over rows of m[i][j]; fixed row order per column.
template <typename T>
void col_sums(const Mat<T>& m, std::vector<T>& out) {
  if (static_cast<int>(out.size()) != m.cols) {
    throw std::invalid_argument("col_sums shape mismatch");
  }
  parallel_for(m.cols, [&](int j) {
    T acc{0};
    for (int i = 0; i < m.rows; ++i) acc += m.at(i, j);
    out[j] += acc;
  });
}

template <typename T>
void add_scaled(Mat<T>& dst, const Mat<T>& src, T scale) {
  if (dst.rows != src.rows || dst.cols != src.cols) {
    throw std::invalid_argument("add_scaled shape mismatch");
  }
  parallel_for(dst.rows, [&](int i) {
    T* d = dst.row(i);
    const T* s = src.row(i);
    for (int j = 0; j < dst.cols; ++j) d[j] += scale * s[j];
  });
}

template <typename T>
void layer_norm_forward(const Mat<T>& x, const std::vector<T>& gain,
                        const std::vector<T>& bias, Mat<T>& y,
                        std::vector<T>& mean, std::vector<T>& rstd, T eps) {
  const int d = x.cols;
  parallel_for(x.rows, [&](int i) {
    const T* xr = x.row(i);
    T m{0};
    for (int j = 0; j < d; ++j) m += xr[j];
    m /= static_cast<T>(d);
    T var{0};
    for (int j = 0; j < d; ++j) var += (xr[j] - m) * (xr[j] - m);
    var /= static_cast<T>(d);
    const T r = T{1} / std::sqrt(var + eps);
    mean[i] = m;
    rstd[i] = r;
    T* yr = y.row(i);
    for (int j = 0; j < d; ++j) yr[j] = (xr[j] - m) * r * gain[j] + bias[j];
  });
}

// dgain/dbias are accumulated; dx is overwritten.
template <typename T>
void layer_norm_backward(const Mat<T>& dy, const Mat<T>& x, const std::vector<T>& gain,
                         const std::vector<T>& mean, const std::vector<T>& rstd,
                         Mat<T>& dx, std::vector<T>& dgain, std::vector<T>& dbias) {
  const int d = x.cols;
  parallel_for(x.rows, [&](int i) {
    const T* dyr = dy.row(i);
    const T* xr = x.row(i);
    const T m = mean[i];
    const T r = rstd[i];
    // dnorm = dy * gain; dx follows the standard layer-norm backward.
    T sum_dnorm{0};
    T sum_dnorm_xhat{0};
    for (int j = 0; j < d; ++j) {
      const T xhat = (xr[j] - m) * r;
      const T dnorm = dyr[j] * gain[j];
      sum_dnorm += dnorm;
      sum_dnorm_xhat += dnorm * xhat;
    }
    T* dxr = dx.row(i);
    const T inv_d = T{1} / static_cast<T>(d);
    for (int j = 0; j < d; ++j) {
      const T xhat = (xr[j] - m) * r;
      const T dnorm = dyr[j] * gain[j];
      dxr[j] = r * (dnorm - inv_d * sum_dnorm - xhat * inv_d * sum_dnorm_xhat);
    }
  });
  parallel_for(d, [&](int j) {
    T dg{0}, db{0};
    for (int i = 0; i < x.rows; ++i) {
      const T xhat = (x.at(i, j) - mean[i]) * rstd[i];
      dg += dy.at(i, j) * xhat;
      db += dy.at(i, j);
    }
    dgain[j] += dg;
    dbias[j] += db;
  });
}

// tanh-approximation GELU.
template <typename T>
inline T gelu_scalar(T x) {
  const T c = T{0.7978845608028653559};  // sqrt(2/pi)
  const T u = c * (x + T{0.044715} * x * x * x);
  return T{0.5} * x * (T{1} + std::tanh(u));
}

template <typename T>
inline T gelu_grad_scalar(T x) {
  const T c = T{0.7978845608028653559};
  const T x3 = x * x * x;
  const T u = c * (x + T{0.044715} * x3);
  const T th = std::tanh(u);
  const T sech2 = T{1} - th * th;
  const T du = c * (T{1} + T{3} * T{0.044715} * x * x);
  return T{0.5} * (T{1} + th) + T{0.5} * x * sech2 * du;
}

template <typename T>
void gelu_forward(const Mat<T>& x, Mat<T>& y) {
  parallel_for(x.rows, [&](int i) {
    const T* xr = x.row(i);
    T* yr = y.row(i);
    for (int j = 0; j < x.cols; ++j) yr[j] = gelu_scalar(xr[j]);
  });
}

template <typename T>
void gelu_backward(const Mat<T>& dy, const Mat<T>& x_pre, Mat<T>& dx) {
  parallel_for(x_pre.rows, [&](int i) {
    const T* dyr = dy.row(i);
    const T* xr = x_pre.row(i);
    T* dxr = dx.row(i);
    for (int j = 0; j < x_pre.cols; ++j) dxr[j] = dyr[j] * gelu_grad_scalar(xr[j]);
  });
}

// Naive textbook implementations kept as the reference the tuned kernels are
// tested against. Loop order differs, so agreement is to tolerance, not bits.
namespace ref {

template <typename T>
void matmul(const Mat<T>& a, const Mat<T>& b, Mat<T>& c) {
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < b.cols; ++j) {
      T acc{0};
      for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(k, j);
      c.at(i, j) = acc;
    }
  }
}

template <typename T>
void matmul_at(const Mat<T>& a, const Mat<T>& b, Mat<T>& c) {
  for (int r = 0; r < a.cols; ++r) {
    for (int j = 0; j < b.cols; ++j) {
      T acc{0};
      for (int n = 0; n < a.rows; ++n) acc += a.at(n, r) * b.at(n, j);
      c.at(r, j) = acc;
    }
  }
}

template <typename T>
void matmul_bt(const Mat<T>& a, const Mat<T>& b, Mat<T>& c) {
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < b.rows; ++j) {
      T acc{0};
      for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(j, k);
      c.at(i, j) = acc;
    }
  }
}

template <typename T>
void layer_norm_forward(const Mat<T>& x, const std::vector<T>& gain,
                        const std::vector<T>& bias, Mat<T>& y, T eps) {
  for (int i = 0; i < x.rows; ++i) {
    T m{0};
    for (int j = 0; j < x.cols; ++j) m += x.at(i, j);
    m /= static_cast<T>(x.cols);
    T var{0};
    for (int j = 0; j < x.cols; ++j) var += (x.at(i, j) - m) * (x.at(i, j) - m);
    var /= static_cast<T>(x.cols);
    for (int j = 0; j < x.cols; ++j) {
      y.at(i, j) = (x.at(i, j) - m) / std::sqrt(var + eps) * gain[j] + bias[j];
    }
  }
}

}  // namespace ref
}  // namespace kernels
}  // namespace wlmsc
