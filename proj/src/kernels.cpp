#include "chartkit/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#define CHARTKIT_X86 1
#include <immintrin.h>
#else
#define CHARTKIT_X86 0
#endif

#if defined(__aarch64__)
#define CHARTKIT_NEON 1
#include <arm_neon.h>
#else
#define CHARTKIT_NEON 0
#endif

namespace chartkit::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

namespace detail {

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void momentum_step_scalar(std::span<double> w, std::span<double> v,
                          std::span<const double> g, double mu, double lr) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = mu * v[i] - lr * g[i];
    w[i] += v[i];
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// AVX2 + FMA kernels
// ---------------------------------------------------------------------------

#if CHARTKIT_X86

__attribute__((target("avx2,fma"))) static void axpy_avx2(
    double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y.data() + i);
    __m256d y1 = _mm256_loadu_pd(y.data() + i + 4);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), y0);
    y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i + 4), y1);
    _mm256_storeu_pd(y.data() + i, y0);
    _mm256_storeu_pd(y.data() + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d y0 = _mm256_loadu_pd(y.data() + i);
    y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), y0);
    _mm256_storeu_pd(y.data() + i, y0);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) static double dot_avx2(
    std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                           _mm256_loadu_pd(b.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4),
                           _mm256_loadu_pd(b.data() + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                           _mm256_loadu_pd(b.data() + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_hadd_pd(lo, lo));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

__attribute__((target("avx2,fma"))) static void momentum_step_avx2(
    std::span<double> w, std::span<double> v, std::span<const double> g,
    double mu, double lr) {
  const std::size_t n = w.size();
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vneg_lr = _mm256_set1_pd(-lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d step = _mm256_mul_pd(vneg_lr, _mm256_loadu_pd(g.data() + i));
    __m256d vel = _mm256_fmadd_pd(vmu, _mm256_loadu_pd(v.data() + i), step);
    _mm256_storeu_pd(v.data() + i, vel);
    __m256d wt = _mm256_add_pd(_mm256_loadu_pd(w.data() + i), vel);
    _mm256_storeu_pd(w.data() + i, wt);
  }
  for (; i < n; ++i) {
    v[i] = mu * v[i] - lr * g[i];
    w[i] += v[i];
  }
}

#endif  // CHARTKIT_X86

// ---------------------------------------------------------------------------
// NEON kernels (aarch64; 2-lane doubles)
// ---------------------------------------------------------------------------

#if CHARTKIT_NEON

static void axpy_neon(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t y0 = vld1q_f64(y.data() + i);
    float64x2_t y1 = vld1q_f64(y.data() + i + 2);
    y0 = vfmaq_f64(y0, va, vld1q_f64(x.data() + i));
    y1 = vfmaq_f64(y1, va, vld1q_f64(x.data() + i + 2));
    vst1q_f64(y.data() + i, y0);
    vst1q_f64(y.data() + i + 2, y1);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

static double dot_neon(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a.data() + i + 2), vld1q_f64(b.data() + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

static void momentum_step_neon(std::span<double> w, std::span<double> v,
                               std::span<const double> g, double mu, double lr) {
  const std::size_t n = w.size();
  const float64x2_t vmu = vdupq_n_f64(mu);
  const float64x2_t vneg_lr = vdupq_n_f64(-lr);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t step = vmulq_f64(vneg_lr, vld1q_f64(g.data() + i));
    float64x2_t vel = vfmaq_f64(step, vmu, vld1q_f64(v.data() + i));
    vst1q_f64(v.data() + i, vel);
    vst1q_f64(w.data() + i, vaddq_f64(vld1q_f64(w.data() + i), vel));
  }
  for (; i < n; ++i) {
    v[i] = mu * v[i] - lr * g[i];
    w[i] += v[i];
  }
}

#endif  // CHARTKIT_NEON

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

struct Dispatch {
  void (*axpy)(double, std::span<const double>, std::span<double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*momentum)(std::span<double>, std::span<double>, std::span<const double>,
                   double, double);
  std::string_view isa;
};

Dispatch detect_best() {
#if CHARTKIT_X86
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return {axpy_avx2, dot_avx2, momentum_step_avx2, "avx2"};
#endif
#if CHARTKIT_NEON
  return {axpy_neon, dot_neon, momentum_step_neon, "neon"};
#endif
  return {detail::axpy_scalar, detail::dot_scalar, detail::momentum_step_scalar,
          "scalar"};
}

Dispatch g_dispatch = detect_best();

}  // namespace

void force_scalar(bool on) {
  g_dispatch = on ? Dispatch{detail::axpy_scalar, detail::dot_scalar,
                             detail::momentum_step_scalar, "scalar"}
                  : detect_best();
}

std::string_view active_isa() { return g_dispatch.isa; }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  g_dispatch.axpy(a, x, y);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return g_dispatch.dot(a, b);
}

void affine(std::span<const double> w, std::span<const double> bias,
            std::span<const double> x, std::span<double> y, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    y[r] = bias[r] + g_dispatch.dot(w.subspan(r * cols, cols), x);
}

void matvec_t(std::span<const double> w, std::span<const double> d,
              std::span<double> y, std::size_t rows, std::size_t cols) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    g_dispatch.axpy(d[r], w.subspan(r * cols, cols), y);
}

void rank1_update(std::span<double> w, std::span<const double> d,
                  std::span<const double> x, double scale, std::size_t rows,
                  std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    g_dispatch.axpy(scale * d[r], x, w.subspan(r * cols, cols));
}

void momentum_step(std::span<double> w, std::span<double> v,
                   std::span<const double> g, double mu, double lr) {
  g_dispatch.momentum(w, v, g, mu, lr);
}

void softmax_inplace(std::span<double> x) {
  if (x.empty()) return;
  double mx = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double& v : x) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : x) v /= sum;
}

}  // namespace chartkit::kernels
