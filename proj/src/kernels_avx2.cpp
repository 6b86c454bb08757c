#include "acdc/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace acdc::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double max_abs_avx2(const double* a, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(signmask, _mm256_loadu_pd(a + i)));
  double m[4];
  _mm256_storeu_pd(m, acc);
  double r = std::max(std::max(m[0], m[1]), std::max(m[2], m[3]));
  for (; i < n; ++i) r = std::max(r, std::fabs(a[i]));
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void hadamard_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void matvec_avx2(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

void matvec_t_avx2(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(x[r], a + r * cols, y, cols);
}

void sgd_momentum_avx2(double lr, double mu, double wd, const double* g,
                       double* v, double* theta, std::size_t n) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vwd = _mm256_set1_pd(wd);
  const __m256d vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d th = _mm256_loadu_pd(theta + i);
    __m256d vv = _mm256_fmadd_pd(vmu, _mm256_loadu_pd(v + i),
                                 _mm256_fmadd_pd(vwd, th, _mm256_loadu_pd(g + i)));
    _mm256_storeu_pd(v + i, vv);
    _mm256_storeu_pd(theta + i, _mm256_fnmadd_pd(vlr, vv, th));
  }
  for (; i < n; ++i) {
    v[i] = mu * v[i] + g[i] + wd * theta[i];
    theta[i] -= lr * v[i];
  }
}

}  // namespace

const Ops avx2_ops = {
    dot_avx2,    sum_avx2,      max_abs_avx2, axpy_avx2,   scale_avx2,
    hadamard_avx2, matvec_avx2, matvec_t_avx2, sgd_momentum_avx2,
};

}  // namespace acdc::kernels
