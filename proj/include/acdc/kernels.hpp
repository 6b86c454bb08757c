#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by every module. Each operation has a
// scalar reference implementation and an AVX2 variant; the active set is
// chosen once at startup from CPUID (override with ACDC_SIMD=scalar|avx2).
namespace acdc::kernels {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  // y += alpha * x
  void (*axpy)(double alpha, const double*, double*, std::size_t);
  void (*scale)(double alpha, double*, std::size_t);
  // out[i] = a[i] * b[i]
  void (*hadamard)(const double*, const double*, double*, std::size_t);
  // y = A x, row-major (rows x cols)
  void (*matvec)(const double*, std::size_t rows, std::size_t cols,
                 const double*, double*);
  // y = A^T x
  void (*matvec_t)(const double*, std::size_t rows, std::size_t cols,
                   const double*, double*);
  // momentum SGD: v = mu*v + g + wd*theta; theta -= lr*v
  void (*sgd_momentum)(double lr, double mu, double wd, const double* g,
                       double* v, double* theta, std::size_t);
};

extern const Ops scalar_ops;
extern const Ops avx2_ops;

// Active implementation (resolved once, thread-safe).
const Ops& active();
std::string_view active_name();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline double max_abs(const double* a, std::size_t n) { return active().max_abs(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scale(double alpha, double* x, std::size_t n) { active().scale(alpha, x, n); }
inline void hadamard(const double* a, const double* b, double* out, std::size_t n) { active().hadamard(a, b, out, n); }
inline void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) { active().matvec(a, rows, cols, x, y); }
inline void matvec_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) { active().matvec_t(a, rows, cols, x, y); }
inline void sgd_momentum(double lr, double mu, double wd, const double* g, double* v, double* theta, std::size_t n) { active().sgd_momentum(lr, mu, wd, g, v, theta, n); }

}  // namespace acdc::kernels
