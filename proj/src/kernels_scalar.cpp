#include "acdc/kernels.hpp"

#include <cmath>

namespace acdc::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void matvec_scalar(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void matvec_t_scalar(const double* a, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(x[r], a + r * cols, y, cols);
}

void sgd_momentum_scalar(double lr, double mu, double wd, const double* g,
                         double* v, double* theta, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = mu * v[i] + g[i] + wd * theta[i];
    theta[i] -= lr * v[i];
  }
}

}  // namespace

const Ops scalar_ops = {
    dot_scalar,    sum_scalar,      max_abs_scalar, axpy_scalar,
    scale_scalar,  hadamard_scalar, matvec_scalar,  matvec_t_scalar,
    sgd_momentum_scalar,
};

}  // namespace acdc::kernels
