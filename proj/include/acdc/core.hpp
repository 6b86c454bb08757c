#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "acdc/rng.hpp"

namespace acdc {

// All numerics are 64-bit reals, dense, row-major.
using Vec = std::vector<double>;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec values;  // row-major, rows*cols

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * cols; }
};

struct Segment {
  std::string name;
  std::vector<std::size_t> shape;
  Vec values;
  bool prunable = true;

  std::size_t size() const { return values.size(); }
};

// Named, shaped parameter segments. The flat prunable view concatenates
// prunable segments in declaration order; biases are conventionally
// non-prunable.
struct ParamSet {
  std::vector<Segment> segments;

  void validate() const;
  std::size_t total_size() const;
  std::size_t prunable_size() const;
  const Segment& find(const std::string& name) const;
};

// (segment index, offset within segment) for each flat prunable coordinate.
struct FlatIndexMap {
  std::vector<std::pair<std::size_t, std::size_t>> entries;
};

Vec flatten_prunable(const ParamSet& p);
FlatIndexMap prunable_index_map(const ParamSet& p);
// Writes a flat prunable vector back into the ParamSet.
void scatter_prunable(ParamSet& p, const Vec& flat);

// i.i.d. N(0, scale^2) entries, deterministic under the given rng state.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale,
                       SeededRng& rng);

// Basic vector helpers (kernel-backed).
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
std::size_t nnz(const Vec& a);
void check_finite(const Vec& a, const char* what);

// y = A x and y = A^T x
Vec matvec(const Matrix& a, const Vec& x);
Vec matvec_t(const Matrix& a, const Vec& x);

}  // namespace acdc
