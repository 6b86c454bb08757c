#include "acdc/core.hpp"

#include <cmath>
#include <set>

#include "acdc/kernels.hpp"

namespace acdc {

void ParamSet::validate() const {
  std::set<std::string> names;
  for (const auto& s : segments) {
    if (!names.insert(s.name).second)
      throw std::invalid_argument("duplicate segment name: " + s.name);
    std::size_t prod = 1;
    for (auto d : s.shape) prod *= d;
    if (prod != s.values.size())
      throw std::invalid_argument("segment " + s.name +
                                  ": shape does not match value count");
  }
}

std::size_t ParamSet::total_size() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.size();
  return n;
}

std::size_t ParamSet::prunable_size() const {
  std::size_t n = 0;
  for (const auto& s : segments)
    if (s.prunable) n += s.size();
  return n;
}

const Segment& ParamSet::find(const std::string& name) const {
  for (const auto& s : segments)
    if (s.name == name) return s;
  throw std::invalid_argument("no segment named " + name);
}

Vec flatten_prunable(const ParamSet& p) {
  Vec flat;
  flat.reserve(p.prunable_size());
  for (const auto& s : p.segments)
    if (s.prunable) flat.insert(flat.end(), s.values.begin(), s.values.end());
  return flat;
}

FlatIndexMap prunable_index_map(const ParamSet& p) {
  FlatIndexMap map;
  map.entries.reserve(p.prunable_size());
  for (std::size_t si = 0; si < p.segments.size(); ++si) {
    if (!p.segments[si].prunable) continue;
    for (std::size_t off = 0; off < p.segments[si].size(); ++off)
      map.entries.emplace_back(si, off);
  }
  return map;
}

void scatter_prunable(ParamSet& p, const Vec& flat) {
  if (flat.size() != p.prunable_size())
    throw std::invalid_argument("scatter_prunable: length mismatch");
  std::size_t pos = 0;
  for (auto& s : p.segments) {
    if (!s.prunable) continue;
    std::copy(flat.begin() + pos, flat.begin() + pos + s.size(),
              s.values.begin());
    pos += s.size();
  }
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale,
                       SeededRng& rng) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("gaussian_matrix: zero dimension");
  if (!(scale > 0.0))
    throw std::invalid_argument("gaussian_matrix: scale must be positive");
  Matrix m(rows, cols);
  for (auto& v : m.values) v = scale * rng.next_normal();
  check_finite(m.values, "gaussian_matrix");
  return m;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return kernels::dot(a.data(), b.data(), a.size());
}

double norm2(const Vec& a) {
  return std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
}

double norm_inf(const Vec& a) { return kernels::max_abs(a.data(), a.size()); }

std::size_t nnz(const Vec& a) {
  std::size_t n = 0;
  for (double v : a)
    if (v != 0.0) ++n;
  return n;
}

void check_finite(const Vec& a, const char* what) {
  for (double v : a)
    if (!std::isfinite(v))
      throw std::runtime_error(std::string(what) + ": non-finite value");
}

Vec matvec(const Matrix& a, const Vec& x) {
  if (x.size() != a.cols) throw std::invalid_argument("matvec: length mismatch");
  Vec y(a.rows);
  kernels::matvec(a.values.data(), a.rows, a.cols, x.data(), y.data());
  return y;
}

Vec matvec_t(const Matrix& a, const Vec& x) {
  if (x.size() != a.rows)
    throw std::invalid_argument("matvec_t: length mismatch");
  Vec y(a.cols);
  kernels::matvec_t(a.values.data(), a.rows, a.cols, x.data(), y.data());
  return y;
}

}  // namespace acdc
