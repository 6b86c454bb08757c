#include "acdc/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acdc {
namespace {

// Indices of the k largest |v| entries, ties to the lowest index.
std::vector<std::size_t> top_k_indices(const double* v, std::size_t n,
                                       std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto cmp = [v](std::size_t a, std::size_t b) {
    double fa = std::fabs(v[a]), fb = std::fabs(v[b]);
    if (fa != fb) return fa > fb;
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), cmp);
  idx.resize(k);
  return idx;
}

void mark_top_k(const double* v, std::size_t n, std::size_t k, Mask& m,
                std::size_t base) {
  for (std::size_t i : top_k_indices(v, n, k)) m.set(base + i, true);
}

void mark_nm_segment(const double* v, std::size_t n, const SemiStructuredNM& nm,
                     Mask& m, std::size_t base) {
  for (std::size_t b = 0; b < n; b += nm.m) {
    std::size_t block = std::min(nm.m, n - b);
    mark_top_k(v + b, block, std::min(nm.n, block), m, base + b);
  }
}

}  // namespace

std::size_t Mask::popcount() const {
  std::size_t c = 0;
  for (auto b : bits) c += b;
  return c;
}

std::size_t GlobalTopK::resolve(std::size_t prunable_count) const {
  if (k.has_value()) {
    if (*k > prunable_count)
      throw std::invalid_argument("GlobalTopK: k exceeds coordinate count");
    return *k;
  }
  if (!fraction.has_value() || !(*fraction > 0.0) || *fraction > 1.0)
    throw std::invalid_argument("GlobalTopK: fraction must be in (0,1]");
  return static_cast<std::size_t>(
      std::llround(*fraction * static_cast<double>(prunable_count)));
}

Mask top_k_global(const Vec& v, std::size_t k) {
  if (k > v.size()) throw std::invalid_argument("top_k_global: k > len(v)");
  Mask m(v.size());
  mark_top_k(v.data(), v.size(), k, m, 0);
  return m;
}

Mask apply_pattern(const ParamSet& p, const SparsityPattern& pattern) {
  const std::size_t total = p.prunable_size();
  if (const auto* g = std::get_if<GlobalTopK>(&pattern)) {
    return top_k_global(flatten_prunable(p), g->resolve(total));
  }
  if (const auto* u = std::get_if<UniformPerLayer>(&pattern)) {
    if (!(u->fraction > 0.0) || u->fraction > 1.0)
      throw std::invalid_argument("UniformPerLayer: fraction must be in (0,1]");
    for (const auto& name : u->exempt) p.find(name);  // must exist
    Mask m(total);
    std::size_t base = 0;
    for (const auto& s : p.segments) {
      if (!s.prunable) continue;
      bool exempt = std::find(u->exempt.begin(), u->exempt.end(), s.name) !=
                    u->exempt.end();
      std::size_t keep =
          exempt ? s.size()
                 : static_cast<std::size_t>(std::floor(
                       u->fraction * static_cast<double>(s.size())));
      mark_top_k(s.values.data(), s.size(), keep, m, base);
      base += s.size();
    }
    return m;
  }
  const auto& nm = std::get<SemiStructuredNM>(pattern);
  if (nm.n < 1 || nm.n > nm.m)
    throw std::invalid_argument("SemiStructuredNM: need 1 <= n <= m");
  Mask m(total);
  std::size_t base = 0;
  for (const auto& s : p.segments) {
    if (!s.prunable) continue;
    mark_nm_segment(s.values.data(), s.size(), nm, m, base);
    base += s.size();
  }
  return m;
}

Mask apply_pattern_flat(const Vec& v, const SparsityPattern& pattern) {
  if (const auto* g = std::get_if<GlobalTopK>(&pattern))
    return top_k_global(v, g->resolve(v.size()));
  if (const auto* u = std::get_if<UniformPerLayer>(&pattern)) {
    if (!(u->fraction > 0.0) || u->fraction > 1.0)
      throw std::invalid_argument("UniformPerLayer: fraction must be in (0,1]");
    std::size_t keep = static_cast<std::size_t>(
        std::floor(u->fraction * static_cast<double>(v.size())));
    return top_k_global(v, keep);
  }
  const auto& nm = std::get<SemiStructuredNM>(pattern);
  if (nm.n < 1 || nm.n > nm.m)
    throw std::invalid_argument("SemiStructuredNM: need 1 <= n <= m");
  Mask m(v.size());
  mark_nm_segment(v.data(), v.size(), nm, m, 0);
  return m;
}

Vec apply_mask(const Vec& v, const Mask& m) {
  if (v.size() != m.size())
    throw std::invalid_argument("apply_mask: length mismatch");
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = m[i] ? v[i] : 0.0;
  return out;
}

void apply_mask_inplace(Vec& v, const Mask& m) {
  if (v.size() != m.size())
    throw std::invalid_argument("apply_mask: length mismatch");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!m[i]) v[i] = 0.0;
}

double projection_gap(const Vec& x, std::size_t k) {
  const std::size_t n = nnz(x);
  if (k >= n)
    throw std::invalid_argument("projection_gap: requires k < nnz(x)");
  Vec trunc = apply_mask(x, top_k_global(x, k));
  double gap = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = trunc[i] - x[i];
    gap += d * d;
  }
  return gap / static_cast<double>(n - k);
}

std::size_t pattern_cardinality(const ParamSet& p,
                                const SparsityPattern& pattern) {
  const std::size_t total = p.prunable_size();
  if (const auto* g = std::get_if<GlobalTopK>(&pattern)) return g->resolve(total);
  if (const auto* u = std::get_if<UniformPerLayer>(&pattern)) {
    std::size_t c = 0;
    for (const auto& s : p.segments) {
      if (!s.prunable) continue;
      bool exempt = std::find(u->exempt.begin(), u->exempt.end(), s.name) !=
                    u->exempt.end();
      c += exempt ? s.size()
                  : static_cast<std::size_t>(std::floor(
                        u->fraction * static_cast<double>(s.size())));
    }
    return c;
  }
  const auto& nm = std::get<SemiStructuredNM>(pattern);
  std::size_t c = 0;
  for (const auto& s : p.segments) {
    if (!s.prunable) continue;
    for (std::size_t b = 0; b < s.size(); b += nm.m)
      c += std::min(nm.n, std::min(nm.m, s.size() - b));
  }
  return c;
}

}  // namespace acdc
