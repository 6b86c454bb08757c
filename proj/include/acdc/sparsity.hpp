#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "acdc/core.hpp"

namespace acdc {

// One bit per prunable coordinate.
struct Mask {
  std::vector<std::uint8_t> bits;

  Mask() = default;
  explicit Mask(std::size_t n, bool set = false) : bits(n, set ? 1 : 0) {}

  std::size_t size() const { return bits.size(); }
  std::size_t popcount() const;
  bool operator[](std::size_t i) const { return bits[i] != 0; }
  void set(std::size_t i, bool v) { bits[i] = v ? 1 : 0; }
  bool operator==(const Mask&) const = default;

  static Mask all_ones(std::size_t n) { return Mask(n, true); }
};

struct GlobalTopK {
  // Either an absolute kept count or a kept fraction in (0,1].
  std::optional<std::size_t> k;
  std::optional<double> fraction;

  std::size_t resolve(std::size_t prunable_count) const;
};

struct UniformPerLayer {
  double fraction = 1.0;  // kept fraction per non-exempt prunable segment
  std::vector<std::string> exempt;  // segments kept fully dense
};

struct SemiStructuredNM {
  std::size_t n = 2;  // kept per block
  std::size_t m = 4;  // block size
};

using SparsityPattern = std::variant<GlobalTopK, UniformPerLayer, SemiStructuredNM>;

// Largest-|v| selection, ties broken by lowest index. popcount == k.
Mask top_k_global(const Vec& v, std::size_t k);

// Pattern applied over the prunable view of p.
Mask apply_pattern(const ParamSet& p, const SparsityPattern& pattern);
// Pattern applied to a flat vector (treated as one prunable segment).
Mask apply_pattern_flat(const Vec& v, const SparsityPattern& pattern);

// Elementwise v .* m
Vec apply_mask(const Vec& v, const Mask& m);
void apply_mask_inplace(Vec& v, const Mask& m);

// h(k) = ||T_k(x) - x||^2 / (n - k) with n = nnz(x); requires k < n.
double projection_gap(const Vec& x, std::size_t k);

// Pattern cardinality over a prunable view of the given layout.
std::size_t pattern_cardinality(const ParamSet& p, const SparsityPattern& pattern);

}  // namespace acdc
