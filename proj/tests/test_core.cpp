#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acdc/core.hpp"

using namespace acdc;

namespace {

ParamSet random_paramset(SeededRng& rng) {
  ParamSet p;
  std::size_t nsegs = 1 + rng.next_below(4);
  for (std::size_t s = 0; s < nsegs; ++s) {
    Segment seg;
    seg.name = "seg" + std::to_string(s);
    std::size_t rank = 1 + rng.next_below(2);
    std::size_t total = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      std::size_t dim = 1 + rng.next_below(5);
      seg.shape.push_back(dim);
      total *= dim;
    }
    seg.values.resize(total);
    for (auto& v : seg.values) v = rng.next_normal();
    seg.prunable = rng.next_u64() & 1;
    p.segments.push_back(std::move(seg));
  }
  return p;
}

}  // namespace

TEST_CASE("flatten_prunable picks prunable segments in order") {
  ParamSet p;
  p.segments.push_back({"w", {3}, {1, 2, 3}, true});
  p.segments.push_back({"b", {1}, {9}, false});
  CHECK(flatten_prunable(p) == Vec{1, 2, 3});

  ParamSet none;
  none.segments.push_back({"b", {1}, {9}, false});
  CHECK(flatten_prunable(none).empty());
}

TEST_CASE("scatter round-trips flatten for random ParamSets") {
  SeededRng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    ParamSet p = random_paramset(rng);
    p.validate();
    ParamSet q = p;
    for (auto& s : q.segments)
      if (s.prunable)
        for (auto& v : s.values) v = 0.0;
    scatter_prunable(q, flatten_prunable(p));
    for (std::size_t s = 0; s < p.segments.size(); ++s)
      CHECK(q.segments[s].values == p.segments[s].values);

    auto map = prunable_index_map(p);
    Vec flat = flatten_prunable(p);
    REQUIRE(map.entries.size() == flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
      auto [si, off] = map.entries[i];
      CHECK(p.segments[si].values[off] == flat[i]);
    }
  }
}

TEST_CASE("paramset validation") {
  ParamSet dup;
  dup.segments.push_back({"a", {1}, {0}, true});
  dup.segments.push_back({"a", {1}, {0}, true});
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

  ParamSet bad;
  bad.segments.push_back({"a", {2, 2}, {0, 0, 0}, true});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gaussian_matrix determinism") {
  SeededRng r1(99), r2(99);
  Matrix a = gaussian_matrix(10, 20, 0.5, r1);
  Matrix b = gaussian_matrix(10, 20, 0.5, r2);
  CHECK(a.values == b.values);
}

TEST_CASE("gaussian_matrix column norms near 1 at scale 1/sqrt(rows)") {
  SeededRng rng(7);
  const std::size_t rows = 400, cols = 50;
  Matrix a = gaussian_matrix(rows, cols, 1.0 / std::sqrt(double(rows)), rng);
  double mean_norm = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += a.at(r, c) * a.at(r, c);
    mean_norm += std::sqrt(s);
  }
  mean_norm /= cols;
  CHECK(mean_norm > 0.9);
  CHECK(mean_norm < 1.1);
}

TEST_CASE("gaussian_matrix rejects invalid input") {
  SeededRng rng(1);
  CHECK_THROWS_AS(gaussian_matrix(0, 1, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_matrix(1, 1, 0.0, rng), std::invalid_argument);
}

TEST_CASE("rng replay and normal moments") {
  SeededRng a(2024), b(2024);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  SeededRng rng(5);
  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::fabs(sum / n) < 0.03);
  CHECK(std::fabs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("matvec against hand computation") {
  Matrix a(2, 3);
  a.values = {1, 2, 3, 4, 5, 6};
  CHECK(matvec(a, {1, 1, 1}) == Vec{6, 15});
  CHECK(matvec_t(a, {1, 1}) == Vec{5, 7, 9});
  CHECK_THROWS_AS(matvec(a, {1, 1}), std::invalid_argument);
}
