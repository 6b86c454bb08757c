#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acdc/kernels.hpp"
#include "acdc/rng.hpp"

using namespace acdc;

namespace {

using Vec = std::vector<double>;

Vec random_vec(std::size_t n, SeededRng& rng) {
  Vec v(n);
  for (auto& x : v) x = rng.next_normal();
  return v;
}

void check_close(double a, double b, double tol = 1e-12) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  CHECK(std::fabs(a - b) <= tol * scale);
}

}  // namespace

// Scalar and AVX2 paths must agree on every operation; FMA reordering is
// allowed 1e-12 relative slack.
TEST_CASE("scalar/avx2 equivalence") {
  SeededRng rng(42);
  const auto& s = kernels::scalar_ops;
  const auto& v = kernels::avx2_ops;
  for (std::size_t n : {1, 3, 4, 7, 64, 257, 1000}) {
    Vec a = random_vec(n, rng), b = random_vec(n, rng);

    check_close(s.dot(a.data(), b.data(), n), v.dot(a.data(), b.data(), n));
    check_close(s.sum(a.data(), n), v.sum(a.data(), n));
    CHECK(s.max_abs(a.data(), n) == v.max_abs(a.data(), n));

    Vec y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i]);

    Vec h1(n), h2(n);
    s.hadamard(a.data(), b.data(), h1.data(), n);
    v.hadamard(a.data(), b.data(), h2.data(), n);
    CHECK(h1 == h2);

    Vec g = random_vec(n, rng);
    Vec v1 = a, v2 = a, t1 = b, t2 = b;
    s.sgd_momentum(0.1, 0.9, 0.01, g.data(), v1.data(), t1.data(), n);
    v.sgd_momentum(0.1, 0.9, 0.01, g.data(), v2.data(), t2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      check_close(v1[i], v2[i]);
      check_close(t1[i], t2[i]);
    }
  }
}

TEST_CASE("scalar/avx2 matvec equivalence") {
  SeededRng rng(7);
  const auto& s = kernels::scalar_ops;
  const auto& v = kernels::avx2_ops;
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1},
                            {3, 5},
                            {17, 33},
                            {64, 128}}) {
    Vec a = random_vec(rows * cols, rng);
    Vec x = random_vec(cols, rng), xr = random_vec(rows, rng);
    Vec y1(rows), y2(rows), z1(cols), z2(cols);
    s.matvec(a.data(), rows, cols, x.data(), y1.data());
    v.matvec(a.data(), rows, cols, x.data(), y2.data());
    for (std::size_t i = 0; i < rows; ++i) check_close(y1[i], y2[i]);
    s.matvec_t(a.data(), rows, cols, xr.data(), z1.data());
    v.matvec_t(a.data(), rows, cols, xr.data(), z2.data());
    for (std::size_t i = 0; i < cols; ++i) check_close(z1[i], z2[i]);
  }
}

TEST_CASE("known values") {
  Vec a{1, 2, 3}, b{4, 5, 6};
  CHECK(kernels::dot(a.data(), b.data(), 3) == 32.0);
  CHECK(kernels::sum(a.data(), 3) == 6.0);
  Vec c{-7, 2, 3};
  CHECK(kernels::max_abs(c.data(), 3) == 7.0);
}

TEST_CASE("dispatch is resolved") {
  auto name = kernels::active_name();
  CHECK((name == "scalar" || name == "avx2"));
}
