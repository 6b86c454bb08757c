#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "acdc/iht.hpp"
#include "acdc/objectives.hpp"

using namespace acdc;

namespace {

// Central finite differences; the oracle every analytic gradient must match.
Vec fd_gradient(const Objective& obj, const Vec& theta, double h = 1e-6) {
  Vec g(theta.size());
  Vec t = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double save = t[i];
    t[i] = save + h;
    double fp = obj.value(t);
    t[i] = save - h;
    double fm = obj.value(t);
    t[i] = save;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

void check_grad(const Objective& obj, const Vec& theta, double tol = 1e-5) {
  Vec g = obj.gradient(theta);
  Vec fd = fd_gradient(obj, theta);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double scale = std::max({1.0, std::fabs(g[i]), std::fabs(fd[i])});
    CHECK(std::fabs(g[i] - fd[i]) <= tol * scale);
  }
}

Dataset toy_dataset(std::size_t n, std::size_t feats, std::size_t classes,
                    SeededRng& rng) {
  Dataset d;
  d.X = Matrix(n, feats);
  for (auto& x : d.X.values) x = rng.next_normal();
  d.y.resize(n);
  for (auto& y : d.y) y = rng.next_below(classes);
  d.classes = classes;
  return d;
}

}  // namespace

TEST_CASE("least squares matches finite differences") {
  SeededRng rng(3);
  Matrix a = gaussian_matrix(8, 5, 0.5, rng);
  Vec b(8);
  for (auto& x : b) x = rng.next_normal();
  LeastSquares ls(a, b);
  Vec theta(5);
  for (auto& x : theta) x = rng.next_normal();
  check_grad(ls, theta);
}

TEST_CASE("logistic matches finite differences") {
  SeededRng rng(5);
  LogisticMulti lm(toy_dataset(12, 4, 3, rng), 0.05);
  Vec theta(12);
  for (auto& x : theta) x = 0.3 * rng.next_normal();
  check_grad(lm, theta);
}

TEST_CASE("mlp matches finite differences") {
  SeededRng rng(7);
  auto data = std::make_shared<Dataset>(toy_dataset(10, 4, 3, rng));
  Mlp mlp({4, 6, 3}, data);
  Vec theta = mlp.flatten_all(mlp.init_params(rng));
  check_grad(mlp, theta, 2e-5);
}

// Mean of per-sample gradients over a full disjoint partition must equal the
// full gradient exactly (modulo float summation order).
TEST_CASE("partition-average identity") {
  SeededRng rng(9);
  Matrix a = gaussian_matrix(12, 6, 0.5, rng);
  Vec b(12);
  for (auto& x : b) x = rng.next_normal();
  LeastSquares ls(a, b);
  Vec theta(6);
  for (auto& x : theta) x = rng.next_normal();

  Vec full = ls.gradient(theta);
  Vec acc(6, 0.0);
  std::vector<std::size_t> ids(12);
  std::iota(ids.begin(), ids.end(), 0);
  rng.shuffle(ids);
  for (std::size_t start = 0; start < 12; start += 4) {
    Vec g = stochastic_gradient(
        ls, theta, std::span<const std::size_t>(ids.data() + start, 4));
    for (std::size_t i = 0; i < 6; ++i) acc[i] += g[i] / 3.0;
  }
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(std::fabs(acc[i] - full[i]) <=
          1e-12 * std::max(1.0, std::fabs(full[i])));
}

TEST_CASE("restricted gradient zero off support") {
  SeededRng rng(11);
  Matrix a = gaussian_matrix(6, 5, 0.5, rng);
  Vec b(6, 1.0);
  LeastSquares ls(a, b);
  Vec theta(5, 0.2);
  Mask m(5);
  m.set(1, true);
  m.set(3, true);
  std::vector<std::size_t> batch{0, 2, 4};
  Vec g = restricted_gradient(ls, theta, m, batch);
  CHECK(g[0] == 0.0);
  CHECK(g[2] == 0.0);
  CHECK(g[4] == 0.0);
  Vec dense = stochastic_gradient(ls, theta, batch);
  CHECK(g[1] == dense[1]);
  CHECK(g[3] == dense[3]);
}

// For f(x) = ||x||^2, grad = 2x, f* = 0: with r = dim the certified alpha is
// 2*||2x||^2 / ||x||^2 = 8 everywhere.
TEST_CASE("cpl on isotropic quadratic certifies alpha = 8") {
  Matrix a(3, 3);
  a.values = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  LeastSquares ls(a, Vec(3, 0.0));
  SeededRng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Vec theta(3);
    for (auto& x : theta) x = rng.next_normal();
    double alpha = cpl_estimate(ls, theta, 3, 0.0);
    CHECK(alpha == doctest::Approx(8.0).epsilon(1e-9));
    // unsquared variant: ||2x|| / ||x|| * 2 / ... reduces to 4/||x||
    double un = cpl_estimate(ls, theta, 3, 0.0, false);
    double n2 = std::sqrt(dot(theta, theta));
    CHECK(un == doctest::Approx(4.0 / n2).epsilon(1e-9));
  }
}

// f(x) = ||x||^2 has Hessian 2I, so every restricted smoothness probe
// measures exactly 2.
TEST_CASE("smoothness estimate on identity design") {
  Matrix a(4, 4);
  a.values = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  LeastSquares ls(a, Vec(4, 0.0));
  SeededRng rng(17);
  Vec theta{0.5, -1.0, 2.0, 0.1};
  double beta = smoothness_estimate(ls, theta, 2, 50, rng);
  CHECK(beta == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("lipschitz estimate includes the center point") {
  // f(x) = (1 - x)^2 in 1-d: grad at center 1 is 0, nearby points nonzero.
  Matrix a(1, 1);
  a.values = {1};
  LeastSquares ls(a, Vec{1.0});
  SeededRng rng(19);
  double at_center = lipschitz_estimate(ls, Vec{1.0}, 0.0, 1, rng);
  CHECK(at_center == 0.0);
  double nearby = lipschitz_estimate(ls, Vec{1.0}, 0.5, 100, rng);
  CHECK(nearby > 0.0);
  CHECK(nearby <= 2.0 * 0.5 + 1e-12);  // |grad| = 2|1-x| <= 2*radius
}

TEST_CASE("gradient variance zero for identical samples") {
  Matrix a(3, 2);
  a.values = {1, 2, 1, 2, 1, 2};
  LeastSquares ls(a, Vec{5, 5, 5});
  CHECK(gradient_variance(ls, Vec{0.1, 0.2}) == doctest::Approx(0.0));
}

TEST_CASE("mlp all-zero weights give loss ln(classes)") {
  SeededRng rng(23);
  auto data = std::make_shared<Dataset>(toy_dataset(20, 5, 4, rng));
  Mlp mlp({5, 8, 4}, data);
  ParamSet p = mlp.init_params(rng);
  for (auto& s : p.segments)
    for (auto& v : s.values) v = 0.0;
  CHECK(mlp.mean_loss(p, *data) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

// A single linear layer with zero bias and softmax CE is exactly multinomial
// logistic regression with no regularizer.
TEST_CASE("mlp linear layer equals logistic regression") {
  SeededRng rng(29);
  Dataset d = toy_dataset(15, 4, 3, rng);
  auto shared = std::make_shared<Dataset>(d);
  Mlp mlp({4, 3}, shared);
  LogisticMulti lm(d, 0.0);

  ParamSet p = mlp.init_params(rng);
  // weight segment is [out, in] row-major: same layout as LogisticMulti theta
  Vec theta = p.segments[0].values;
  for (auto& v : p.segments[1].values) v = 0.0;

  CHECK(mlp.mean_loss(p, d) == doctest::Approx(lm.value(theta)).epsilon(1e-12));

  auto [loss, grad] = mlp.value_grad(p, [&] {
    std::vector<std::size_t> ids(d.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
  }());
  Vec lg = lm.gradient(theta);
  REQUIRE(grad.segments[0].values.size() == lg.size());
  for (std::size_t i = 0; i < lg.size(); ++i)
    CHECK(grad.segments[0].values[i] == doctest::Approx(lg[i]).epsilon(1e-10));
}

TEST_CASE("mlp unflatten/flatten round-trip and accuracy bounds") {
  SeededRng rng(31);
  auto data = std::make_shared<Dataset>(toy_dataset(25, 3, 2, rng));
  Mlp mlp({3, 5, 2}, data);
  ParamSet p = mlp.init_params(rng);
  Vec flat = mlp.flatten_all(p);
  ParamSet q = mlp.unflatten(flat);
  for (std::size_t s = 0; s < p.segments.size(); ++s)
    CHECK(q.segments[s].values == p.segments[s].values);

  double acc = mlp.accuracy(p, *data);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
}
