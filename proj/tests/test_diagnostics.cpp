#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "acdc/diagnostics.hpp"

using namespace acdc;

namespace {

Mask mask_of(std::initializer_list<int> bits) {
  Mask m(bits.size());
  std::size_t i = 0;
  for (int b : bits) m.set(i++, b != 0);
  return m;
}

Dataset tiny_dataset(std::size_t n, std::size_t feats, std::size_t classes,
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

TEST_CASE("mask_change hand values") {
  // prev {0,1}, next {1,2}: one new index out of two
  CHECK(mask_change(mask_of({1, 1, 0}), mask_of({0, 1, 1})) == 0.5);
  CHECK(mask_change(mask_of({1, 1}), mask_of({1, 1})) == 0.0);
  CHECK(mask_change(mask_of({1, 0}), mask_of({0, 1})) == 1.0);
  // empty next support: denominator floored at 1
  CHECK(mask_change(mask_of({1, 0}), mask_of({0, 0})) == 0.0);
  CHECK_THROWS_AS(mask_change(Mask(2), Mask(3)), std::invalid_argument);

  CHECK(mask_change_symmetric(mask_of({1, 1, 0}), mask_of({0, 1, 1})) == 0.5);
  CHECK(mask_change_symmetric(mask_of({1, 0}), mask_of({1, 0})) == 0.0);
}

TEST_CASE("dead_weights counts only prunable coordinates") {
  ParamSet p;
  p.segments.push_back({"w", {4}, {0.0, 1.0, 0.0, 2.0}, true});
  p.segments.push_back({"b", {2}, {0.0, 0.0}, false});
  CHECK(dead_weights(p) == 0.5);
}

TEST_CASE("agreement of a model with itself is perfect") {
  SeededRng rng(3);
  auto data = std::make_shared<Dataset>(tiny_dataset(30, 4, 3, rng));
  Mlp model({4, 6, 3}, data);
  ParamSet p = model.init_params(rng);
  AgreementReport r = agreement(model, p, p, *data);
  CHECK(r.top1_agreement == 1.0);
  // CE(p || p) = entropy of p: strictly positive for soft predictions
  CHECK(r.mean_cross_entropy > 0.0);
}

TEST_CASE("agreement detects a broken model") {
  SeededRng rng(5);
  auto data = std::make_shared<Dataset>(tiny_dataset(40, 4, 2, rng));
  Mlp model({4, 5, 2}, data);
  ParamSet a = model.init_params(rng);
  ParamSet b = model.init_params(rng);  // independent init
  AgreementReport r = agreement(model, a, b, *data);
  CHECK(r.top1_agreement <= 1.0);
  CHECK(r.mean_cross_entropy >= 0.0);

  // CE ordering: a vs itself is the entropy lower bound for a vs anything
  AgreementReport self = agreement(model, a, a, *data);
  CHECK(self.mean_cross_entropy <= r.mean_cross_entropy + 1e-12);
}

TEST_CASE("corrupt_labels replaces exactly count labels with different ones") {
  SeededRng rng(7);
  Dataset d = tiny_dataset(50, 3, 4, rng);
  auto [corrupted, record] = corrupt_labels(d, 10, 4, rng);
  CHECK(record.indices.size() == 10);
  CHECK(record.original_labels.size() == 10);
  CHECK(record.replacement_labels.size() == 10);

  // indices unique, labels actually changed, everything else untouched
  std::vector<bool> seen(50, false);
  for (std::size_t j = 0; j < 10; ++j) {
    std::size_t i = record.indices[j];
    CHECK(!seen[i]);
    seen[i] = true;
    CHECK(record.original_labels[j] == d.y[i]);
    CHECK(record.replacement_labels[j] != record.original_labels[j]);
    CHECK(corrupted.y[i] == record.replacement_labels[j]);
  }
  for (std::size_t i = 0; i < 50; ++i)
    if (!seen[i]) CHECK(corrupted.y[i] == d.y[i]);
  CHECK(corrupted.X.values == d.X.values);

  CHECK_THROWS_AS(corrupt_labels(d, 51, 4, rng), std::invalid_argument);
}

TEST_CASE("memorization_track computes per-epoch accuracies") {
  SeededRng rng(11);
  Dataset d = tiny_dataset(20, 3, 2, rng);
  auto [corrupted, record] = corrupt_labels(d, 5, 2, rng);
  auto shared = std::make_shared<Dataset>(corrupted);
  Mlp model({3, 4, 2}, shared);
  std::vector<ParamSet> snaps{model.init_params(rng), model.init_params(rng)};
  MemorizationReport rep = memorization_track(model, snaps, corrupted, record);
  REQUIRE(rep.per_epoch.size() == 2);
  for (const auto& e : rep.per_epoch) {
    CHECK(e.acc_corrupted >= 0.0);
    CHECK(e.acc_corrupted <= 1.0);
    CHECK(e.acc_true >= 0.0);
    CHECK(e.acc_true <= 1.0);
    // with 2 classes the two accuracies are complementary on this subset
    CHECK(e.acc_corrupted + e.acc_true == doctest::Approx(1.0));
  }
}
