#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "acdc/flops.hpp"
#include "acdc/io.hpp"

using namespace acdc;

namespace {

LayerManifest two_layer() {
  LayerManifest m;
  m.name = "toy";
  ManifestLayer conv;
  conv.name = "conv1";
  conv.kind = ManifestLayer::Kind::Conv2d;
  conv.conv = {3, 3, 16, 32, 28, 28, 1};
  m.layers.push_back(conv);
  ManifestLayer fc;
  fc.name = "fc";
  fc.kind = ManifestLayer::Kind::Linear;
  fc.linear = {100, 50};
  m.layers.push_back(fc);
  return m;
}

}  // namespace

TEST_CASE("macs hand values") {
  // 3*3*16*32*28*28 = 3,612,672 MACs
  LayerManifest m = two_layer();
  CHECK(m.layers[0].macs() == 3612672.0);
  CHECK(m.layers[1].macs() == 5000.0);

  // grouped conv divides input channels: depthwise 3x3 over 16 channels
  ManifestLayer dw;
  dw.kind = ManifestLayer::Kind::Conv2d;
  dw.conv = {3, 3, 16, 16, 10, 10, 16};
  CHECK(dw.macs() == 3.0 * 3 * 1 * 16 * 10 * 10);
}

TEST_CASE("forward flops dense and with densities") {
  LayerManifest m = two_layer();
  CHECK(forward_flops_dense(m) == 2.0 * (3612672.0 + 5000.0));
  CHECK(forward_flops(m, {0.5, 1.0}) == 2.0 * (0.5 * 3612672.0 + 5000.0));
  CHECK(forward_flops(m, {0.0, 0.0}) == 0.0);

  CHECK_THROWS_AS(forward_flops(m, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(forward_flops(m, {0.5, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(forward_flops(m, {-0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("forward flops monotone in density and additive over layers") {
  LayerManifest m = two_layer();
  CHECK(forward_flops(m, {0.3, 0.3}) < forward_flops(m, {0.6, 0.6}));

  LayerManifest first, second;
  first.layers = {m.layers[0]};
  second.layers = {m.layers[1]};
  CHECK(forward_flops_dense(m) ==
        forward_flops_dense(first) + forward_flops_dense(second));
}

TEST_CASE("manifest validation") {
  LayerManifest m = two_layer();
  m.validate();
  m.layers[0].conv.groups = 3;  // does not divide 16
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.layers[0].conv.groups = 1;
  m.layers[1].linear.out = 0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("train flops hand computation") {
  LayerManifest m;
  ManifestLayer fc;
  fc.kind = ManifestLayer::Kind::Linear;
  fc.linear = {10, 10};  // F = 200 FLOPs dense
  m.layers.push_back(fc);

  // degenerate layout: warmup=1, finetune=3 -> D[0,1), C[1,4)
  PhaseSchedule s = build_schedule(4, 1, 3, 0, 0, 3);
  DensityTrajectory traj;
  traj.per_epoch = {{1.0}, {0.25}, {0.25}, {0.25}};
  FlopReport r = train_flops(m, s, traj, 100);

  CHECK(r.forward == 200.0);
  CHECK(r.backward == 400.0);
  // dense epoch: (2*200 + 200) * 100 = 60,000
  CHECK(r.decompressed_total == 60000.0);
  // compressed epochs: F_C = 200*0.25 = 50, per-sample 3*F_C = 150, x3 epochs
  CHECK(r.compressed_total == 3 * 150.0 * 100.0);
  CHECK(r.training_total == r.compressed_total + r.decompressed_total);

  DensityTrajectory bad;
  bad.per_epoch = {{1.0}};
  CHECK_THROWS_AS(train_flops(m, s, bad, 100), std::invalid_argument);
}

TEST_CASE("manifest json round-trip") {
  LayerManifest m = two_layer();
  LayerManifest back = io::manifest_from_json(io::manifest_to_json(m));
  CHECK(back.name == m.name);
  REQUIRE(back.layers.size() == m.layers.size());
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    CHECK(back.layers[i].name == m.layers[i].name);
    CHECK(back.layers[i].kind == m.layers[i].kind);
    CHECK(back.layers[i].macs() == m.layers[i].macs());
  }
}
