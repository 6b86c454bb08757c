#pragma once

#include <string>
#include <vector>

#include "acdc/schedule.hpp"

namespace acdc {

struct Conv2dLayer {
  std::size_t kernel_h = 0, kernel_w = 0;
  std::size_t in_channels = 0, out_channels = 0;
  std::size_t out_h = 0, out_w = 0;
  std::size_t groups = 1;
};

struct LinearLayer {
  std::size_t in = 0, out = 0;
};

struct ManifestLayer {
  std::string name;
  enum class Kind { Conv2d, Linear } kind = Kind::Linear;
  Conv2dLayer conv;
  LinearLayer linear;
  bool prunable = true;

  // Multiply-accumulates per sample at full density.
  double macs() const;
};

struct LayerManifest {
  std::string name;
  std::vector<ManifestLayer> layers;

  void validate() const;
};

// Per-epoch, per-layer nonzero weight fraction.
struct DensityTrajectory {
  std::vector<std::vector<double>> per_epoch;  // [epoch][layer] in [0,1]
};

struct FlopReport {
  double forward = 0.0;   // FLOPs per sample
  double backward = 0.0;  // 2x forward
  double compressed_total = 0.0;
  double decompressed_total = 0.0;
  double training_total = 0.0;
};

// 2 FLOPs per MAC; each layer scaled by its weight density. Layers other
// than conv/linear never enter the manifest (BN, pooling and activations
// are excluded by convention).
double forward_flops(const LayerManifest& m, const std::vector<double>& densities);
double forward_flops_dense(const LayerManifest& m);

// Per-sample training cost: 3*F_C in compressed epochs, 2*F_D + F in
// decompressed ones; densities sampled once per epoch.
FlopReport train_flops(const LayerManifest& m, const PhaseSchedule& schedule,
                       const DensityTrajectory& traj,
                       std::size_t samples_per_epoch);

}  // namespace acdc
