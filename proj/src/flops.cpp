#include "acdc/flops.hpp"

#include <stdexcept>

namespace acdc {

double ManifestLayer::macs() const {
  if (kind == Kind::Conv2d) {
    const auto& c = conv;
    return static_cast<double>(c.kernel_h) * c.kernel_w *
           (static_cast<double>(c.in_channels) / c.groups) * c.out_channels *
           c.out_h * c.out_w;
  }
  return static_cast<double>(linear.in) * linear.out;
}

void LayerManifest::validate() const {
  for (const auto& l : layers) {
    if (l.kind == ManifestLayer::Kind::Conv2d) {
      const auto& c = l.conv;
      if (c.kernel_h == 0 || c.kernel_w == 0 || c.in_channels == 0 ||
          c.out_channels == 0 || c.out_h == 0 || c.out_w == 0 || c.groups == 0)
        throw std::invalid_argument("manifest layer " + l.name +
                                    ": zero dimension");
      if (c.in_channels % c.groups != 0 || c.out_channels % c.groups != 0)
        throw std::invalid_argument("manifest layer " + l.name +
                                    ": groups must divide channel counts");
    } else if (l.linear.in == 0 || l.linear.out == 0) {
      throw std::invalid_argument("manifest layer " + l.name +
                                  ": zero dimension");
    }
  }
}

double forward_flops(const LayerManifest& m,
                     const std::vector<double>& densities) {
  if (densities.size() != m.layers.size())
    throw std::invalid_argument("forward_flops: one density per layer required");
  double total = 0.0;
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    double d = densities[i];
    if (d < 0.0 || d > 1.0)
      throw std::invalid_argument("forward_flops: density out of [0,1]");
    total += 2.0 * m.layers[i].macs() * d;
  }
  return total;
}

double forward_flops_dense(const LayerManifest& m) {
  return forward_flops(m, std::vector<double>(m.layers.size(), 1.0));
}

FlopReport train_flops(const LayerManifest& m, const PhaseSchedule& schedule,
                       const DensityTrajectory& traj,
                       std::size_t samples_per_epoch) {
  if (traj.per_epoch.size() != schedule.total_epochs)
    throw std::invalid_argument(
        "train_flops: trajectory must cover every epoch");
  FlopReport r;
  r.forward = forward_flops_dense(m);
  r.backward = 2.0 * r.forward;
  const double f_dense = r.forward;
  for (std::size_t e = 0; e < schedule.total_epochs; ++e) {
    double f_epoch = forward_flops(m, traj.per_epoch[e]);
    double per_sample;
    if (schedule.kind_at(e) == PhaseKind::Compressed) {
      per_sample = 3.0 * f_epoch;
      r.compressed_total += per_sample * static_cast<double>(samples_per_epoch);
    } else {
      per_sample = 2.0 * f_epoch + f_dense;
      r.decompressed_total += per_sample * static_cast<double>(samples_per_epoch);
    }
    r.training_total += per_sample * static_cast<double>(samples_per_epoch);
  }
  return r;
}

}  // namespace acdc
