#pragma once

#include <functional>
#include <optional>

#include "acdc/objectives.hpp"
#include "acdc/schedule.hpp"

namespace acdc {

enum class LrKind { Constant, CosineAfterLinearWarmup, StepDecay };

struct LrSchedule {
  LrKind kind = LrKind::Constant;
  double base_lr = 0.1;
  std::size_t warmup_epochs = 0;  // linear ramp for the cosine schedule
  double step_gamma = 0.1;
  std::size_t step_every = 30;
};

// One global curve over total_epochs; phase boundaries do not restart it.
double lr_at(const LrSchedule& s, double epoch, std::size_t total_epochs);

struct OptimizerState {
  LrSchedule lr;
  double momentum = 0.9;
  double weight_decay = 0.0;
  ParamSet buffer;  // momentum buffer, ParamSet-shaped

  void init_buffer(const ParamSet& params);
  void reset_momentum();
  double buffer_inf_norm() const;
};

// v = mu*v + g + wd*theta; theta -= lr*v, per segment.
void sgd_momentum_step(ParamSet& params, const ParamSet& grad,
                       OptimizerState& state, double lr);
void sgd_momentum_step(Vec& theta, const Vec& grad, Vec& velocity, double lr,
                       double momentum, double weight_decay);

struct EpochMetrics {
  std::size_t epoch = 0;
  PhaseKind phase = PhaseKind::Decompressed;
  double train_loss = 0.0;
  double eval_accuracy = 0.0;
  double sparsity = 0.0;  // zero fraction over prunable coordinates
  std::uint64_t mask_hash = 0;
  double momentum_inf_at_entry = 0.0;  // recorded on phase-entry epochs
  double lr = 0.0;
};

struct DenseCheckpoint {
  ParamSet params;
  std::size_t epoch = 0;
  double eval_accuracy = 0.0;
};

struct TrainResult {
  ParamSet sparse_params;
  Mask sparse_mask;
  std::optional<DenseCheckpoint> best_dense;
  std::vector<EpochMetrics> metrics;
  std::vector<std::pair<std::size_t, Mask>> mask_history;  // compressed entries
};

struct TrainOptions {
  std::size_t batch_size = 32;
  bool reset_momentum_on_compression = false;  // dense-entry reset is always on
  bool track_best_dense = true;
  // Called after every epoch with the current parameters (e.g. for the
  // memorization harness).
  std::function<void(std::size_t epoch, const ParamSet&)> epoch_hook;
};

// Algorithm: on compression entry recompute the mask from current weights
// and freeze it; inside compressed phases gradients and weights are zeroed
// under the mask every step, so pruned weights stay exactly 0. On
// decompression entry the mask resets to all-ones and momentum resets to 0.
TrainResult acdc_train(const Mlp& model, const Dataset& train,
                       const Dataset* eval, const PhaseSchedule& schedule,
                       const OptimizerState& opt, const SparsityPattern& pattern,
                       SeededRng& rng, const TrainOptions& options = {});

// Continue dense training from the best dense checkpoint for extra epochs.
ParamSet dense_finetune(const TrainResult& result, const Mlp& model,
                        const Dataset& train, const Dataset* eval,
                        std::size_t epochs, const OptimizerState& opt,
                        SeededRng& rng, std::size_t batch_size = 32);

}  // namespace acdc
