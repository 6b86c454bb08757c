#include "acdc/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acdc/kernels.hpp"

namespace acdc {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Mask over prunable coordinates applied to the ParamSet's prunable view.
void mask_params(ParamSet& params, const Mask& m) {
  Vec flat = flatten_prunable(params);
  apply_mask_inplace(flat, m);
  scatter_prunable(params, flat);
}

void mask_gradient(ParamSet& grad, const Mask& m) { mask_params(grad, m); }

std::uint64_t mask_hash(const Mask& m) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < m.size(); ++i) {
    h ^= m[i] ? (i * 0x9E3779B97F4A7C15ULL + 1) & 0xFF : 0;
    h *= 1099511628211ULL;
  }
  return h;
}

double prunable_zero_fraction(const ParamSet& params) {
  Vec flat = flatten_prunable(params);
  if (flat.empty()) return 0.0;
  return 1.0 -
         static_cast<double>(nnz(flat)) / static_cast<double>(flat.size());
}

}  // namespace

double lr_at(const LrSchedule& s, double epoch, std::size_t total_epochs) {
  switch (s.kind) {
    case LrKind::Constant:
      return s.base_lr;
    case LrKind::CosineAfterLinearWarmup: {
      if (s.warmup_epochs > 0 && epoch < static_cast<double>(s.warmup_epochs))
        return s.base_lr * epoch / static_cast<double>(s.warmup_epochs);
      double span = static_cast<double>(total_epochs - s.warmup_epochs);
      double t = (epoch - static_cast<double>(s.warmup_epochs)) / span;
      return 0.5 * s.base_lr * (1.0 + std::cos(kPi * std::min(t, 1.0)));
    }
    case LrKind::StepDecay: {
      std::size_t drops = static_cast<std::size_t>(epoch) / s.step_every;
      return s.base_lr * std::pow(s.step_gamma, static_cast<double>(drops));
    }
  }
  return s.base_lr;
}

void OptimizerState::init_buffer(const ParamSet& params) {
  buffer = params;
  reset_momentum();
}

void OptimizerState::reset_momentum() {
  for (auto& s : buffer.segments)
    std::fill(s.values.begin(), s.values.end(), 0.0);
}

double OptimizerState::buffer_inf_norm() const {
  double m = 0.0;
  for (const auto& s : buffer.segments)
    m = std::max(m, kernels::max_abs(s.values.data(), s.values.size()));
  return m;
}

void sgd_momentum_step(ParamSet& params, const ParamSet& grad,
                       OptimizerState& state, double lr) {
  for (std::size_t i = 0; i < params.segments.size(); ++i) {
    auto& p = params.segments[i].values;
    const auto& g = grad.segments[i].values;
    auto& v = state.buffer.segments[i].values;
    kernels::sgd_momentum(lr, state.momentum, state.weight_decay, g.data(),
                          v.data(), p.data(), p.size());
  }
}

void sgd_momentum_step(Vec& theta, const Vec& grad, Vec& velocity, double lr,
                       double momentum, double weight_decay) {
  if (theta.size() != grad.size() || theta.size() != velocity.size())
    throw std::invalid_argument("sgd_momentum_step: shape mismatch");
  kernels::sgd_momentum(lr, momentum, weight_decay, grad.data(),
                        velocity.data(), theta.data(), theta.size());
}

TrainResult acdc_train(const Mlp& model, const Dataset& train,
                       const Dataset* eval, const PhaseSchedule& schedule,
                       const OptimizerState& opt_in,
                       const SparsityPattern& pattern, SeededRng& rng,
                       const TrainOptions& options) {
  if (options.track_best_dense && eval == nullptr)
    throw std::invalid_argument(
        "acdc_train: best-dense selection requires an evaluation split");

  TrainResult result;
  ParamSet params = model.init_params(rng);
  OptimizerState opt = opt_in;
  opt.init_buffer(params);

  const std::size_t expected_card = pattern_cardinality(params, pattern);
  const std::size_t prunable = params.prunable_size();
  Mask mask = Mask::all_ones(prunable);
  bool compressed = false;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> batch;

  for (std::size_t epoch = 0; epoch < schedule.total_epochs; ++epoch) {
    EpochMetrics em;
    em.epoch = epoch;
    em.phase = schedule.kind_at(epoch);

    if (schedule.is_phase_entry(epoch)) {
      em.momentum_inf_at_entry = opt.buffer_inf_norm();
      if (em.phase == PhaseKind::Compressed) {
        mask = apply_pattern(params, pattern);  // recomputed every entry
        mask_params(params, mask);
        compressed = true;
        result.mask_history.emplace_back(epoch, mask);
        if (options.reset_momentum_on_compression) opt.reset_momentum();
        em.momentum_inf_at_entry = opt.buffer_inf_norm();
      } else {
        mask = Mask::all_ones(prunable);
        compressed = false;
        opt.reset_momentum();
        em.momentum_inf_at_entry = opt.buffer_inf_norm();
      }
    }

    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size();
         start += options.batch_size) {
      std::size_t end = std::min(order.size(), start + options.batch_size);
      batch.assign(order.begin() + start, order.begin() + end);
      double frac_epoch = static_cast<double>(epoch) +
                          static_cast<double>(start) /
                              static_cast<double>(order.size());
      auto [loss, grad] = model.value_grad(params, train, batch);
      loss_sum += loss;
      ++steps;
      if (compressed) mask_gradient(grad, mask);
      sgd_momentum_step(params, grad, opt,
                        lr_at(opt.lr, frac_epoch, schedule.total_epochs));
      if (compressed) {
        mask_params(params, mask);
        // Sparsity conservation: zeros cannot revive inside a phase.
        Vec flat = flatten_prunable(params);
        if (nnz(flat) > expected_card)
          throw std::runtime_error("acdc_train: sparsity invariant violated");
      }
    }

    em.train_loss = loss_sum / static_cast<double>(std::max<std::size_t>(1, steps));
    em.sparsity = prunable_zero_fraction(params);
    em.mask_hash = mask_hash(mask);
    em.lr = lr_at(opt.lr, static_cast<double>(epoch), schedule.total_epochs);
    if (eval != nullptr) em.eval_accuracy = model.accuracy(params, *eval);
    result.metrics.push_back(em);

    // Best dense checkpoint: end-of-decompressed-phase snapshot with the
    // highest eval accuracy.
    bool phase_end = (epoch + 1 == schedule.total_epochs) ||
                     schedule.is_phase_entry(epoch + 1);
    if (options.track_best_dense && phase_end &&
        em.phase == PhaseKind::Decompressed) {
      if (!result.best_dense.has_value() ||
          em.eval_accuracy > result.best_dense->eval_accuracy)
        result.best_dense = DenseCheckpoint{params, epoch, em.eval_accuracy};
    }

    if (options.epoch_hook) options.epoch_hook(epoch, params);
  }

  result.sparse_params = std::move(params);
  result.sparse_mask = mask;
  return result;
}

ParamSet dense_finetune(const TrainResult& result, const Mlp& model,
                        const Dataset& train, const Dataset* eval,
                        std::size_t epochs, const OptimizerState& opt_in,
                        SeededRng& rng, std::size_t batch_size) {
  if (!result.best_dense.has_value())
    throw std::invalid_argument("dense_finetune: no best dense checkpoint");
  (void)eval;
  ParamSet params = result.best_dense->params;
  if (epochs == 0) return params;

  OptimizerState opt = opt_in;
  opt.init_buffer(params);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> batch;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::size_t end = std::min(order.size(), start + batch_size);
      batch.assign(order.begin() + start, order.begin() + end);
      double frac_epoch = static_cast<double>(epoch) +
                          static_cast<double>(start) /
                              static_cast<double>(order.size());
      auto [loss, grad] = model.value_grad(params, train, batch);
      (void)loss;
      sgd_momentum_step(params, grad, opt, lr_at(opt.lr, frac_epoch, epochs));
    }
  }
  return params;
}

}  // namespace acdc
