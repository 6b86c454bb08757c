#pragma once

#include "acdc/objectives.hpp"

namespace acdc {

struct AgreementReport {
  double top1_agreement = 0.0;
  double mean_cross_entropy = 0.0;  // CE(p_reference || p_other), floored
};

struct CorruptionRecord {
  std::vector<std::size_t> indices;
  std::vector<std::size_t> original_labels;
  std::vector<std::size_t> replacement_labels;
  std::uint64_t seed = 0;
};

struct MemorizationEpoch {
  std::size_t epoch = 0;
  double acc_corrupted = 0.0;  // w.r.t. the corrupted labels
  double acc_true = 0.0;       // w.r.t. the original labels
};

struct MemorizationReport {
  std::vector<MemorizationEpoch> per_epoch;
};

// Fraction of the new support that is newly included:
// |S_next \ S_prev| / max(1, |S_next|).
double mask_change(const Mask& prev, const Mask& next);
// Symmetric variant: |S_prev xor S_next| / (|S_prev| + |S_next|).
double mask_change_symmetric(const Mask& prev, const Mask& next);

// Top-1 agreement (argmax ties to the lowest class) and mean cross-entropy
// CE(p_a || p_b) with probabilities floored at 1e-12.
AgreementReport agreement(const Mlp& model, const ParamSet& params_a,
                          const ParamSet& params_b, const Dataset& data);

// Fraction of prunable coordinates exactly zero.
double dead_weights(const ParamSet& params);

// Uniform corrupted indices; replacement labels uniform over other classes.
std::pair<Dataset, CorruptionRecord> corrupt_labels(const Dataset& data,
                                                    std::size_t count,
                                                    std::size_t classes,
                                                    SeededRng& rng);

// Per-epoch accuracy of the corrupted subset w.r.t. corrupted and true
// labels, from per-epoch parameter snapshots.
MemorizationReport memorization_track(
    const Mlp& model, const std::vector<ParamSet>& epoch_snapshots,
    const Dataset& corrupted_data, const CorruptionRecord& record);

}  // namespace acdc
