#include "acdc/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace acdc {

double mask_change(const Mask& prev, const Mask& next) {
  if (prev.size() != next.size())
    throw std::invalid_argument("mask_change: length mismatch");
  std::size_t fresh = 0;
  for (std::size_t i = 0; i < next.size(); ++i)
    if (next[i] && !prev[i]) ++fresh;
  return static_cast<double>(fresh) /
         static_cast<double>(std::max<std::size_t>(1, next.popcount()));
}

double mask_change_symmetric(const Mask& prev, const Mask& next) {
  if (prev.size() != next.size())
    throw std::invalid_argument("mask_change: length mismatch");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < next.size(); ++i)
    if (prev[i] != next[i]) ++diff;
  std::size_t denom = prev.popcount() + next.popcount();
  if (denom == 0) return 0.0;
  return static_cast<double>(diff) / static_cast<double>(denom);
}

AgreementReport agreement(const Mlp& model, const ParamSet& params_a,
                          const ParamSet& params_b, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("agreement: empty dataset");
  constexpr double kFloor = 1e-12;
  AgreementReport r;
  std::size_t agree = 0;
  double ce = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Vec pa = model.predict_proba(params_a, data.X.row(i));
    Vec pb = model.predict_proba(params_b, data.X.row(i));
    std::size_t aa = std::max_element(pa.begin(), pa.end()) - pa.begin();
    std::size_t ab = std::max_element(pb.begin(), pb.end()) - pb.begin();
    if (aa == ab) ++agree;
    for (std::size_t c = 0; c < pa.size(); ++c)
      ce -= pa[c] * std::log(std::max(pb[c], kFloor));
  }
  r.top1_agreement = static_cast<double>(agree) / static_cast<double>(data.size());
  r.mean_cross_entropy = ce / static_cast<double>(data.size());
  return r;
}

double dead_weights(const ParamSet& params) {
  std::size_t total = 0, zeros = 0;
  for (const auto& s : params.segments) {
    if (!s.prunable) continue;
    total += s.size();
    for (double v : s.values)
      if (v == 0.0) ++zeros;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(zeros) / static_cast<double>(total);
}

std::pair<Dataset, CorruptionRecord> corrupt_labels(const Dataset& data,
                                                    std::size_t count,
                                                    std::size_t classes,
                                                    SeededRng& rng) {
  if (classes < 2) throw std::invalid_argument("corrupt_labels: classes < 2");
  if (count > data.size())
    throw std::invalid_argument("corrupt_labels: count exceeds sample count");
  Dataset out = data;
  CorruptionRecord rec;
  rec.seed = rng.seed();
  std::vector<std::size_t> idx(data.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t s = idx[i];
    std::size_t original = data.y[s];
    std::size_t replacement;
    do {  // uniform over the other classes
      replacement = static_cast<std::size_t>(rng.next_below(classes));
    } while (replacement == original);
    out.y[s] = replacement;
    rec.indices.push_back(s);
    rec.original_labels.push_back(original);
    rec.replacement_labels.push_back(replacement);
  }
  return {std::move(out), std::move(rec)};
}

MemorizationReport memorization_track(
    const Mlp& model, const std::vector<ParamSet>& epoch_snapshots,
    const Dataset& corrupted_data, const CorruptionRecord& record) {
  if (epoch_snapshots.empty())
    throw std::invalid_argument("memorization_track: no snapshots");
  MemorizationReport rep;
  const std::size_t n = record.indices.size();
  for (std::size_t e = 0; e < epoch_snapshots.size(); ++e) {
    MemorizationEpoch me;
    me.epoch = e;
    if (n > 0) {
      std::size_t hit_corrupted = 0, hit_true = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t s = record.indices[i];
        Vec p = model.predict_proba(epoch_snapshots[e], corrupted_data.X.row(s));
        std::size_t arg = std::max_element(p.begin(), p.end()) - p.begin();
        if (arg == record.replacement_labels[i]) ++hit_corrupted;
        if (arg == record.original_labels[i]) ++hit_true;
      }
      me.acc_corrupted = static_cast<double>(hit_corrupted) / n;
      me.acc_true = static_cast<double>(hit_true) / n;
    }
    rep.per_epoch.push_back(me);
  }
  return rep;
}

}  // namespace acdc
