#include "acdc/schedule.hpp"

#include <stdexcept>
#include <string>

namespace acdc {

PhaseKind PhaseSchedule::kind_at(std::size_t epoch) const {
  return ranges[phase_index(epoch)].kind;
}

std::size_t PhaseSchedule::phase_index(std::size_t epoch) const {
  for (std::size_t i = 0; i < ranges.size(); ++i)
    if (epoch >= ranges[i].begin && epoch < ranges[i].end) return i;
  throw std::out_of_range("PhaseSchedule: epoch outside schedule");
}

bool PhaseSchedule::is_phase_entry(std::size_t epoch) const {
  return ranges[phase_index(epoch)].begin == epoch;
}

PhaseSchedule build_schedule(std::size_t total, std::size_t warmup,
                             std::size_t compressed_len,
                             std::size_t decompressed_len,
                             std::size_t final_decompressed_len,
                             std::size_t finetune_len) {
  if (total == 0) throw std::invalid_argument("build_schedule: total epochs 0");
  if (warmup + final_decompressed_len + finetune_len > total)
    throw std::invalid_argument(
        "build_schedule: warmup + final phases exceed total epochs");

  PhaseSchedule s;
  s.total_epochs = total;
  s.warmup = warmup;
  s.compressed_len = compressed_len;
  s.decompressed_len = decompressed_len;
  s.final_decompressed_len = final_decompressed_len;
  s.finetune_len = finetune_len;

  std::size_t pos = 0;
  if (warmup > 0) {
    s.ranges.push_back({0, warmup, PhaseKind::Decompressed});
    pos = warmup;
  }

  // Alternation region: C D C D ... C, landing exactly on alt_end.
  const std::size_t alt_end = total - final_decompressed_len - finetune_len;
  while (pos < alt_end) {
    if (compressed_len == 0 || pos + compressed_len > alt_end)
      throw std::invalid_argument(
          "build_schedule: alternation does not tile; residual " +
          std::to_string(alt_end - pos) + " epochs before the final phases");
    s.ranges.push_back({pos, pos + compressed_len, PhaseKind::Compressed});
    pos += compressed_len;
    if (pos == alt_end) break;
    if (decompressed_len == 0 || pos + decompressed_len + compressed_len > alt_end)
      throw std::invalid_argument(
          "build_schedule: alternation does not tile; residual " +
          std::to_string(alt_end - pos) + " epochs before the final phases");
    s.ranges.push_back({pos, pos + decompressed_len, PhaseKind::Decompressed});
    pos += decompressed_len;
  }

  if (final_decompressed_len > 0) {
    s.ranges.push_back({pos, pos + final_decompressed_len, PhaseKind::Decompressed});
    pos += final_decompressed_len;
  }
  if (finetune_len > 0) {
    s.ranges.push_back({pos, pos + finetune_len, PhaseKind::Compressed});
    pos += finetune_len;
  }

  if (s.ranges.empty() || s.ranges.back().kind != PhaseKind::Compressed)
    throw std::invalid_argument("build_schedule: training must end compressed");
  if (pos != total)
    throw std::invalid_argument("build_schedule: ranges do not cover total");
  return s;
}

}  // namespace acdc
