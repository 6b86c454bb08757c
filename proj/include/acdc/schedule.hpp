#pragma once

#include <cstddef>
#include <vector>

namespace acdc {

enum class PhaseKind { Compressed, Decompressed };

struct PhaseRange {
  std::size_t begin = 0;  // inclusive epoch
  std::size_t end = 0;    // exclusive epoch
  PhaseKind kind = PhaseKind::Decompressed;

  bool operator==(const PhaseRange&) const = default;
};

// Epoch partition: warm-up (decompressed), alternating compressed /
// decompressed phases, a widened final decompressed phase, and a compressed
// fine-tuning tail. Training always ends compressed.
struct PhaseSchedule {
  std::size_t total_epochs = 0;
  std::size_t warmup = 0;
  std::size_t compressed_len = 0;
  std::size_t decompressed_len = 0;
  std::size_t final_decompressed_len = 0;
  std::size_t finetune_len = 0;
  std::vector<PhaseRange> ranges;

  PhaseKind kind_at(std::size_t epoch) const;
  // Index into ranges for the given epoch.
  std::size_t phase_index(std::size_t epoch) const;
  bool is_phase_entry(std::size_t epoch) const;
};

PhaseSchedule build_schedule(std::size_t total, std::size_t warmup,
                             std::size_t compressed_len,
                             std::size_t decompressed_len,
                             std::size_t final_decompressed_len,
                             std::size_t finetune_len);

}  // namespace acdc
