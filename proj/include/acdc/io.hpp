#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "acdc/flops.hpp"
#include "acdc/iht.hpp"
#include "acdc/train.hpp"

namespace acdc::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

// ---- JSON encodings --------------------------------------------------------

json mask_to_json(const Mask& m);  // {count, bits_hex} bit-packed
Mask mask_from_json(const json& j);

json paramset_to_json(const ParamSet& p);
ParamSet paramset_from_json(const json& j);

json schedule_to_json(const PhaseSchedule& s);
PhaseSchedule schedule_from_json(const json& j);

json optimizer_to_json(const OptimizerState& o);
OptimizerState optimizer_from_json(const json& j);

json manifest_to_json(const LayerManifest& m);
LayerManifest manifest_from_json(const json& j);
LayerManifest load_manifest(const std::filesystem::path& path);

json metrics_to_json(const EpochMetrics& m, std::uint64_t seed,
                     const std::string& run_id);

struct Checkpoint {
  std::uint64_t seed = 0;
  std::string rng_algorithm = SeededRng::kAlgorithm;
  ParamSet params;
  std::optional<Mask> mask;
  std::optional<PhaseSchedule> schedule;
  std::optional<OptimizerState> optimizer;
  std::size_t epoch = 0;
};

json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const json& j);
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// ---- datasets --------------------------------------------------------------

// CSV with a header; features numeric, labels mapped by sorted-unique order.
struct CsvIngest {
  Dataset data;
  std::map<std::string, std::size_t> label_mapping;
};

void write_dataset_csv(const Dataset& d, const std::filesystem::path& path,
                       const std::string& label_column = "label");
CsvIngest ingest_csv(const std::filesystem::path& path,
                     const std::string& label_column = "label");

// Planted regression instances round-trip through JSON.
json planted_to_json(const PlantedProblem& p);
PlantedProblem planted_from_json(const json& j);

// ---- misc ------------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace acdc::io
