#include "acdc/io.hpp"

#include <fstream>
#include <sstream>

namespace acdc::io {
namespace {

const char* kHex = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("mask: bad hex digit");
}

}  // namespace

json mask_to_json(const Mask& m) {
  std::string hex;
  hex.reserve((m.size() + 3) / 4);
  std::uint8_t byte = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) byte |= static_cast<std::uint8_t>(1u << (i % 8));
    if (i % 8 == 7 || i + 1 == m.size()) {
      hex.push_back(kHex[byte >> 4]);
      hex.push_back(kHex[byte & 0xF]);
      byte = 0;
    }
  }
  return json{{"count", m.size()}, {"bits_hex", hex}};
}

Mask mask_from_json(const json& j) {
  std::size_t count = j.at("count").get<std::size_t>();
  const std::string& hex = j.at("bits_hex").get_ref<const std::string&>();
  Mask m(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t byte_idx = i / 8;
    std::uint8_t byte = static_cast<std::uint8_t>(
        (hex_value(hex.at(2 * byte_idx)) << 4) | hex_value(hex.at(2 * byte_idx + 1)));
    m.set(i, (byte >> (i % 8)) & 1u);
  }
  return m;
}

json paramset_to_json(const ParamSet& p) {
  json segs = json::array();
  for (const auto& s : p.segments)
    segs.push_back(json{{"name", s.name},
                        {"shape", s.shape},
                        {"prunable", s.prunable},
                        {"values", s.values}});
  return json{{"segments", segs}};
}

ParamSet paramset_from_json(const json& j) {
  ParamSet p;
  for (const auto& js : j.at("segments")) {
    Segment s;
    s.name = js.at("name").get<std::string>();
    s.shape = js.at("shape").get<std::vector<std::size_t>>();
    s.prunable = js.at("prunable").get<bool>();
    s.values = js.at("values").get<Vec>();
    p.segments.push_back(std::move(s));
  }
  p.validate();
  return p;
}

json schedule_to_json(const PhaseSchedule& s) {
  return json{{"total_epochs", s.total_epochs},
              {"warmup", s.warmup},
              {"compressed_len", s.compressed_len},
              {"decompressed_len", s.decompressed_len},
              {"final_decompressed_len", s.final_decompressed_len},
              {"finetune_len", s.finetune_len}};
}

PhaseSchedule schedule_from_json(const json& j) {
  return build_schedule(j.at("total_epochs").get<std::size_t>(),
                        j.at("warmup").get<std::size_t>(),
                        j.at("compressed_len").get<std::size_t>(),
                        j.at("decompressed_len").get<std::size_t>(),
                        j.at("final_decompressed_len").get<std::size_t>(),
                        j.at("finetune_len").get<std::size_t>());
}

json optimizer_to_json(const OptimizerState& o) {
  static const std::map<LrKind, std::string> names = {
      {LrKind::Constant, "constant"},
      {LrKind::CosineAfterLinearWarmup, "cosine"},
      {LrKind::StepDecay, "step"}};
  json j{{"lr_kind", names.at(o.lr.kind)},
         {"base_lr", o.lr.base_lr},
         {"lr_warmup_epochs", o.lr.warmup_epochs},
         {"step_gamma", o.lr.step_gamma},
         {"step_every", o.lr.step_every},
         {"momentum", o.momentum},
         {"weight_decay", o.weight_decay}};
  if (!o.buffer.segments.empty()) j["buffer"] = paramset_to_json(o.buffer);
  return j;
}

OptimizerState optimizer_from_json(const json& j) {
  OptimizerState o;
  std::string kind = j.value("lr_kind", "constant");
  if (kind == "constant")
    o.lr.kind = LrKind::Constant;
  else if (kind == "cosine")
    o.lr.kind = LrKind::CosineAfterLinearWarmup;
  else if (kind == "step")
    o.lr.kind = LrKind::StepDecay;
  else
    throw std::invalid_argument("optimizer: unknown lr_kind '" + kind + "'");
  o.lr.base_lr = j.value("base_lr", 0.1);
  o.lr.warmup_epochs = j.value("lr_warmup_epochs", std::size_t{0});
  o.lr.step_gamma = j.value("step_gamma", 0.1);
  o.lr.step_every = j.value("step_every", std::size_t{30});
  o.momentum = j.value("momentum", 0.9);
  o.weight_decay = j.value("weight_decay", 0.0);
  if (j.contains("buffer")) o.buffer = paramset_from_json(j.at("buffer"));
  return o;
}

json manifest_to_json(const LayerManifest& m) {
  json layers = json::array();
  for (const auto& l : m.layers) {
    json jl{{"name", l.name}, {"prunable", l.prunable}};
    if (l.kind == ManifestLayer::Kind::Conv2d) {
      jl["kind"] = "conv2d";
      jl["kernel"] = {l.conv.kernel_h, l.conv.kernel_w};
      jl["in_channels"] = l.conv.in_channels;
      jl["out_channels"] = l.conv.out_channels;
      jl["output"] = {l.conv.out_h, l.conv.out_w};
      jl["groups"] = l.conv.groups;
    } else {
      jl["kind"] = "linear";
      jl["in"] = l.linear.in;
      jl["out"] = l.linear.out;
    }
    layers.push_back(std::move(jl));
  }
  return json{{"name", m.name}, {"layers", layers}};
}

LayerManifest manifest_from_json(const json& j) {
  LayerManifest m;
  m.name = j.value("name", "");
  for (const auto& jl : j.at("layers")) {
    ManifestLayer l;
    l.name = jl.value("name", "");
    l.prunable = jl.value("prunable", true);
    std::string kind = jl.at("kind").get<std::string>();
    if (kind == "conv2d") {
      l.kind = ManifestLayer::Kind::Conv2d;
      l.conv.kernel_h = jl.at("kernel").at(0).get<std::size_t>();
      l.conv.kernel_w = jl.at("kernel").at(1).get<std::size_t>();
      l.conv.in_channels = jl.at("in_channels").get<std::size_t>();
      l.conv.out_channels = jl.at("out_channels").get<std::size_t>();
      l.conv.out_h = jl.at("output").at(0).get<std::size_t>();
      l.conv.out_w = jl.at("output").at(1).get<std::size_t>();
      l.conv.groups = jl.value("groups", std::size_t{1});
    } else if (kind == "linear") {
      l.kind = ManifestLayer::Kind::Linear;
      l.linear.in = jl.at("in").get<std::size_t>();
      l.linear.out = jl.at("out").get<std::size_t>();
    } else {
      throw std::invalid_argument("manifest: unknown layer kind '" + kind + "'");
    }
    m.layers.push_back(std::move(l));
  }
  m.validate();
  return m;
}

LayerManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(json::parse(read_text(path)));
}

json metrics_to_json(const EpochMetrics& m, std::uint64_t seed,
                     const std::string& run_id) {
  return json{{"format_version", kFormatVersion},
              {"run_id", run_id},
              {"seed", seed},
              {"epoch", m.epoch},
              {"phase", m.phase == PhaseKind::Compressed ? "compressed"
                                                         : "decompressed"},
              {"train_loss", m.train_loss},
              {"eval_accuracy", m.eval_accuracy},
              {"sparsity", m.sparsity},
              {"mask_hash", m.mask_hash},
              {"momentum_inf_at_entry", m.momentum_inf_at_entry},
              {"lr", m.lr}};
}

json checkpoint_to_json(const Checkpoint& c) {
  json j{{"format_version", kFormatVersion},
         {"rng", {{"algorithm", c.rng_algorithm}, {"seed", c.seed}}},
         {"params", paramset_to_json(c.params)},
         {"epoch", c.epoch}};
  if (c.mask) j["mask"] = mask_to_json(*c.mask);
  if (c.schedule) j["schedule"] = schedule_to_json(*c.schedule);
  if (c.optimizer) j["optimizer"] = optimizer_to_json(*c.optimizer);
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw std::invalid_argument("checkpoint: unsupported format_version");
  Checkpoint c;
  c.rng_algorithm = j.at("rng").at("algorithm").get<std::string>();
  c.seed = j.at("rng").at("seed").get<std::uint64_t>();
  c.params = paramset_from_json(j.at("params"));
  c.epoch = j.at("epoch").get<std::size_t>();
  if (j.contains("mask")) c.mask = mask_from_json(j.at("mask"));
  if (j.contains("schedule")) c.schedule = schedule_from_json(j.at("schedule"));
  if (j.contains("optimizer"))
    c.optimizer = optimizer_from_json(j.at("optimizer"));
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  write_text(path, checkpoint_to_json(c).dump(2));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(json::parse(read_text(path)));
}

void write_dataset_csv(const Dataset& d, const std::filesystem::path& path,
                       const std::string& label_column) {
  std::ostringstream out;
  for (std::size_t c = 0; c < d.X.cols; ++c) out << "f" << c << ",";
  out << label_column << "\n";
  out.precision(17);
  for (std::size_t r = 0; r < d.X.rows; ++r) {
    for (std::size_t c = 0; c < d.X.cols; ++c) out << d.X.at(r, c) << ",";
    out << d.y[r] << "\n";
  }
  write_text(path, out.str());
}

CsvIngest ingest_csv(const std::filesystem::path& path,
                     const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("ingest_csv: empty file " + path.string());

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };

  std::vector<std::string> header = split(line);
  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx == header.size())
    throw std::runtime_error("ingest_csv: missing label column '" +
                             label_column + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw std::runtime_error("ingest_csv: row " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " cells");
    std::vector<double> feats;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) {
        raw_labels.push_back(cells[i]);
        continue;
      }
      try {
        std::size_t used = 0;
        double v = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument("trailing");
        feats.push_back(v);
      } catch (const std::exception&) {
        throw std::runtime_error("ingest_csv: row " + std::to_string(line_no) +
                                 ", column '" + header[i] +
                                 "': non-numeric feature value '" + cells[i] + "'");
      }
    }
    rows.push_back(std::move(feats));
  }

  CsvIngest result;
  // sorted-unique label mapping
  for (const auto& l : raw_labels) result.label_mapping.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : result.label_mapping) id = next++;

  result.data.classes = result.label_mapping.size();
  result.data.X = Matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
  result.data.y.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), result.data.X.values.begin() + r * result.data.X.cols);
    result.data.y[r] = result.label_mapping.at(raw_labels[r]);
  }
  return result;
}

json planted_to_json(const PlantedProblem& p) {
  return json{{"format_version", kFormatVersion},
              {"rows", p.a.rows},
              {"cols", p.a.cols},
              {"a_values", p.a.values},
              {"b", p.b},
              {"theta_star", p.theta_star},
              {"k_star", p.k_star},
              {"noise_sigma", p.noise_sigma}};
}

PlantedProblem planted_from_json(const json& j) {
  PlantedProblem p;
  p.a = Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  p.a.values = j.at("a_values").get<Vec>();
  p.b = j.at("b").get<Vec>();
  p.theta_star = j.at("theta_star").get<Vec>();
  p.k_star = j.at("k_star").get<std::size_t>();
  p.noise_sigma = j.at("noise_sigma").get<double>();
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace acdc::io
