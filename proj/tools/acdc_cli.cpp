// Experiment driver: every run is a JSON config executed across seeds,
// emitting JSONL metrics, JSON checkpoints/summaries, and CSV plot data.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acdc/diagnostics.hpp"
#include "acdc/io.hpp"
#include "acdc/kernels.hpp"

namespace fs = std::filesystem;
using acdc::io::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

struct FieldError {
  std::string field;
  std::string message;
};

struct ValidationError {
  std::vector<FieldError> fields;
};

struct DivergenceError {
  std::string diagnostic;
};

int log_level() {
  const char* env = std::getenv("ACDC_LOG");
  if (env == nullptr) return 1;
  std::string v = env;
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << msg << "\n";
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// ---- config access with field-level errors ---------------------------------

template <typename T>
T require(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw ValidationError{{{field, "missing required field"}}};
  try {
    return j.at(field).get<T>();
  } catch (const std::exception& e) {
    throw ValidationError{{{field, std::string("bad value: ") + e.what()}}};
  }
}

template <typename T>
T value_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const std::exception& e) {
    throw ValidationError{{{field, std::string("bad value: ") + e.what()}}};
  }
}

acdc::SparsityPattern parse_pattern(const json& j, const std::string& prefix) {
  std::string type = require<std::string>(j, "type");
  if (type == "global_top_k") {
    acdc::GlobalTopK p;
    if (j.contains("k")) p.k = require<std::size_t>(j, "k");
    if (j.contains("fraction")) p.fraction = require<double>(j, "fraction");
    if (!p.k && !p.fraction)
      throw ValidationError{{{prefix, "global_top_k needs k or fraction"}}};
    return p;
  }
  if (type == "uniform_per_layer") {
    acdc::UniformPerLayer p;
    p.fraction = require<double>(j, "fraction");
    p.exempt = value_or<std::vector<std::string>>(j, "exempt", {});
    return p;
  }
  if (type == "semi_structured") {
    acdc::SemiStructuredNM p;
    p.n = require<std::size_t>(j, "n");
    p.m = require<std::size_t>(j, "m");
    if (p.n > p.m)
      throw ValidationError{{{prefix, "semi_structured requires n <= m"}}};
    return p;
  }
  throw ValidationError{{{prefix + ".type", "unknown pattern '" + type + "'"}}};
}

acdc::PhaseSchedule parse_schedule(const json& j, const std::string& prefix) {
  try {
    return acdc::build_schedule(require<std::size_t>(j, "total_epochs"),
                                require<std::size_t>(j, "warmup"),
                                require<std::size_t>(j, "compressed_len"),
                                require<std::size_t>(j, "decompressed_len"),
                                require<std::size_t>(j, "final_decompressed_len"),
                                require<std::size_t>(j, "finetune_len"));
  } catch (const std::invalid_argument& e) {
    throw ValidationError{{{prefix, e.what()}}};
  }
}

acdc::OptimizerState parse_optimizer(const json& j) {
  try {
    return acdc::io::optimizer_from_json(j);
  } catch (const std::exception& e) {
    throw ValidationError{{{"optimizer", e.what()}}};
  }
}

std::vector<std::uint64_t> parse_seeds(const json& cfg,
                                       std::optional<std::uint64_t> override_seed) {
  if (override_seed) return {*override_seed};
  auto seeds = require<std::vector<std::uint64_t>>(cfg, "seeds");
  if (seeds.empty()) throw ValidationError{{{"seeds", "must be non-empty"}}};
  return seeds;
}

fs::path out_dir(const json& cfg, const std::string& override_out) {
  std::string dir =
      override_out.empty() ? require<std::string>(cfg, "out") : override_out;
  fs::create_directories(dir);
  return dir;
}

void check_format_version(const json& cfg) {
  int v = value_or<int>(cfg, "format_version", -1);
  if (v != acdc::io::kFormatVersion)
    throw ValidationError{
        {{"format_version",
          "expected " + std::to_string(acdc::io::kFormatVersion)}}};
}

// ---- tasks ------------------------------------------------------------------

int task_generate(const json& cfg, const std::vector<std::uint64_t>& seeds,
                  const fs::path& out) {
  const json& ds = cfg.contains("dataset")
                       ? cfg.at("dataset")
                       : throw ValidationError{{{"dataset", "missing"}}};
  std::string type = require<std::string>(ds, "type");
  for (std::uint64_t seed : seeds) {
    acdc::SeededRng rng(seed);
    fs::path dir = out / ("seed-" + std::to_string(seed));
    fs::create_directories(dir);
    json provenance{{"format_version", acdc::io::kFormatVersion},
                    {"seed", seed},
                    {"rng_algorithm", acdc::SeededRng::kAlgorithm},
                    {"spec", ds}};
    if (type == "regression") {
      auto p = acdc::make_planted(require<std::size_t>(ds, "n"),
                                  require<std::size_t>(ds, "m"),
                                  require<std::size_t>(ds, "k_star"),
                                  value_or<double>(ds, "noise_sigma", 0.0), rng);
      acdc::io::write_text(dir / "planted.json",
                           acdc::io::planted_to_json(p).dump(1));
    } else if (type == "classification") {
      std::size_t samples = require<std::size_t>(ds, "samples");
      std::size_t features = require<std::size_t>(ds, "features");
      std::size_t classes = require<std::size_t>(ds, "classes");
      double spread = value_or<double>(ds, "spread", 1.0);
      if (classes < 2)
        throw ValidationError{{{"dataset.classes", "need at least 2"}}};
      acdc::Dataset d;
      d.X = acdc::Matrix(samples, features);
      d.y.resize(samples);
      d.classes = classes;
      // class means on scaled unit axes; spread = intra-cluster sigma
      for (std::size_t i = 0; i < samples; ++i) {
        std::size_t c = rng.next_below(classes);
        d.y[i] = c;
        for (std::size_t f = 0; f < features; ++f)
          d.X.at(i, f) =
              (f % classes == c ? 3.0 : 0.0) + spread * rng.next_normal();
      }
      acdc::io::write_dataset_csv(d, dir / "data.csv");
    } else {
      throw ValidationError{{{"dataset.type", "unknown '" + type + "'"}}};
    }
    acdc::io::write_text(dir / "provenance.json", provenance.dump(1));
    log_info("generate: wrote " + dir.string());
  }
  return 0;
}

int task_run_iht(const json& cfg, const std::vector<std::uint64_t>& seeds,
                 const fs::path& out) {
  std::string dataset = require<std::string>(cfg, "dataset");
  if (!fs::exists(dataset))
    throw ValidationError{{{"dataset", "file not found: " + dataset}}};
  auto planted =
      acdc::io::planted_from_json(json::parse(acdc::io::read_text(dataset)));
  acdc::LeastSquares obj(planted.a, planted.b);
  double f_star = obj.value(planted.theta_star);

  const json& jc = cfg.contains("iht")
                       ? cfg.at("iht")
                       : throw ValidationError{{{"iht", "missing"}}};
  acdc::IhtConfig icfg;
  icfg.pattern = parse_pattern(
      jc.contains("pattern") ? jc.at("pattern")
                             : throw ValidationError{{{"iht.pattern", "missing"}}},
      "iht.pattern");
  icfg.max_iters = value_or<std::size_t>(jc, "max_iters", 500);
  if (jc.contains("step_size")) icfg.step_size = require<double>(jc, "step_size");
  std::string mode = value_or<std::string>(jc, "mode", "deterministic");
  if (mode == "stochastic") {
    icfg.mode = acdc::IhtMode::Stochastic;
    icfg.batch_size = value_or<std::size_t>(jc, "batch_size", 8);
  } else if (mode != "deterministic") {
    throw ValidationError{{{"iht.mode", "unknown '" + mode + "'"}}};
  }
  if (jc.contains("polish")) {
    acdc::PolishConfig pc;
    pc.eps = value_or<double>(jc.at("polish"), "eps", 1e-8);
    pc.max_inner = value_or<std::size_t>(jc.at("polish"), "max_inner", 1000);
    icfg.polish = pc;
  }

  json per_seed = json::array();
  std::vector<double> terminal;
  for (std::uint64_t seed : seeds) {
    acdc::SeededRng rng(seed);
    acdc::Trajectory t =
        acdc::run_iht(obj, icfg, acdc::Vec(obj.dim(), 0.0), rng,
                      &planted.theta_star);
    if (t.diverged) {
      json err{{"error", "divergence"},
               {"seed", seed},
               {"diagnostic", t.diagnostic}};
      acdc::io::write_text(out / ("error-seed-" + std::to_string(seed) + ".json"),
                           err.dump(1));
      throw DivergenceError{t.diagnostic};
    }
    std::string run_id = "iht-seed-" + std::to_string(seed);
    std::string jsonl;
    for (const auto& r : t.records) {
      json line{{"format_version", acdc::io::kFormatVersion},
                {"run_id", run_id},
                {"seed", seed},
                {"iter", r.iter},
                {"f", r.f},
                {"f_minus_fstar", r.f - f_star},
                {"grad_norm", r.grad_norm},
                {"support_hash", r.support_hash}};
      if (r.dist_to_star) line["dist_to_star"] = *r.dist_to_star;
      jsonl += line.dump() + "\n";
    }
    acdc::io::write_text(out / (run_id + ".jsonl"), jsonl);

    double star_norm = std::sqrt(acdc::dot(planted.theta_star, planted.theta_star));
    double d2 = 0.0;
    for (std::size_t i = 0; i < obj.dim(); ++i) {
      double d = t.final_theta[i] - planted.theta_star[i];
      d2 += d * d;
    }
    double rel_err = star_norm > 0 ? std::sqrt(d2) / star_norm : std::sqrt(d2);
    bool support_ok = acdc::support_hash(acdc::apply_mask(
                          t.final_theta, acdc::top_k_global(t.final_theta,
                                                            planted.k_star))) ==
                      acdc::support_hash(planted.theta_star);
    per_seed.push_back(json{{"seed", seed},
                            {"terminal_f", t.records.back().f},
                            {"terminal_f_minus_fstar", t.records.back().f - f_star},
                            {"rel_err", rel_err},
                            {"support_recovered", support_ok},
                            {"iters", t.records.back().iter},
                            {"step_size", t.step_size_used}});
    terminal.push_back(t.records.back().f - f_star);
    log_info("run-iht: seed " + std::to_string(seed) + " done");
  }
  json summary{{"format_version", acdc::io::kFormatVersion},
               {"task", "run-iht"},
               {"per_seed", per_seed},
               {"median_terminal_f_minus_fstar", median(terminal)},
               {"simd", acdc::kernels::active_name()}};
  acdc::io::write_text(out / "summary.json", summary.dump(1));
  return 0;
}

struct TrainSetup {
  acdc::Dataset train;
  acdc::Dataset eval;
  std::vector<std::size_t> widths;
};

TrainSetup load_train_setup(const json& cfg, std::uint64_t seed) {
  std::string dataset = require<std::string>(cfg, "dataset");
  if (!fs::exists(dataset))
    throw ValidationError{{{"dataset", "file not found: " + dataset}}};
  acdc::io::CsvIngest in = acdc::io::ingest_csv(dataset);

  double eval_fraction = 0.2;
  if (cfg.contains("train"))
    eval_fraction = value_or<double>(cfg.at("train"), "eval_fraction", 0.2);
  if (eval_fraction < 0.0 || eval_fraction >= 1.0)
    throw ValidationError{{{"train.eval_fraction", "must be in [0,1)"}}};

  // deterministic split, seed-dependent shuffle
  acdc::SeededRng split_rng(seed ^ 0x5eed5eedULL);
  std::vector<std::size_t> order(in.data.size());
  std::iota(order.begin(), order.end(), 0);
  split_rng.shuffle(order);
  std::size_t eval_n = static_cast<std::size_t>(eval_fraction * order.size());

  TrainSetup s;
  s.eval.classes = s.train.classes = in.data.classes;
  s.train.X = acdc::Matrix(order.size() - eval_n, in.data.X.cols);
  s.eval.X = acdc::Matrix(eval_n, in.data.X.cols);
  for (std::size_t i = 0; i < order.size(); ++i) {
    acdc::Dataset& dst = i < eval_n ? s.eval : s.train;
    std::size_t row = i < eval_n ? i : i - eval_n;
    for (std::size_t c = 0; c < in.data.X.cols; ++c)
      dst.X.at(row, c) = in.data.X.at(order[i], c);
    dst.y.push_back(in.data.y[order[i]]);
  }

  auto hidden = require<std::vector<std::size_t>>(
      cfg.contains("model") ? cfg.at("model")
                            : throw ValidationError{{{"model", "missing"}}},
      "hidden");
  s.widths.push_back(in.data.X.cols);
  for (std::size_t h : hidden) s.widths.push_back(h);
  s.widths.push_back(in.data.classes);
  return s;
}

int task_train_acdc(const json& cfg, const std::vector<std::uint64_t>& seeds,
                    const fs::path& out) {
  acdc::PhaseSchedule sched = parse_schedule(
      cfg.contains("schedule") ? cfg.at("schedule")
                               : throw ValidationError{{{"schedule", "missing"}}},
      "schedule");
  acdc::OptimizerState opt = parse_optimizer(
      cfg.contains("optimizer") ? cfg.at("optimizer") : json::object());
  acdc::SparsityPattern pattern = parse_pattern(
      cfg.contains("pattern") ? cfg.at("pattern")
                              : throw ValidationError{{{"pattern", "missing"}}},
      "pattern");
  acdc::TrainOptions options;
  if (cfg.contains("train"))
    options.batch_size = value_or<std::size_t>(cfg.at("train"), "batch_size", 32);

  json per_seed = json::array();
  std::vector<double> final_acc;
  for (std::uint64_t seed : seeds) {
    TrainSetup s = load_train_setup(cfg, seed);
    auto shared = std::make_shared<acdc::Dataset>(s.train);
    acdc::Mlp model(s.widths, shared);
    acdc::SeededRng rng(seed);
    std::string run_id = "acdc-seed-" + std::to_string(seed);

    acdc::TrainResult r =
        acdc::acdc_train(model, s.train, s.eval.size() ? &s.eval : nullptr,
                         sched, opt, pattern, rng, options);

    std::string jsonl;
    for (const auto& m : r.metrics)
      jsonl += acdc::io::metrics_to_json(m, seed, run_id).dump() + "\n";
    acdc::io::write_text(out / (run_id + ".jsonl"), jsonl);

    acdc::io::Checkpoint ckpt;
    ckpt.seed = seed;
    ckpt.params = r.sparse_params;
    ckpt.mask = r.sparse_mask;
    ckpt.schedule = sched;
    ckpt.epoch = sched.total_epochs;
    acdc::io::save_checkpoint(ckpt, out / (run_id + "-sparse.json"));
    if (r.best_dense) {
      acdc::io::Checkpoint dense;
      dense.seed = seed;
      dense.params = r.best_dense->params;
      dense.epoch = r.best_dense->epoch;
      acdc::io::save_checkpoint(dense, out / (run_id + "-best-dense.json"));
    }

    double acc = s.eval.size() ? model.accuracy(r.sparse_params, s.eval)
                               : model.accuracy(r.sparse_params, s.train);
    per_seed.push_back(
        json{{"seed", seed},
             {"sparse_accuracy", acc},
             {"sparsity", acdc::dead_weights(r.sparse_params)},
             {"best_dense_epoch",
              r.best_dense ? json(r.best_dense->epoch) : json(nullptr)}});
    final_acc.push_back(acc);
    log_info("train-acdc: seed " + std::to_string(seed) + " accuracy " +
             std::to_string(acc));
  }
  json summary{{"format_version", acdc::io::kFormatVersion},
               {"task", "train-acdc"},
               {"per_seed", per_seed},
               {"median_sparse_accuracy", median(final_acc)}};
  acdc::io::write_text(out / "summary.json", summary.dump(1));
  return 0;
}

int task_flops(const json& cfg, const fs::path& out) {
  std::string manifest_path = require<std::string>(cfg, "manifest");
  if (!fs::exists(manifest_path))
    throw ValidationError{{{"manifest", "file not found: " + manifest_path}}};
  acdc::LayerManifest m;
  try {
    m = acdc::io::load_manifest(manifest_path);
  } catch (const std::exception& e) {
    throw ValidationError{{{"manifest", e.what()}}};
  }

  double density = value_or<double>(cfg, "density", 1.0);
  if (density < 0.0 || density > 1.0)
    throw ValidationError{{{"density", "must be in [0,1]"}}};
  std::vector<double> densities(m.layers.size(), density);
  // non-prunable layers always run dense
  for (std::size_t i = 0; i < m.layers.size(); ++i)
    if (!m.layers[i].prunable) densities[i] = 1.0;

  json summary{{"format_version", acdc::io::kFormatVersion},
               {"task", "flops"},
               {"manifest", m.name},
               {"density", density},
               {"forward_flops", acdc::forward_flops(m, densities)},
               {"forward_gflops", acdc::forward_flops(m, densities) / 1e9},
               {"forward_flops_dense", acdc::forward_flops_dense(m)}};

  if (cfg.contains("schedule")) {
    acdc::PhaseSchedule sched = parse_schedule(cfg.at("schedule"), "schedule");
    std::size_t samples = require<std::size_t>(cfg, "samples_per_epoch");
    acdc::DensityTrajectory traj;
    for (std::size_t e = 0; e < sched.total_epochs; ++e)
      traj.per_epoch.push_back(sched.kind_at(e) == acdc::PhaseKind::Compressed
                                   ? densities
                                   : std::vector<double>(m.layers.size(), 1.0));
    acdc::FlopReport r = acdc::train_flops(m, sched, traj, samples);
    summary["training_flops"] = r.training_total;
    summary["training_eflops"] = r.training_total / 1e18;
    summary["compressed_flops"] = r.compressed_total;
    summary["decompressed_flops"] = r.decompressed_total;
  }
  acdc::io::write_text(out / "summary.json", summary.dump(1));
  std::cout << summary.dump(1) << "\n";
  return 0;
}

int task_diagnose(const json& cfg, const fs::path& out) {
  std::string pa = require<std::string>(cfg, "checkpoint_a");
  std::string pb = require<std::string>(cfg, "checkpoint_b");
  for (const auto& [field, path] :
       {std::pair<std::string, std::string>{"checkpoint_a", pa},
        {"checkpoint_b", pb}})
    if (!fs::exists(path))
      throw ValidationError{{{field, "file not found: " + path}}};
  acdc::io::Checkpoint a = acdc::io::load_checkpoint(pa);
  acdc::io::Checkpoint b = acdc::io::load_checkpoint(pb);

  json summary{{"format_version", acdc::io::kFormatVersion},
               {"task", "diagnose"},
               {"dead_weights_a", acdc::dead_weights(a.params)},
               {"dead_weights_b", acdc::dead_weights(b.params)}};
  if (a.mask && b.mask) {
    summary["mask_change"] = acdc::mask_change(*a.mask, *b.mask);
    summary["mask_change_symmetric"] =
        acdc::mask_change_symmetric(*a.mask, *b.mask);
  }

  if (cfg.contains("dataset")) {
    std::string dataset = require<std::string>(cfg, "dataset");
    if (!fs::exists(dataset))
      throw ValidationError{{{"dataset", "file not found: " + dataset}}};
    acdc::io::CsvIngest in = acdc::io::ingest_csv(dataset);
    // widths recovered from the checkpoint's weight shapes
    std::vector<std::size_t> widths;
    for (const auto& seg : a.params.segments)
      if (seg.prunable && seg.shape.size() == 2) {
        if (widths.empty()) widths.push_back(seg.shape[1]);
        widths.push_back(seg.shape[0]);
      }
    auto shared = std::make_shared<acdc::Dataset>(in.data);
    acdc::Mlp model(widths, shared);
    acdc::AgreementReport rep =
        acdc::agreement(model, a.params, b.params, in.data);
    summary["top1_agreement"] = rep.top1_agreement;
    summary["mean_cross_entropy"] = rep.mean_cross_entropy;
  }
  acdc::io::write_text(out / "summary.json", summary.dump(1));
  std::cout << summary.dump(1) << "\n";
  return 0;
}

// Renders CSV plot data (per-epoch medians across seeds) from the JSONL
// metric files of a previous run, and cross-checks the stored summary.
int task_report(const json& cfg, const fs::path& out) {
  std::string runs = require<std::string>(cfg, "runs");
  if (!fs::is_directory(runs))
    throw ValidationError{{{"runs", "not a directory: " + runs}}};
  auto fields = value_or<std::vector<std::string>>(
      cfg, "fields", {"train_loss", "eval_accuracy", "sparsity"});

  // epoch -> field -> values across seeds
  std::map<std::size_t, std::map<std::string, std::vector<double>>> table;
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(runs)) {
    if (entry.path().extension() != ".jsonl") continue;
    ++files;
    std::istringstream in(acdc::io::read_text(entry.path()));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      std::size_t epoch = j.contains("epoch") ? j.at("epoch").get<std::size_t>()
                                              : j.at("iter").get<std::size_t>();
      for (const auto& f : fields)
        if (j.contains(f) && j.at(f).is_number())
          table[epoch][f].push_back(j.at(f).get<double>());
    }
  }
  if (files == 0)
    throw ValidationError{{{"runs", "no .jsonl metric files found"}}};

  std::ostringstream csv;
  csv << "epoch";
  for (const auto& f : fields) csv << "," << f;
  csv << "\n";
  csv.precision(17);
  for (const auto& [epoch, cols] : table) {
    csv << epoch;
    for (const auto& f : fields) {
      csv << ",";
      auto it = cols.find(f);
      if (it != cols.end()) csv << median(it->second);
    }
    csv << "\n";
  }
  acdc::io::write_text(out / "plot.csv", csv.str());

  // self-consistency: stored summary medians must match recomputation
  fs::path summary_path = fs::path(runs) / "summary.json";
  if (fs::exists(summary_path)) {
    json summary = json::parse(acdc::io::read_text(summary_path));
    if (summary.contains("per_seed") &&
        summary.contains("median_sparse_accuracy")) {
      std::vector<double> accs;
      for (const auto& s : summary.at("per_seed"))
        accs.push_back(s.at("sparse_accuracy").get<double>());
      double expect = median(accs);
      double stored = summary.at("median_sparse_accuracy").get<double>();
      if (expect != stored)
        throw std::runtime_error("report: summary median mismatch: stored " +
                                 std::to_string(stored) + " recomputed " +
                                 std::to_string(expect));
    }
  }
  log_info("report: wrote " + (out / "plot.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-training experiment driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string override_out;
  std::optional<std::uint64_t> override_seed;

  for (const char* name :
       {"generate", "run-iht", "train-acdc", "flops", "diagnose", "report"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config JSON path")->required();
    sub->add_option("--seed", override_seed, "run a single seed");
    sub->add_option("--out", override_out, "output directory override");
  }

  CLI11_PARSE(app, argc, argv);
  std::string task = app.get_subcommands().front()->get_name();

  try {
    json cfg;
    try {
      cfg = json::parse(acdc::io::read_text(config_path));
    } catch (const std::exception& e) {
      throw ValidationError{{{"config", e.what()}}};
    }
    check_format_version(cfg);
    std::string cfg_task = value_or<std::string>(cfg, "task", task);
    if (cfg_task != task)
      throw ValidationError{
          {{"task", "config task '" + cfg_task +
                        "' does not match subcommand '" + task + "'"}}};

    fs::path out = out_dir(cfg, override_out);
    if (task == "generate")
      return task_generate(cfg, parse_seeds(cfg, override_seed), out);
    if (task == "run-iht")
      return task_run_iht(cfg, parse_seeds(cfg, override_seed), out);
    if (task == "train-acdc")
      return task_train_acdc(cfg, parse_seeds(cfg, override_seed), out);
    if (task == "flops") return task_flops(cfg, out);
    if (task == "diagnose") return task_diagnose(cfg, out);
    return task_report(cfg, out);
  } catch (const ValidationError& e) {
    json err{{"error", "validation"}, {"fields", json::array()}};
    for (const auto& f : e.fields)
      err["fields"].push_back(json{{"field", f.field}, {"message", f.message}});
    std::cerr << err.dump(1) << "\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    json err{{"error", "divergence"}, {"diagnostic", e.diagnostic}};
    std::cerr << err.dump(1) << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    json err{{"error", "runtime"}, {"message", e.what()}};
    std::cerr << err.dump(1) << "\n";
    return 1;
  }
}
