#include "textaug/cli/commands.hpp"

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "textaug/error.hpp"
#include "textaug/providers/clients.hpp"
#include "textaug/providers/http.hpp"
#include "textaug/providers/mock.hpp"
#include "textaug/quality.hpp"
#include "textaug/rng.hpp"
#include "textaug/text.hpp"

namespace textaug::cli {

using nlohmann::json;

namespace {

constexpr const char* kAugmentedFile = "augmented.jsonl";
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kQualityCsv = "quality.csv";
constexpr const char* kQualityJson = "quality.json";
constexpr const char* kClassificationCsv = "classification.csv";
constexpr const char* kClassificationJson = "classification.json";
constexpr const char* kProxyModel = "tfidf-logreg";

// ---------------------------------------------------------------- files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", path.parent_path().string(), ec.message()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_input(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError(fmt::format("input file '{}' does not exist", path.string()));
}

// ---------------------------------------------------------------- config

ExperimentConfig resolve_config(const GlobalOptions& global) {
  if (!global.config) throw ConfigError("--config is required for this command");
  require_input(*global.config);
  auto cfg = load_config(*global.config);
  if (global.seed) cfg.seed = *global.seed;
  cfg.classifier.seed = cfg.seed;
  if (global.out) cfg.output_dir = *global.out;
  return cfg;
}

std::vector<fs::path> dataset_files(const DatasetConfig& d) {
  std::vector<fs::path> files;
  for (const auto* p : {&d.path, &d.train, &d.validation, &d.test, &d.label_file}) {
    if (*p) files.push_back(**p);
  }
  return files;
}

corpus::Dataset load_data(const DatasetConfig& d) {
  for (const auto& f : dataset_files(d)) require_input(f);
  if (d.path) {
    corpus::LoadOptions opts;
    opts.label_file = d.label_file;
    return corpus::load_dataset(*d.path, d.format, opts);
  }
  return corpus::load_split_files(*d.train, d.validation, d.test, d.format, d.label_file);
}

std::vector<std::string> resolve_targets(const TargetConfig& t, const corpus::Dataset& ds) {
  if (t.k) return corpus::select_least_represented(corpus::label_counts(ds), *t.k);
  for (const auto& l : t.labels) {
    if (!ds.label_index(l)) throw ConfigError(fmt::format("target label '{}' is not in the vocabulary", l));
  }
  return t.labels;
}

std::vector<const PlanConfig*> select_plans(const ExperimentConfig& cfg, const std::vector<std::string>& names) {
  std::vector<const PlanConfig*> out;
  if (names.empty()) {
    for (const auto& p : cfg.plans) out.push_back(&p);
  } else {
    for (const auto& n : names) out.push_back(&cfg.plan(n));
  }
  if (out.empty()) throw ConfigError("the config defines no plans");
  return out;
}

// ---------------------------------------------------------------- providers

/// Builds provider objects from the config, or the seeded mock for every
/// provider under --mock.
class ProviderSet {
 public:
  ProviderSet(const ExperimentConfig& cfg, bool mock) : cfg_(cfg), mock_(mock) {
    if (mock) mock_provider_ = std::make_unique<providers::MockProvider>(cfg.seed);
  }

  providers::ChatProvider& chat(const std::string& name) {
    const auto& p = config(name);
    if (mock_ || p.kind == ProviderKind::mock) return mock();
    auto& slot = chats_[name];
    if (!slot) slot = std::make_unique<providers::ChatCompletionClient>(channel(p));
    return *slot;
  }

  providers::Translator& translator(const std::string& name, const std::string& model) {
    const auto& p = config(name);
    const auto key = name + "\n" + model;
    if (p.kind == ProviderKind::deepl) {
      if (mock_) return mock();
      auto& slot = translators_[key];
      if (!slot) slot = std::make_unique<providers::DeepLClient>(channel(p));
      return *slot;
    }
    if (p.kind == ProviderKind::mock) return mock();
    auto& slot = translators_[key];
    if (!slot) slot = std::make_unique<providers::ChatTranslator>(chat(name), model);
    return *slot;
  }

  providers::Embedder& embedder(const std::string& name) {
    const auto& p = config(name);
    if (mock_ || p.kind == ProviderKind::mock) return mock();
    auto& slot = embedders_[name];
    if (!slot) slot = std::make_unique<providers::EmbeddingClient>(channel(p), p.model);
    return *slot;
  }

  /// The mock under --mock, else the configured embedder, else none.
  providers::Embedder* quality_embedder(const std::optional<std::string>& name) {
    if (mock_) return &mock();
    return name ? &embedder(*name) : nullptr;
  }

  std::string endpoint(const std::string& name) {
    const auto& p = config(name);
    return mock_ || p.kind == ProviderKind::mock ? "mock" : p.endpoint;
  }

 private:
  const ProviderConfig& config(const std::string& name) const {
    auto it = cfg_.providers.find(name);
    if (it == cfg_.providers.end()) throw ConfigError(fmt::format("provider '{}' is not configured", name));
    return it->second;
  }

  providers::MockProvider& mock() {
    if (!mock_provider_) mock_provider_ = std::make_unique<providers::MockProvider>(cfg_.seed);
    return *mock_provider_;
  }

  std::shared_ptr<providers::HttpChannel> channel(const ProviderConfig& p) {
    auto& slot = channels_[p.name];
    if (slot) return slot;
    providers::ChannelOptions opts;
    opts.retry.max_attempts = p.max_attempts;
    opts.requests_per_minute = p.requests_per_minute;
    opts.max_in_flight = p.max_in_flight;
    opts.record_dir = p.record_dir;
    if (!p.api_key_env.empty() && !p.replay_dir) {
      const char* key = std::getenv(p.api_key_env.c_str());
      if (!key || !*key)
        throw ConfigError(fmt::format("provider '{}': environment variable {} is not set", p.name, p.api_key_env));
      const std::string scheme = p.kind == ProviderKind::deepl ? "DeepL-Auth-Key " : "Bearer ";
      opts.headers.emplace("Authorization", scheme + key);
    }
    std::shared_ptr<providers::Transport> transport;
    if (p.replay_dir)
      transport = std::make_shared<providers::ReplayTransport>(*p.replay_dir);
    else
      transport = std::make_shared<providers::HttplibTransport>(p.endpoint, std::chrono::seconds(p.timeout_seconds));
    slot = std::make_shared<providers::HttpChannel>(std::move(transport), std::move(opts));
    return slot;
  }

  const ExperimentConfig& cfg_;
  bool mock_;
  std::unique_ptr<providers::MockProvider> mock_provider_;
  std::unordered_map<std::string, std::shared_ptr<providers::HttpChannel>> channels_;
  std::unordered_map<std::string, std::unique_ptr<providers::ChatProvider>> chats_;
  std::unordered_map<std::string, std::unique_ptr<providers::Translator>> translators_;
  std::unordered_map<std::string, std::unique_ptr<providers::Embedder>> embedders_;
};

// ---------------------------------------------------------------- augment

json manifest_config(const ExperimentConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("output_dir");  // the same run may be written anywhere
  return j;
}

void run_plan(const ExperimentConfig& cfg, bool mock, const PlanConfig& plan, const corpus::Dataset& ds,
              const std::vector<std::string>& targets, ProviderSet& providers, std::ostream& out) {
  const fs::path dir = cfg.output_dir / plan.name;
  std::error_code ec;
  fs::remove_all(dir / "partial", ec);
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  augment::RunOptions run;
  run.seed = cfg.seed;
  run.concurrency = cfg.concurrency;
  run.partial_path = dir / "partial" / kAugmentedFile;

  spdlog::info("plan {}: {} on {} target label(s)", plan.name, to_string(plan.strategy), targets.size());
  augment::AugmentResult result;
  switch (plan.strategy) {
    case Strategy::oversample:
      result = augment::oversample(ds, targets, plan.factor);
      break;
    case Strategy::paraphrase:
      result = augment::paraphrase(ds, targets, plan.paraphrase, providers.chat(plan.provider), run);
      break;
    case Strategy::zero_shot:
    case Strategy::few_shot:
      result = augment::generate(targets, plan.generate, ds, providers.chat(plan.provider), run);
      break;
    case Strategy::backtranslation:
      result = augment::backtranslate(ds, targets, plan.backtranslate,
                                      providers.translator(plan.provider, plan.backtranslate.model), run);
      break;
  }
  for (const auto& w : result.warnings) spdlog::warn("plan {}: {}", plan.name, w);

  const fs::path augmented_path = dir / kAugmentedFile;
  augment::write_augmented(result.records, augmented_path);

  json inputs = json::object();
  for (const auto& f : dataset_files(cfg.dataset)) inputs[f.string()] = sha256_hex(read_file(f));
  json provider = nullptr;
  if (!plan.provider.empty()) {
    provider = {{"name", plan.provider},
                {"kind", std::string(to_string(cfg.providers.at(plan.provider).kind))},
                {"endpoint", providers.endpoint(plan.provider)}};
  }
  const json manifest = {
      {"manifest_version", 1},
      {"plan", plan.raw},
      {"seed", cfg.seed},
      {"mock", mock},
      {"targets", targets},
      {"provider", provider},
      {"config", manifest_config(cfg)},
      {"inputs", inputs},
      {"outputs",
       {{kAugmentedFile, {{"records", result.records.size()}, {"sha256", sha256_hex(read_file(augmented_path))}}}}},
      {"provider_calls", result.provider_calls},
      {"skipped", result.skipped},
      {"warnings", result.warnings}};
  write_file(dir / kManifestFile, dump(manifest));
  out << fmt::format("{}: {} records -> {}\n", plan.name, result.records.size(), augmented_path.string());
}

void augment_from_manifest(const GlobalOptions& global, const fs::path& manifest_path, std::ostream& out) {
  require_input(manifest_path);
  const auto manifest = read_json(manifest_path);
  if (!manifest.is_object() || !manifest.contains("config") || !manifest.contains("plan"))
    throw ConfigError(fmt::format("{} is not a run manifest", manifest_path.string()));
  auto doc = manifest["config"];
  doc["seed"] = manifest.value("seed", doc.value("seed", 0ULL));
  auto cfg = parse_config(doc, "/");
  const auto abs_manifest = fs::absolute(manifest_path);
  cfg.output_dir = global.out ? *global.out : abs_manifest.parent_path().parent_path();
  cfg.classifier.seed = cfg.seed;
  const bool mock = manifest.value("mock", false) || global.mock;
  const auto& plan = cfg.plan(manifest["plan"].at("name").get<std::string>());

  const std::string expected_hash = manifest["outputs"][kAugmentedFile].value("sha256", "");
  const auto ds = load_data(cfg.dataset);
  const json inputs = manifest.value("inputs", json::object());
  for (const auto& [file, hash] : inputs.items()) {
    if (fs::exists(file) && sha256_hex(read_file(file)) != hash.get<std::string>())
      spdlog::warn("input {} changed since the manifest was written", file);
  }
  const auto targets = manifest.value("targets", resolve_targets(cfg.targets, ds));
  ProviderSet providers(cfg, mock);
  run_plan(cfg, mock, plan, ds, targets, providers, out);
  const auto produced = sha256_hex(read_file(cfg.output_dir / plan.name / kAugmentedFile));
  if (produced == expected_hash)
    out << fmt::format("{}: output matches the manifest\n", plan.name);
  else
    spdlog::warn("{}: output differs from the manifest (sha256 {} vs {})", plan.name, produced, expected_hash);
}

// ---------------------------------------------------------------- quality

void quality_for_plan(const ExperimentConfig& cfg, const PlanConfig& plan, const corpus::Dataset& ds,
                      ProviderSet& providers, std::ostream& out) {
  const fs::path dir = cfg.output_dir / plan.name;
  const fs::path augmented_path = dir / kAugmentedFile;
  if (!fs::exists(augmented_path))
    throw ConfigError(fmt::format("plan {}: {} not found; run augment first", plan.name, augmented_path.string()));
  const auto records = augment::read_augmented(augmented_path);

  std::unordered_map<std::string_view, const corpus::Record*> by_id;
  for (const auto& r : ds.records) by_id.emplace(r.id, &r);

  std::vector<quality::SentencePair> pairs;
  std::size_t synthetic = 0, orphaned = 0;
  for (const auto& r : records) {
    if (r.source_id == augment::kSyntheticSource) {
      ++synthetic;
      continue;
    }
    auto it = by_id.find(r.source_id);
    if (it == by_id.end()) {
      ++orphaned;
      continue;
    }
    pairs.push_back({it->second->text, r.text, pairs.size()});
  }

  std::vector<std::string> footnotes;
  if (synthetic > 0) footnotes.push_back(fmt::format("{} synthetic records excluded", synthetic));
  if (orphaned > 0) footnotes.push_back(fmt::format("{} records with an unknown source id excluded", orphaned));

  std::string csv = quality::csv_header() + "\n";
  json j;
  if (pairs.empty()) {
    const std::string warning = "no eligible sentence pairs; the report is empty";
    spdlog::warn("plan {}: {}", plan.name, warning);
    j = {{"method_name", plan.name},
         {"empty", true},
         {"n_pairs_scored", 0},
         {"n_synthetic_excluded", synthetic},
         {"warnings", {warning}}};
  } else {
    auto* embedder = providers.quality_embedder(cfg.quality.embedder);
    auto report = quality::evaluate_set(plan.name, pairs, embedder);
    report.n_synthetic_excluded = synthetic;
    for (const auto& w : report.warnings) spdlog::warn("plan {}: {}", plan.name, w);
    csv += quality::csv_row(report) + "\n";
    j = quality::to_json(report);
    j["empty"] = false;
  }
  j["n_pairs_total"] = pairs.size();
  j["footnotes"] = footnotes;
  write_file(dir / kQualityCsv, csv);
  write_file(dir / kQualityJson, dump(j));
  out << csv;
  for (const auto& f : footnotes) out << "* " << f << "\n";
}

}  // namespace

void cmd_stats(const GlobalOptions& global, const StatsOptions& options, std::ostream& out) {
  DatasetConfig d;
  const bool overridden = options.data || options.train;
  if (overridden) {
    d.path = options.data;
    d.train = options.train;
    d.validation = options.validation;
    d.test = options.test;
    d.label_file = options.label_file;
    if (options.data && options.train) throw ArgumentError("use either --data or --train, not both");
  } else if (global.config) {
    d = resolve_config(global).dataset;
    if (options.label_file) d.label_file = options.label_file;
  } else {
    throw ArgumentError("stats needs --data, --train or --config");
  }
  if (options.format) {
    try {
      d.format = corpus::parse_format(*options.format);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (overridden) {
    const auto& f = options.data ? *options.data : *options.train;
    d.format = f.extension() == ".tsv" ? corpus::Format::tsv : corpus::Format::jsonl;
  }
  const auto ds = load_data(d);

  std::vector<corpus::Split> splits;
  for (const auto& s : options.splits) splits.push_back(corpus::parse_split(s));
  if (splits.empty()) splits.assign(std::begin(corpus::kAllSplits), std::end(corpus::kAllSplits));
  const auto counts = corpus::label_counts(ds, splits);

  std::string counts_csv = "label,count,frequency\n";
  for (const auto& c : counts) counts_csv += fmt::format("{},{},{:.6f}\n", text::csv_field(c.label), c.count, c.frequency);

  std::string targets_csv;
  if (options.k) {
    const auto targets = corpus::select_least_represented(counts, *options.k);
    targets_csv = "label,count\n";
    for (const auto& t : targets) {
      auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& c) { return c.label == t; });
      targets_csv += fmt::format("{},{}\n", text::csv_field(t), it->count);
    }
  }
  out << (options.k ? targets_csv : counts_csv);

  if (global.out) {
    const auto corr = corpus::label_correlation(ds, splits);
    std::string corr_csv = "label";
    for (const auto& l : corr.labels) corr_csv += "," + text::csv_field(l);
    corr_csv += "\n";
    for (std::size_t i = 0; i < corr.labels.size(); ++i) {
      corr_csv += text::csv_field(corr.labels[i]);
      for (std::size_t j = 0; j < corr.labels.size(); ++j) corr_csv += fmt::format(",{:.6f}", corr.at(i, j));
      corr_csv += "\n";
    }
    const fs::path dir = *global.out / "stats";
    write_file(dir / "label_counts.csv", counts_csv);
    write_file(dir / "label_correlation.csv", corr_csv);
    if (options.k) write_file(dir / "targets.csv", targets_csv);
  }
}

void cmd_augment(const GlobalOptions& global, const AugmentOptions& options, std::ostream& out) {
  if (options.manifest) {
    if (!options.plans.empty()) throw ArgumentError("--manifest and --plan cannot be combined");
    augment_from_manifest(global, *options.manifest, out);
    return;
  }
  const auto cfg = resolve_config(global);
  const auto plans = select_plans(cfg, options.plans);
  const auto ds = load_data(cfg.dataset);
  const auto targets = resolve_targets(cfg.targets, ds);
  ProviderSet providers(cfg, global.mock);
  for (const auto* plan : plans) run_plan(cfg, global.mock, *plan, ds, targets, providers, out);
}

void cmd_quality(const GlobalOptions& global, const PlanOptions& options, std::ostream& out) {
  const auto cfg = resolve_config(global);
  if (!cfg.quality.enabled) {
    spdlog::info("quality evaluation is disabled in the config");
    return;
  }
  const auto plans = select_plans(cfg, options.plans);
  const auto ds = load_data(cfg.dataset);
  ProviderSet providers(cfg, global.mock);
  for (const auto* plan : plans) quality_for_plan(cfg, *plan, ds, providers, out);
}

void cmd_train_eval(const GlobalOptions& global, const TrainEvalOptions& options, std::ostream& out) {
  const auto cfg = resolve_config(global);
  const auto plans = select_plans(cfg, options.plans);
  if ((options.predictions || options.baseline_predictions) && plans.size() != 1)
    throw ArgumentError("prediction files need exactly one --plan");
  const auto ds = load_data(cfg.dataset);
  const auto targets = resolve_targets(cfg.targets, ds);

  classify::EvalOptions eval;
  eval.hyperparams = cfg.classifier;
  eval.tfidf = cfg.tfidf;
  if (options.baseline_predictions) {
    require_input(*options.baseline_predictions);
    eval.external_baseline = classify::import_external_predictions(*options.baseline_predictions, ds);
  }
  if (options.predictions) {
    require_input(*options.predictions);
    eval.external_augmented = classify::import_external_predictions(*options.predictions, ds);
  }

  for (const auto* plan : plans) {
    const fs::path dir = cfg.output_dir / plan->name;
    const fs::path augmented_path = dir / kAugmentedFile;
    if (!fs::exists(augmented_path))
      throw ConfigError(fmt::format("plan {}: {} not found; run augment first", plan->name, augmented_path.string()));
    const auto augmented = augment::read_augmented(augmented_path);
    const auto merged = augment::merge_into_training_set(ds, augmented, cfg.seed);
    for (const auto& w : merged.warnings) spdlog::warn("plan {}: {}", plan->name, w);

    const auto result = classify::run_eval(ds, merged.dataset, targets, eval);
    const std::string base_model = eval.external_baseline ? "external" : kProxyModel;
    const std::string aug_model = eval.external_augmented ? "external" : kProxyModel;
    const std::string csv = classify::csv_header() + "\n" + classify::csv_row("Baseline", base_model, result.baseline) +
                            "\n" + classify::csv_row(plan->name, aug_model, result.augmented) + "\n";
    const json j = {{"plan", plan->name},
                    {"baseline_model", base_model},
                    {"model", aug_model},
                    {"train_records", {{"original", ds.count(corpus::Split::train)},
                                       {"augmented", merged.dataset.count(corpus::Split::train)}}},
                    {"hyperparams",
                     {{"learning_rate", cfg.classifier.learning_rate},
                      {"l2_lambda", cfg.classifier.l2_lambda},
                      {"epochs", cfg.classifier.epochs},
                      {"min_df", cfg.tfidf.min_df},
                      {"seed", cfg.seed}}},
                    {"baseline", classify::to_json(result.baseline)},
                    {"augmented", classify::to_json(result.augmented)},
                    {"warnings", merged.warnings}};
    write_file(dir / kClassificationCsv, csv);
    write_file(dir / kClassificationJson, dump(j));
    out << csv;
  }
}

namespace {

std::string md_row(const std::vector<std::string>& cells) { return "| " + text::join(cells, " | ") + " |\n"; }

std::string md_header(const std::vector<std::string>& cells) {
  std::vector<std::string> rule(cells.size(), "---");
  return md_row(cells) + md_row(rule);
}

std::string fmt_opt(const json& v, const char* spec) {
  return v.is_number() ? fmt::format(fmt::runtime(spec), v.get<double>()) : std::string("n/a");
}

std::string fmt_pct(double v) { return fmt::format("{:.2f}", std::abs(v) < 0.005 ? 0.0 : v); }

}  // namespace

void cmd_report(const GlobalOptions& global, std::ostream& out) {
  const auto cfg = resolve_config(global);
  std::vector<const PlanConfig*> plans;
  for (const auto& p : cfg.plans) plans.push_back(&p);
  std::sort(plans.begin(), plans.end(), [](const auto* a, const auto* b) { return a->name < b->name; });

  const std::vector<std::string> quality_cols = {"Data aug.",   "Word Original",     "Word Generated",
                                                 "Word Ratio",  "Jaccard Dissimilarity", "Entropy",
                                                 "TTR Ratio",   "Cosine Similarity", "Bertscore-F1"};
  const std::vector<std::string> class_cols = {"Data aug",          "FT Model",           "F1-macro (all Cls)",
                                               "%Change (all Cls)", "F1-macro (aug Cls)", "%Change (aug Cls)",
                                               "F1-macro (othr Cls)", "%Change (othr Cls)"};

  std::string md = "# Augmentation report\n\n";
  md += fmt::format("Seed {}; plans sorted by name.\n\n", cfg.seed);

  md += "## Lexical diversity and semantic fidelity\n\n" + md_header(quality_cols);
  std::vector<std::string> footnotes;
  std::size_t quality_rows = 0;
  for (const auto* p : plans) {
    const fs::path f = cfg.output_dir / p->name / kQualityJson;
    std::vector<std::string> cells(quality_cols.size(), "");
    cells[0] = p->name;
    if (!fs::exists(f)) {
      cells[1] = "no results";
    } else {
      const auto j = read_json(f);
      if (j.value("empty", false)) {
        cells[1] = "no eligible pairs";
      } else {
        cells[1] = fmt::format("{}", std::lround(j.at("avg_word_ref").get<double>()));
        cells[2] = fmt::format("{}", std::lround(j.at("avg_word_gen").get<double>()));
        cells[3] = fmt_opt(j["word_ratio"], "{:.4f}");
        cells[4] = fmt_opt(j["avg_jaccard"], "{:.4f}");
        cells[5] = fmt_opt(j["avg_entropy_ratio"], "{:.4f}");
        cells[6] = fmt_opt(j["ttr_ratio"], "{:.4f}");
        cells[7] = fmt_opt(j["avg_cosine"], "{:.4f}");
        cells[8] = fmt_opt(j["avg_bertscore_f1"], "{:.4f}");
        ++quality_rows;
      }
      for (const auto& note : j.value("footnotes", std::vector<std::string>{}))
        footnotes.push_back(fmt::format("{}: {}", p->name, note));
    }
    md += md_row(cells);
  }
  if (quality_rows == 0) md += "\nNo results.\n";
  for (const auto& f : footnotes) md += "\n* " + f;
  if (!footnotes.empty()) md += "\n";

  md += "\n## Classification\n\n" + md_header(class_cols);
  std::size_t class_rows = 0;
  std::optional<json> shown_baseline;
  for (const auto* p : plans) {
    const fs::path f = cfg.output_dir / p->name / kClassificationJson;
    if (!fs::exists(f)) {
      std::vector<std::string> cells(class_cols.size(), "");
      cells[0] = p->name;
      cells[1] = "no results";
      md += md_row(cells);
      continue;
    }
    const auto j = read_json(f);
    auto row = [&](const std::string& name, const std::string& model, const json& r) {
      md += md_row({name, model, fmt::format("{:.4f}", r.at("F1-macro (all Cls)").get<double>()),
                    fmt_pct(r.at("%Change (all Cls)").get<double>()),
                    fmt::format("{:.4f}", r.at("F1-macro (aug Cls)").get<double>()),
                    fmt_pct(r.at("%Change (aug Cls)").get<double>()),
                    fmt::format("{:.4f}", r.at("F1-macro (othr Cls)").get<double>()),
                    fmt_pct(r.at("%Change (othr Cls)").get<double>())});
    };
    if (!shown_baseline) {
      row("Baseline", j.value("baseline_model", kProxyModel), j.at("baseline"));
      shown_baseline = j.at("baseline");
    } else if (j.at("baseline") != *shown_baseline) {
      row(fmt::format("Baseline ({})", p->name), j.value("baseline_model", kProxyModel), j.at("baseline"));
    }
    row(p->name, j.value("model", kProxyModel), j.at("augmented"));
    ++class_rows;
  }
  if (class_rows == 0) md += "\nNo results.\n";

  const fs::path path = cfg.output_dir / "report.md";
  write_file(path, md);
  out << fmt::format("report written to {}\n", path.string());
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (!spdlog::get("textaug")) {
    auto logger = spdlog::stderr_color_mt("textaug");
    spdlog::set_default_logger(logger);
  }

  CLI::App app{"Text data augmentation experiments: augment, score and compare."};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string log_level = "info";
  app.add_option("--config", global.config, "Experiment config (JSON)");
  app.add_option("--seed", global.seed, "Override the config seed");
  app.add_flag("--mock", global.mock, "Use the offline mock for every provider");
  app.add_option("--out", global.out, "Override the output directory");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "Label distribution and correlation");
  stats_cmd->add_option("--data", stats.data, "Dataset file with every split");
  stats_cmd->add_option("--train", stats.train, "Train split file");
  stats_cmd->add_option("--validation", stats.validation, "Validation split file");
  stats_cmd->add_option("--test", stats.test, "Test split file");
  stats_cmd->add_option("--label-file", stats.label_file, "Label names, one per line");
  stats_cmd->add_option("--format", stats.format, "jsonl or tsv (default: from the extension)");
  stats_cmd->add_option("--k", stats.k, "Print the k least represented labels");
  stats_cmd->add_option("--splits", stats.splits, "Splits to count (default: all)")->delimiter(',');

  AugmentOptions augment_opts;
  auto* augment_cmd = app.add_subcommand("augment", "Run augmentation plans");
  augment_cmd->add_option("--plan", augment_opts.plans, "Plan name (repeatable; default: all)");
  augment_cmd->add_option("--manifest", augment_opts.manifest, "Re-run the plan recorded in a manifest");

  PlanOptions quality_opts;
  auto* quality_cmd = app.add_subcommand("quality", "Lexical diversity and semantic fidelity of a plan's output");
  quality_cmd->add_option("--plan", quality_opts.plans, "Plan name (repeatable; default: all)");

  TrainEvalOptions train_opts;
  auto* train_cmd = app.add_subcommand("train-eval", "Compare classifiers trained without and with augmentation");
  train_cmd->add_option("--plan", train_opts.plans, "Plan name (repeatable; default: all)");
  train_cmd->add_option("--predictions", train_opts.predictions, "JSONL predictions replacing the augmented model");
  train_cmd->add_option("--baseline-predictions", train_opts.baseline_predictions,
                        "JSONL predictions replacing the baseline model");

  auto* report_cmd = app.add_subcommand("report", "Combine every plan's results into report.md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (stats_cmd->parsed()) cmd_stats(global, stats, out);
    else if (augment_cmd->parsed()) cmd_augment(global, augment_opts, out);
    else if (quality_cmd->parsed()) cmd_quality(global, quality_opts, out);
    else if (train_cmd->parsed()) cmd_train_eval(global, train_opts, out);
    else if (report_cmd->parsed()) cmd_report(global, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::io);
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  }
  return static_cast<int>(ExitCode::ok);
}

}  // namespace textaug::cli
