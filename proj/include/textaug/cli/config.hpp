#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textaug/augment.hpp"
#include "textaug/classify.hpp"
#include "textaug/corpus.hpp"

namespace textaug::cli {

namespace fs = std::filesystem;

struct DatasetConfig {
  corpus::Format format = corpus::Format::jsonl;
  /// Either one file holding every split, or one file per split.
  std::optional<fs::path> path;
  std::optional<fs::path> train;
  std::optional<fs::path> validation;
  std::optional<fs::path> test;
  std::optional<fs::path> label_file;
};

struct TargetConfig {
  std::optional<std::size_t> k;
  std::vector<std::string> labels;
};

enum class ProviderKind { chat, deepl, embedding, mock };

std::string_view to_string(ProviderKind kind);

struct ProviderConfig {
  std::string name;
  ProviderKind kind = ProviderKind::chat;
  std::string endpoint;
  /// Environment variable holding the credential; the value is never stored.
  std::string api_key_env;
  double requests_per_minute = 0.0;
  std::size_t max_in_flight = 4;
  std::size_t max_attempts = 5;
  std::size_t timeout_seconds = 60;
  std::string model;  // embedding model name
  std::optional<fs::path> replay_dir;
  std::optional<fs::path> record_dir;
};

enum class Strategy { oversample, paraphrase, zero_shot, few_shot, backtranslation };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);

struct PlanConfig {
  std::string name;
  Strategy strategy = Strategy::oversample;
  std::string provider;  // empty for oversample
  std::size_t factor = 3;
  augment::ParaphraseConfig paraphrase;
  augment::GenerateConfig generate;
  augment::BacktranslateConfig backtranslate;
  /// The plan section as written (after defaults), kept for manifests.
  nlohmann::json raw;
};

struct QualityConfig {
  bool enabled = true;
  /// Provider used for embedding metrics; unset leaves them empty.
  std::optional<std::string> embedder;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  TargetConfig targets;
  std::map<std::string, ProviderConfig> providers;
  std::vector<PlanConfig> plans;
  QualityConfig quality;
  classify::Hyperparams classifier;
  classify::TfidfSettings tfidf;
  std::uint64_t seed = 0;
  fs::path output_dir = "out";
  std::size_t concurrency = 4;

  const PlanConfig& plan(std::string_view name) const;
};

/// Parses and validates a config document. Relative paths are resolved
/// against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& document, const fs::path& base_dir);

/// Reads a JSON config file. Throws IoError or ConfigError.
ExperimentConfig load_config(const fs::path& path);

/// Canonical form with every default filled in and paths as given; holds no
/// credentials. parse_config(to_json(c), base) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace textaug::cli
