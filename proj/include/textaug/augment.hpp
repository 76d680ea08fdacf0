#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textaug/corpus.hpp"
#include "textaug/providers/provider.hpp"

namespace textaug::augment {

enum class Method { oversample, paraphrase_p1, paraphrase_p2, zero_shot, few_shot, backtranslation };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

inline constexpr std::string_view kSyntheticSource = "synthetic";

/// A generated sample and where it came from.
struct AugmentedRecord {
  std::string id;
  std::string text;
  std::vector<std::string> labels;
  std::string source_id;  // kSyntheticSource for generated-from-scratch text
  Method method = Method::oversample;
  std::string model;
  std::vector<std::string> language_chain;  // [en, L, en] for backtranslation only
  std::string prompt_fingerprint;           // SHA-256 of the prompt(s); empty without a prompt
  bool identical = false;                   // backtranslation returned the source text
  /// Split tag found when reading a file; merging always forces train.
  std::optional<corpus::Split> claimed_split;

  bool operator==(const AugmentedRecord&) const = default;
};

struct AugmentResult {
  std::vector<AugmentedRecord> records;
  std::vector<std::string> warnings;
  std::size_t provider_calls = 0;
  std::size_t skipped = 0;
};

struct RunOptions {
  std::uint64_t seed = 0;
  /// Concurrent provider calls (the provider may bound them further).
  std::size_t concurrency = 4;
  /// Where completed records are written when a provider failure aborts
  /// the job.
  std::optional<std::filesystem::path> partial_path;
};

/// Adds `factor` copies of every train record carrying at least one target
/// label (a record with several target labels is still copied `factor`
/// times). Targets without train records produce a warning.
AugmentResult oversample(const corpus::Dataset& dataset, std::span<const std::string> targets,
                         std::size_t factor);

enum class PromptMode { p1_iterative, p2_batch };
enum class Balance { nmax, nbal };

std::string_view to_string(PromptMode mode);
PromptMode parse_prompt_mode(std::string_view name);
std::string_view to_string(Balance balance);
Balance parse_balance(std::string_view name);

struct ParaphraseConfig {
  PromptMode mode = PromptMode::p2_batch;
  /// p1: calls per source record; p2: paraphrases requested per call.
  std::size_t n = 3;
  Balance balance = Balance::nmax;
  /// Used with nbal only.
  std::size_t target_per_class = 0;
  std::string model;
  double temperature = 1.0;
};

/// Paraphrases every train record carrying a target label.
///
/// With nbal, each record counts towards its rarest target label (the first
/// one in `targets` order) and every class keeps exactly target_per_class
/// paraphrases chosen by a seeded shuffle; a shortfall raises BalanceError.
AugmentResult paraphrase(const corpus::Dataset& dataset, std::span<const std::string> targets,
                         const ParaphraseConfig& config, providers::ChatProvider& client,
                         const RunOptions& options);

struct GenerateConfig {
  std::size_t shots = 0;  // 0: zero-shot
  std::size_t n = 6;      // sentences requested per call
  std::size_t per_class = 6;
  std::string model;
  double temperature = 1.0;
};

/// Zero/few-shot generation: ceil(per_class / n) calls per class, seeded
/// truncation of over-generation, labels = {class}.
AugmentResult generate(std::span<const std::string> targets, const GenerateConfig& config,
                       const corpus::Dataset& dataset, providers::ChatProvider& client,
                       const RunOptions& options);

struct BacktranslateConfig {
  std::vector<std::string> languages;
  std::string model;
};

/// en -> L -> en for every target-class train record and every language.
/// Languages are validated before any call; per-record failures are
/// skipped and counted.
AugmentResult backtranslate(const corpus::Dataset& dataset, std::span<const std::string> targets,
                            const BacktranslateConfig& config, providers::Translator& client,
                            const RunOptions& options);

struct MergeResult {
  corpus::Dataset dataset;
  std::vector<std::string> warnings;
};

/// Original records plus augmented ones as train records. The train block is
/// shuffled with `seed`; validation and test records follow unchanged.
MergeResult merge_into_training_set(const corpus::Dataset& dataset, std::span<const AugmentedRecord> augmented,
                                    std::uint64_t seed);

/// Splits an LLM reply into sentences: one per line, surrounding blanks and
/// leading list markers ("-", "*", "•", "12.", "3)") removed, lines shorter
/// than two characters dropped.
std::vector<std::string> parse_lines(std::string_view reply);

nlohmann::json to_json(const AugmentedRecord& record);
AugmentedRecord augmented_from_json(const nlohmann::json& j);

void write_augmented(std::span<const AugmentedRecord> records, const std::filesystem::path& path);
std::vector<AugmentedRecord> read_augmented(const std::filesystem::path& path);

}  // namespace textaug::augment
