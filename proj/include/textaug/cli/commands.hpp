#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "textaug/cli/config.hpp"

namespace textaug::cli {

struct GlobalOptions {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  bool mock = false;
  std::optional<fs::path> out;
};

struct StatsOptions {
  /// Dataset overrides; without them the config's dataset is used.
  std::optional<fs::path> data;
  std::optional<fs::path> train;
  std::optional<fs::path> validation;
  std::optional<fs::path> test;
  std::optional<fs::path> label_file;
  std::optional<std::string> format;
  std::optional<std::size_t> k;
  std::vector<std::string> splits;  // empty: all
};

struct PlanOptions {
  std::vector<std::string> plans;  // empty: every plan in the config
};

struct AugmentOptions {
  std::vector<std::string> plans;
  /// Re-run exactly what a previous manifest describes.
  std::optional<fs::path> manifest;
};

struct TrainEvalOptions {
  std::vector<std::string> plans;
  std::optional<fs::path> predictions;
  std::optional<fs::path> baseline_predictions;
};

/// Label counts (descending) as CSV; with k, only the k least represented
/// labels. With --out, also writes counts, correlation and targets under
/// <out>/stats/.
void cmd_stats(const GlobalOptions& global, const StatsOptions& options, std::ostream& out);

/// Writes <out>/<plan>/augmented.jsonl and manifest.json for each plan.
void cmd_augment(const GlobalOptions& global, const AugmentOptions& options, std::ostream& out);

/// Writes <out>/<plan>/quality.csv and quality.json.
void cmd_quality(const GlobalOptions& global, const PlanOptions& options, std::ostream& out);

/// Writes <out>/<plan>/classification.csv and classification.json.
void cmd_train_eval(const GlobalOptions& global, const TrainEvalOptions& options, std::ostream& out);

/// Writes <out>/report.md from whatever plan outputs exist.
void cmd_report(const GlobalOptions& global, std::ostream& out);

/// Parses argv and dispatches. Returns the process exit code; messages for
/// failures go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace textaug::cli
