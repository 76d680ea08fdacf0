#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textaug/corpus.hpp"
#include "textaug/kernels.hpp"

namespace textaug::classify {

using kernels::CsrMatrix;
using kernels::LabelMatrix;

enum class Backend { serial, parallel };

struct TfidfSettings {
  std::size_t min_df = 1;
  bool lowercase = true;
};

/// Smoothed TF-IDF: idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct TfidfModel {
  std::map<std::string, std::uint32_t, std::less<>> vocabulary;  // term -> column, dense and sorted
  std::vector<double> idf;
  TfidfSettings settings;
  std::size_t n_documents = 0;

  std::size_t dimension() const noexcept { return idf.size(); }
  /// L2-normalized tf*idf rows. Unseen terms are ignored; a text with no
  /// known term gives an empty row.
  CsrMatrix transform(std::span<const std::string> texts) const;
};

/// Throws ArgumentError with no non-empty document and ConfigError when no
/// term reaches min_df.
TfidfModel fit_tfidf(std::span<const std::string> documents, const TfidfSettings& settings = {});

struct Hyperparams {
  double learning_rate = 0.5;
  double l2_lambda = 1e-4;
  std::size_t epochs = 200;
  /// Recorded for provenance; training itself is deterministic.
  std::uint64_t seed = 0;
};

/// One-vs-rest logistic regression.
struct LogRegModel {
  std::size_t labels = 0;
  std::size_t features = 0;
  std::vector<double> weights;  // labels x features, row-major
  std::vector<double> bias;
  Hyperparams hyperparams;
  /// Total loss (sum over labels) at the start of each epoch.
  std::vector<double> loss_history;
};

/// Full-batch gradient descent from zero weights. Throws ArgumentError on
/// shape mismatch or zero epochs, DivergenceError on a non-finite loss.
LogRegModel train(const CsrMatrix& features, const LabelMatrix& targets, const Hyperparams& hyperparams,
                  Backend backend = Backend::parallel);

/// Probabilities, N x L row-major.
std::vector<double> predict_proba(const LogRegModel& model, const CsrMatrix& features,
                                  Backend backend = Backend::parallel);

/// Positive when the probability is strictly above 0.5.
LabelMatrix predict(const LogRegModel& model, const CsrMatrix& features, Backend backend = Backend::parallel);

/// Binary gold matrix of `records` over `labels`.
LabelMatrix label_matrix(std::span<const corpus::Record* const> records, std::span<const std::string> labels);

struct ClassificationReport {
  std::vector<std::string> labels;
  std::vector<std::string> augmented_labels;  // sorted
  std::map<std::string, double> per_label_f1;
  double f1_macro_all = 0.0;
  double f1_macro_augmented = 0.0;
  double f1_macro_other = 0.0;
  double pct_change_all = 0.0;
  double pct_change_augmented = 0.0;
  double pct_change_other = 0.0;
  /// Conventions that kicked in: "empty_group:aug", "zero_baseline:all", ...
  std::vector<std::string> flags;
};

/// Per-label F1 = 2TP / (2TP + FP + FN), 0 when the denominator is 0. Group
/// macros are plain means; an empty group scores 0 and is flagged. With a
/// baseline, %change = 100 (F1 - F1_base) / F1_base, or 0 (flagged) when
/// F1_base is 0.
ClassificationReport f1_report(const LabelMatrix& predictions, const LabelMatrix& gold,
                               std::span<const std::string> labels, std::span<const std::string> augmented_labels,
                               const ClassificationReport* baseline = nullptr);

/// 100 (current - baseline) / baseline; nullopt when baseline is 0.
std::optional<double> pct_change(double current, double baseline);

struct EvalResult {
  ClassificationReport baseline;
  ClassificationReport augmented;
};

struct EvalOptions {
  Hyperparams hyperparams;
  TfidfSettings tfidf;
  Backend backend = Backend::parallel;
  /// Predictions made elsewhere, aligned to the test split of `original`.
  /// When set they replace the proxy model's output for that side.
  std::optional<LabelMatrix> external_baseline;
  std::optional<LabelMatrix> external_augmented;
};

/// Trains on each dataset's train split with identical settings and scores
/// both on the shared test split. Throws ConfigError when there is no test
/// split and ComparisonError when the two test splits or vocabularies differ.
EvalResult run_eval(const corpus::Dataset& original, const corpus::Dataset& augmented,
                    std::span<const std::string> augmented_labels, const EvalOptions& options = {});

/// Reads JSONL lines {"id": ..., "labels": [...]} and aligns them with the
/// test split of `gold`. Throws ImportError naming missing, duplicate and
/// unknown ids.
LabelMatrix import_external_predictions(const std::filesystem::path& path, const corpus::Dataset& gold);

std::string csv_header();
std::string csv_row(std::string_view data_aug, std::string_view model, const ClassificationReport& report);
nlohmann::json to_json(const ClassificationReport& report);

}  // namespace textaug::classify
