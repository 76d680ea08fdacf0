#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textaug/providers/provider.hpp"

namespace textaug::quality {

struct SentencePair {
  std::string reference;
  std::string generated;
  std::size_t pair_index = 0;
};

/// Word tokenizer used by every lexical metric (see text::tokenize).
std::vector<std::string> tokenize(std::string_view text);

struct TokenDistribution {
  std::vector<std::string> tokens;
  std::map<std::string, double> probabilities;  // count(w) / |tokens|
};

TokenDistribution token_distribution(std::string_view text);

/// Keeps pairs at 0-based positions divisible by four, in order.
std::vector<SentencePair> sample_pairs(std::span<const SentencePair> pairs);

/// 1 - |A n B| / |A u B| over token sets; 0 when both are empty.
double jaccard_dissimilarity(std::string_view a, std::string_view b);

/// Shannon entropy in bits of the sentence's token distribution.
double entropy(std::string_view text);

struct EntropyRatio {
  double value = 1.0;
  /// The reference had zero entropy and the generated text did not, so the
  /// ratio was taken against kEntropyEpsilon.
  bool guarded = false;
};

inline constexpr double kEntropyEpsilon = 1e-9;

/// H(generated) / H(reference). 0/0 counts as 1.
EntropyRatio entropy_ratio(std::string_view reference, std::string_view generated);
EntropyRatio entropy_ratio(const SentencePair& pair);

/// Distinct tokens over total tokens of the concatenated texts.
/// Throws UndefinedMetricError when there are no tokens.
double ttr(std::span<const std::string> texts);

double ttr_ratio(std::span<const std::string> generated_set, std::span<const std::string> reference_set);

inline constexpr double kCosineEpsilon = 1e-8;

/// (a . b) / (max(|a|, eps) * max(|b|, eps)), clamped to [-1, 1].
/// Throws ArgumentError on a dimension mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Raw BERTScore-F1 by greedy matching (no idf weighting, no rescaling).
/// Recall averages, over reference tokens, the best cosine against any
/// generated token; precision is the mirror image. Negative F1 values
/// (possible only with anti-correlated embeddings) are reported as 0.
double bertscore_f1(std::span<const providers::TokenVector> reference,
                    std::span<const providers::TokenVector> generated);

struct PairScore {
  std::size_t word_count_ref = 0;
  std::size_t word_count_gen = 0;
  double jaccard_dissimilarity = 0.0;
  double entropy_ratio = 1.0;
  bool entropy_guarded = false;
  std::optional<double> cosine_similarity;
  std::optional<double> bertscore_f1;
};

/// One row of the lexical-diversity / semantic-fidelity tables.
struct SetQualityReport {
  std::string method_name;
  double avg_word_ref = 0.0;
  double avg_word_gen = 0.0;
  double word_ratio = 0.0;
  double avg_jaccard = 0.0;
  double avg_entropy_ratio = 0.0;  // mean of per-pair ratios
  double ttr_ratio = 0.0;          // set level, not a pair average
  std::optional<double> avg_cosine;
  std::optional<double> avg_bertscore_f1;
  std::size_t n_pairs_scored = 0;
  std::size_t n_entropy_guarded = 0;
  std::size_t n_synthetic_excluded = 0;
  std::vector<std::string> warnings;
  std::vector<PairScore> pairs;
};

enum class Execution { serial, parallel };

/// Samples every fourth pair, scores it, and averages. Embedding metrics
/// use one batched embed call per side; when the embedder is missing or
/// fails, they are left empty and a warning is recorded.
SetQualityReport evaluate_set(const std::string& method_name, std::span<const SentencePair> pairs,
                              providers::Embedder* embedder, Execution execution = Execution::parallel);

/// Header row: the lexical-diversity columns followed by the fidelity columns.
std::string csv_header();
/// Word counts are rounded to integers for display; ratios use 4 decimals.
std::string csv_row(const SetQualityReport& report);
nlohmann::json to_json(const SetQualityReport& report);

}  // namespace textaug::quality
