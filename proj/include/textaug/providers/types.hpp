#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace textaug::providers {

struct ChatRequest {
  std::string model;
  std::string system_message;
  std::string user_prompt;
  double temperature = 1.0;
  std::size_t n_choices = 1;
  /// Sampling seed forwarded to backends that accept one. The mock derives
  /// its output from it, which lets repeated identical prompts diverge.
  std::optional<std::uint64_t> seed;
};

struct ChatResponse {
  std::vector<std::string> choices;
  std::string model;
};

struct TranslationRequest {
  std::string text;
  std::string source_lang;  // ISO-639-1
  std::string target_lang;
};

struct TokenVector {
  std::string token;
  std::vector<double> vector;
};

struct EmbeddingResult {
  std::vector<double> sentence_vector;
  std::vector<TokenVector> token_vectors;  // filled only when tokens were requested
};

/// Throws ArgumentError unless n_choices >= 1, the prompt is non-empty and
/// the temperature is non-negative.
void check_request(const ChatRequest& request);

/// Throws ProtocolError unless there are exactly `expected` non-blank choices.
void check_response(const ChatResponse& response, std::size_t expected, const std::string& raw = {});

/// Throws ArgumentError when source == target, ConfigError when a code is
/// not in the language registry.
void check_request(const TranslationRequest& request);

/// Throws ProtocolError when the count differs from `expected`, a vector has
/// fewer than 2 dimensions, dimensions differ, or a value is not finite.
void check_embeddings(std::span<const EmbeddingResult> results, std::size_t expected, bool with_tokens,
                      const std::string& raw = {});

}  // namespace textaug::providers
