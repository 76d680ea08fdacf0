#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "textaug/providers/provider.hpp"

namespace textaug::providers {

/// Offline provider implementing all three contracts as pure functions of
/// (seed, request).
///
/// Chat requests are interpreted by prompt shape: paraphrase prompts get
/// synonym substitution and clause reordering driven by a built-in synonym
/// table, generation prompts get templated sentences for the requested
/// emotion, translation prompts are routed to the translation mock.
/// Translation away from English is a per-language letter cipher; the way
/// back inverts it except for a seeded ~10% of word types, which come back
/// as a synonym or an inflectional variant. Embeddings are hashed
/// bag-of-words vectors where synonyms share most of their direction.
class MockProvider final : public ChatProvider, public Translator, public Embedder {
 public:
  static constexpr std::size_t kDimension = 64;
  static constexpr double kDropRate = 0.10;

  explicit MockProvider(std::uint64_t seed) : seed_(seed) {}

  ChatResponse chat_complete(const ChatRequest& request) override;
  std::string translate(const TranslationRequest& request) override;
  std::vector<EmbeddingResult> embed(std::span<const std::string> texts, bool with_tokens) override;
  std::string endpoint() const override { return "mock"; }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Synonym from the mock's table, if the lowercase word has one.
std::optional<std::string_view> mock_synonym(std::string_view word);

/// Number of distinct words in the mock's synonym table.
std::size_t mock_synonym_table_size();

}  // namespace textaug::providers
