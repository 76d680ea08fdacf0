#pragma once

#include <memory>
#include <string>

#include "textaug/providers/http.hpp"
#include "textaug/providers/provider.hpp"

namespace textaug::providers {

/// Chat-completion client for the common `{model, messages, temperature, n}`
/// schema, answering `{choices:[{message:{content}}]}`.
class ChatCompletionClient final : public ChatProvider {
 public:
  ChatCompletionClient(std::shared_ptr<HttpChannel> channel, std::string path = "/v1/chat/completions");
  ChatResponse chat_complete(const ChatRequest& request) override;
  std::string endpoint() const override;

  static nlohmann::json encode(const ChatRequest& request);
  static ChatResponse decode(const nlohmann::json& body, std::size_t expected);

 private:
  std::shared_ptr<HttpChannel> channel_;
  std::string path_;
};

/// DeepL-style translation client: `{text:[...], source_lang, target_lang}`
/// answered by `{translations:[{text}]}`.
class DeepLClient final : public Translator {
 public:
  DeepLClient(std::shared_ptr<HttpChannel> channel, std::string path = "/v2/translate");
  std::string translate(const TranslationRequest& request) override;
  std::string endpoint() const override;

  static nlohmann::json encode(const TranslationRequest& request);
  static std::string decode(const nlohmann::json& body);

 private:
  std::shared_ptr<HttpChannel> channel_;
  std::string path_;
};

struct EmbeddingHealth {
  std::string model;
  std::size_t dimension = 0;
  std::string pooling;
};

/// Embedding client. Sentence vectors come from `POST /v1/embeddings`
/// (`{model, input}` -> `{data:[{embedding}]}`); token vectors from
/// `POST /token-embeddings` (`{input}` -> `{data:[{tokens, vectors}]}`).
class EmbeddingClient final : public Embedder {
 public:
  EmbeddingClient(std::shared_ptr<HttpChannel> channel, std::string model,
                  std::string sentence_path = "/v1/embeddings",
                  std::string token_path = "/token-embeddings",
                  std::string health_path = "/healthcheck");
  std::vector<EmbeddingResult> embed(std::span<const std::string> texts, bool with_tokens) override;
  std::string endpoint() const override;

  /// `GET /healthcheck` -> `{model, dimension[, pooling]}`.
  EmbeddingHealth healthcheck();

 private:
  std::shared_ptr<HttpChannel> channel_;
  std::string model_;
  std::string sentence_path_;
  std::string token_path_;
  std::string health_path_;
};

}  // namespace textaug::providers
