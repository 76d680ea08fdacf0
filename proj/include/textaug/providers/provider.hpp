#pragma once

#include <span>
#include <string>
#include <vector>

#include "textaug/providers/types.hpp"

namespace textaug::providers {

/// Text generation backend (chat-completion style).
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse chat_complete(const ChatRequest& request) = 0;
  /// Human-readable endpoint for manifests ("mock" for the offline mock).
  virtual std::string endpoint() const = 0;
};

class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::string translate(const TranslationRequest& request) = 0;
  virtual std::string endpoint() const = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingResult> embed(std::span<const std::string> texts, bool with_tokens) = 0;
  virtual std::string endpoint() const = 0;
};

/// Prompt used when a chat model does the translating.
inline constexpr const char* kTranslationPromptTemplate =
    "Translate the following text from {src} to {dst}. Output only the translation.";

/// Builds the full user prompt: the template line, a newline, then the text.
std::string translation_prompt(const TranslationRequest& request);

/// Translator that routes requests through any ChatProvider at temperature 0.
class ChatTranslator final : public Translator {
 public:
  ChatTranslator(ChatProvider& chat, std::string model, double temperature = 0.0);
  std::string translate(const TranslationRequest& request) override;
  std::string endpoint() const override { return chat_.endpoint(); }

 private:
  ChatProvider& chat_;
  std::string model_;
  double temperature_;
};

}  // namespace textaug::providers
