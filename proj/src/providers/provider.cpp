#include "textaug/providers/provider.hpp"

#include <fmt/format.h>

#include <cmath>

#include "textaug/error.hpp"
#include "textaug/providers/languages.hpp"
#include "textaug/text.hpp"

namespace textaug::providers {

void check_request(const ChatRequest& request) {
  if (request.n_choices < 1) throw ArgumentError("chat request: n_choices must be >= 1");
  if (text::trim(request.user_prompt).empty()) throw ArgumentError("chat request: empty prompt");
  if (!(request.temperature >= 0.0)) throw ArgumentError("chat request: temperature must be >= 0");
}

void check_response(const ChatResponse& response, std::size_t expected, const std::string& raw) {
  if (response.choices.size() != expected)
    throw ProtocolError(
        fmt::format("expected {} choices, got {}", expected, response.choices.size()), raw);
  for (const auto& c : response.choices) {
    if (text::trim(c).empty()) throw ProtocolError("blank completion choice", raw);
  }
}

void check_request(const TranslationRequest& request) {
  require_language(request.source_lang);
  require_language(request.target_lang);
  if (request.source_lang == request.target_lang)
    throw ArgumentError(fmt::format("translation source and target are both '{}'", request.source_lang));
  if (text::trim(request.text).empty()) throw ArgumentError("translation request: empty text");
}

void check_embeddings(std::span<const EmbeddingResult> results, std::size_t expected, bool with_tokens,
                      const std::string& raw) {
  if (results.size() != expected)
    throw ProtocolError(fmt::format("expected {} embeddings, got {}", expected, results.size()), raw);
  std::size_t dim = 0;
  auto check_vector = [&](const std::vector<double>& v) {
    if (dim == 0) dim = v.size();
    if (v.size() != dim)
      throw ProtocolError(fmt::format("embedding dimension mismatch ({} vs {})", v.size(), dim), raw);
    if (v.size() < 2) throw ProtocolError("embedding dimension below 2", raw);
    for (double x : v) {
      if (!std::isfinite(x)) throw ProtocolError("non-finite embedding value", raw);
    }
  };
  for (const auto& r : results) {
    check_vector(r.sentence_vector);
    if (with_tokens) {
      for (const auto& t : r.token_vectors) check_vector(t.vector);
    }
  }
}

std::string translation_prompt(const TranslationRequest& request) {
  const auto& src = require_language(request.source_lang);
  const auto& dst = require_language(request.target_lang);
  return fmt::format("Translate the following text from {} to {}. Output only the translation.\n{}",
                     src.name, dst.name, request.text);
}

ChatTranslator::ChatTranslator(ChatProvider& chat, std::string model, double temperature)
    : chat_(chat), model_(std::move(model)), temperature_(temperature) {}

std::string ChatTranslator::translate(const TranslationRequest& request) {
  check_request(request);
  ChatRequest chat;
  chat.model = model_;
  chat.user_prompt = translation_prompt(request);
  chat.temperature = temperature_;
  auto response = chat_.chat_complete(chat);
  auto out = std::string(text::trim(response.choices.at(0)));
  if (out.empty()) throw ProtocolError("empty translation", response.choices.at(0));
  return out;
}

}  // namespace textaug::providers
