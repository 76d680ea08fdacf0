#include "textaug/providers/clients.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "textaug/error.hpp"
#include "textaug/text.hpp"

namespace textaug::providers {

using nlohmann::json;

namespace {

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<double> parse_vector(const json& j, const json& whole) {
  if (!j.is_array()) throw ProtocolError("embedding is not an array", whole.dump());
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw ProtocolError("embedding holds a non-number", whole.dump());
    v.push_back(x.get<double>());
  }
  return v;
}

// Entries may carry an "index" field; honour it when present.
std::vector<json> ordered_data(const json& body, std::size_t expected) {
  if (!body.is_object() || !body.contains("data") || !body["data"].is_array())
    throw ProtocolError("missing 'data' array", body.dump());
  std::vector<json> data(body["data"].begin(), body["data"].end());
  if (data.size() != expected)
    throw ProtocolError(fmt::format("expected {} embeddings, got {}", expected, data.size()), body.dump());
  if (std::all_of(data.begin(), data.end(), [](const json& d) { return d.contains("index"); })) {
    std::stable_sort(data.begin(), data.end(),
                     [](const json& a, const json& b) { return a["index"].get<long>() < b["index"].get<long>(); });
  }
  return data;
}

}  // namespace

ChatCompletionClient::ChatCompletionClient(std::shared_ptr<HttpChannel> channel, std::string path)
    : channel_(std::move(channel)), path_(std::move(path)) {}

std::string ChatCompletionClient::endpoint() const { return channel_->base_url() + path_; }

json ChatCompletionClient::encode(const ChatRequest& request) {
  json messages = json::array();
  if (!request.system_message.empty()) messages.push_back({{"role", "system"}, {"content", request.system_message}});
  messages.push_back({{"role", "user"}, {"content", request.user_prompt}});
  json body = {{"model", request.model},
               {"messages", messages},
               {"temperature", request.temperature},
               {"n", request.n_choices}};
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

ChatResponse ChatCompletionClient::decode(const json& body, std::size_t expected) {
  if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array())
    throw ProtocolError("missing 'choices' array", body.dump());
  ChatResponse response;
  response.model = body.value("model", "");
  for (const auto& choice : body["choices"]) {
    const auto* content = choice.is_object() && choice.contains("message") && choice["message"].is_object()
                              ? &choice["message"]
                              : nullptr;
    if (!content || !content->contains("content") || !(*content)["content"].is_string())
      throw ProtocolError("choice without message.content", body.dump());
    response.choices.push_back((*content)["content"].get<std::string>());
  }
  check_response(response, expected, body.dump());
  return response;
}

ChatResponse ChatCompletionClient::chat_complete(const ChatRequest& request) {
  check_request(request);
  return decode(channel_->post_json(path_, encode(request)), request.n_choices);
}

DeepLClient::DeepLClient(std::shared_ptr<HttpChannel> channel, std::string path)
    : channel_(std::move(channel)), path_(std::move(path)) {}

std::string DeepLClient::endpoint() const { return channel_->base_url() + path_; }

json DeepLClient::encode(const TranslationRequest& request) {
  return {{"text", json::array({request.text})},
          {"source_lang", upper(request.source_lang)},
          {"target_lang", request.target_lang == "en" ? std::string("EN-US") : upper(request.target_lang)}};
}

std::string DeepLClient::decode(const json& body) {
  if (!body.is_object() || !body.contains("translations") || !body["translations"].is_array() ||
      body["translations"].empty())
    throw ProtocolError("missing 'translations' array", body.dump());
  const auto& first = body["translations"][0];
  if (!first.is_object() || !first.contains("text") || !first["text"].is_string())
    throw ProtocolError("translation without text", body.dump());
  auto out = first["text"].get<std::string>();
  if (text::trim(out).empty()) throw ProtocolError("empty translation", body.dump());
  return out;
}

std::string DeepLClient::translate(const TranslationRequest& request) {
  check_request(request);
  return decode(channel_->post_json(path_, encode(request)));
}

EmbeddingClient::EmbeddingClient(std::shared_ptr<HttpChannel> channel, std::string model,
                                 std::string sentence_path, std::string token_path, std::string health_path)
    : channel_(std::move(channel)),
      model_(std::move(model)),
      sentence_path_(std::move(sentence_path)),
      token_path_(std::move(token_path)),
      health_path_(std::move(health_path)) {}

std::string EmbeddingClient::endpoint() const { return channel_->base_url() + sentence_path_; }

std::vector<EmbeddingResult> EmbeddingClient::embed(std::span<const std::string> texts, bool with_tokens) {
  if (texts.empty()) throw ArgumentError("embed: no input texts");
  const json input(std::vector<std::string>(texts.begin(), texts.end()));

  const json sentence_body = channel_->post_json(sentence_path_, {{"model", model_}, {"input", input}});
  std::vector<EmbeddingResult> results(texts.size());
  auto data = ordered_data(sentence_body, texts.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].is_object() || !data[i].contains("embedding"))
      throw ProtocolError("entry without 'embedding'", sentence_body.dump());
    results[i].sentence_vector = parse_vector(data[i]["embedding"], sentence_body);
  }

  std::string raw = sentence_body.dump();
  if (with_tokens) {
    const json token_body = channel_->post_json(token_path_, {{"input", input}});
    auto tdata = ordered_data(token_body, texts.size());
    for (std::size_t i = 0; i < tdata.size(); ++i) {
      const auto& entry = tdata[i];
      if (!entry.is_object() || !entry.contains("tokens") || !entry.contains("vectors") ||
          !entry["tokens"].is_array() || !entry["vectors"].is_array() ||
          entry["tokens"].size() != entry["vectors"].size())
        throw ProtocolError("token entry needs equally long 'tokens' and 'vectors'", token_body.dump());
      for (std::size_t t = 0; t < entry["tokens"].size(); ++t) {
        if (!entry["tokens"][t].is_string()) throw ProtocolError("token is not a string", token_body.dump());
        results[i].token_vectors.push_back(
            {entry["tokens"][t].get<std::string>(), parse_vector(entry["vectors"][t], token_body)});
      }
    }
    raw += token_body.dump();
  }
  check_embeddings(results, texts.size(), with_tokens, raw);
  if (with_tokens) {
    // Sentence and token vectors must live in one space.
    const auto dim = results.front().sentence_vector.size();
    for (const auto& r : results) {
      for (const auto& t : r.token_vectors) {
        if (t.vector.size() != dim) throw ProtocolError("token and sentence dimensions differ", raw);
      }
    }
  }
  return results;
}

EmbeddingHealth EmbeddingClient::healthcheck() {
  const json body = channel_->get_json(health_path_);
  if (!body.is_object() || !body.contains("dimension") || !body["dimension"].is_number_unsigned())
    throw ProtocolError("healthcheck without 'dimension'", body.dump());
  return {body.value("model", ""), body["dimension"].get<std::size_t>(), body.value("pooling", "")};
}

}  // namespace textaug::providers
