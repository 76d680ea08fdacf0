#include "textaug/providers/languages.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>

#include "textaug/error.hpp"
#include "textaug/text.hpp"

namespace textaug::providers {

namespace {

constexpr std::array<Language, 24> kLanguages = {{
    {"ar", "Arabic"},   {"bg", "Bulgarian"}, {"cs", "Czech"},     {"da", "Danish"},
    {"de", "German"},   {"el", "Greek"},     {"en", "English"},   {"es", "Spanish"},
    {"fi", "Finnish"},  {"fr", "French"},    {"hi", "Hindi"},     {"hu", "Hungarian"},
    {"it", "Italian"},  {"ja", "Japanese"},  {"ko", "Korean"},    {"nl", "Dutch"},
    {"pl", "Polish"},   {"pt", "Portuguese"}, {"ro", "Romanian"}, {"ru", "Russian"},
    {"sv", "Swedish"},  {"tr", "Turkish"},   {"uk", "Ukrainian"}, {"zh", "Chinese"},
}};

}  // namespace

std::span<const Language> language_registry() { return kLanguages; }

const Language* find_language(std::string_view code) {
  auto it = std::find_if(kLanguages.begin(), kLanguages.end(),
                         [&](const Language& l) { return l.code == code; });
  return it == kLanguages.end() ? nullptr : &*it;
}

const Language* find_language_by_name(std::string_view name) {
  const auto lowered = text::to_lower_ascii(name);
  auto it = std::find_if(kLanguages.begin(), kLanguages.end(),
                         [&](const Language& l) { return text::to_lower_ascii(l.name) == lowered; });
  return it == kLanguages.end() ? nullptr : &*it;
}

const Language& require_language(std::string_view code) {
  const auto* lang = find_language(code);
  if (!lang) throw ConfigError(fmt::format("unsupported language '{}'", code));
  return *lang;
}

std::vector<std::string> language_preset(std::string_view name) {
  if (name == "deepl") return {"ru", "pl", "fi", "ja", "zh", "bg", "es", "hu", "el", "tr"};
  if (name == "gpt") return {"pl", "zh", "ru", "hi", "hu", "fi", "es", "ja", "tr", "ar"};
  if (name == "marianmt") return {"hi", "pl", "hu", "fi", "ru", "zh", "es", "ja", "tr", "ar"};
  throw ConfigError(fmt::format("unknown language preset '{}'", name));
}

}  // namespace textaug::providers
