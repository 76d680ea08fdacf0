#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace textaug::providers {

struct Language {
  std::string_view code;  // ISO-639-1
  std::string_view name;  // English name, used in translation prompts
};

std::span<const Language> language_registry();

/// nullptr when the code is not registered.
const Language* find_language(std::string_view code);
/// Lookup by English name, case-insensitive.
const Language* find_language_by_name(std::string_view name);

/// Throws ConfigError for unregistered codes.
const Language& require_language(std::string_view code);

/// Named pivot-language sets: "deepl", "gpt", "marianmt".
std::vector<std::string> language_preset(std::string_view name);

}  // namespace textaug::providers
