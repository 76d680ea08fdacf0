#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace textaug::prompts {

/// System message for zero/few-shot generation, verbatim.
inline constexpr std::string_view kGenerationSystemMessage =
    "You are a helpful assistant. Output sentences separated by newline in reply to <prompt>. "
    "Sentences should vary in type, slang, length, structure, tone and style, sentences such as "
    "comments, responses, opinions, and facts. It’s not necessary to often use the emotion’s "
    "name in every sentence. Do not number output or use bullet point for the output.";

inline constexpr std::string_view kParaphraseSingle =
    "Paraphrase the following sentence. Output only the paraphrase.";

inline constexpr std::string_view kExamplesHeader = "Examples:";

/// "Generate {n} different sentences ... for the following emotion: {emotion}",
/// followed by "\nExamples:\n" and one example per line when examples exist.
std::string generation(std::size_t n, std::string_view emotion, const std::vector<std::string>& examples);

/// Single-paraphrase prompt: instruction line, newline, sentence.
std::string paraphrase_single(std::string_view sentence);

/// Batch prompt asking for n newline-separated paraphrases.
std::string paraphrase_batch(std::size_t n, std::string_view sentence);

}  // namespace textaug::prompts
