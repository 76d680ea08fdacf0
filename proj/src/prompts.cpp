#include "textaug/prompts.hpp"

#include <fmt/format.h>

namespace textaug::prompts {

std::string generation(std::size_t n, std::string_view emotion, const std::vector<std::string>& examples) {
  auto prompt = fmt::format(
      "Generate {} different sentences in various forms that express a strong emotional sentiment "
      "for the following emotion: {}",
      n, emotion);
  if (!examples.empty()) {
    prompt += fmt::format("\n{}\n", kExamplesHeader);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (i) prompt += '\n';
      prompt += examples[i];
    }
  }
  return prompt;
}

std::string paraphrase_single(std::string_view sentence) {
  return fmt::format("{}\n{}", kParaphraseSingle, sentence);
}

std::string paraphrase_batch(std::size_t n, std::string_view sentence) {
  return fmt::format(
      "Provide {} distinct paraphrases of the following sentence, one per line, no numbering.\n{}", n,
      sentence);
}

}  // namespace textaug::prompts
