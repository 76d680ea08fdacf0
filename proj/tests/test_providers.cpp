#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <thread>

#include "support.hpp"
#include "textaug/error.hpp"
#include "textaug/prompts.hpp"
#include "textaug/providers/languages.hpp"
#include "textaug/providers/mock.hpp"
#include "textaug/quality.hpp"
#include "textaug/text.hpp"

using namespace textaug;
using namespace textaug::providers;
using textaug::testing::matches_golden;

namespace {

ChatRequest chat(std::string prompt, std::size_t n = 1, std::optional<std::uint64_t> seed = std::nullopt) {
  ChatRequest r;
  r.model = "mock-model";
  r.user_prompt = std::move(prompt);
  r.n_choices = n;
  r.seed = seed;
  return r;
}

}  // namespace

TEST(Languages, RegistryAndPresets) {
  EXPECT_EQ(require_language("pl").name, "Polish");
  EXPECT_EQ(find_language_by_name("japanese")->code, "ja");
  EXPECT_EQ(find_language("xx"), nullptr);
  EXPECT_THROW(require_language("xx"), ConfigError);
  const auto deepl = language_preset("deepl");
  EXPECT_EQ(deepl, (std::vector<std::string>{"ru", "pl", "fi", "ja", "zh", "bg", "es", "hu", "el", "tr"}));
  for (const char* preset : {"deepl", "gpt", "marianmt"}) {
    const auto langs = language_preset(preset);
    EXPECT_EQ(langs.size(), 10u);
    for (const auto& l : langs) EXPECT_NE(find_language(l), nullptr) << l;
  }
  EXPECT_THROW(language_preset("nope"), ConfigError);
}

TEST(RequestChecks, ChatPreconditions) {
  EXPECT_THROW(check_request(chat("")), ArgumentError);
  EXPECT_THROW(check_request(chat("x", 0)), ArgumentError);
  auto bad = chat("x");
  bad.temperature = -0.1;
  EXPECT_THROW(check_request(bad), ArgumentError);
  EXPECT_NO_THROW(check_request(chat("x")));
}

TEST(RequestChecks, ChatResponseCountAndBlankChoices) {
  ChatResponse r;
  r.choices = {"a", " "};
  EXPECT_THROW(check_response(r, 2), ProtocolError);
  r.choices = {"a"};
  EXPECT_THROW(check_response(r, 2), ProtocolError);
  EXPECT_NO_THROW(check_response(r, 1));
}

TEST(RequestChecks, TranslationPreconditions) {
  EXPECT_THROW(check_request(TranslationRequest{"hi", "en", "en"}), ArgumentError);
  EXPECT_THROW(check_request(TranslationRequest{"hi", "en", "xx"}), ConfigError);
  EXPECT_THROW(check_request(TranslationRequest{"  ", "en", "pl"}), ArgumentError);
}

TEST(RequestChecks, EmbeddingShapes) {
  std::vector<EmbeddingResult> r(2);
  r[0].sentence_vector = {1, 2, 3};
  r[1].sentence_vector = {1, 2};
  EXPECT_THROW(check_embeddings(r, 2, false), ProtocolError);
  r[1].sentence_vector = {1, 2, NAN};
  EXPECT_THROW(check_embeddings(r, 2, false), ProtocolError);
  r[1].sentence_vector = {1, 2, 3};
  EXPECT_THROW(check_embeddings(r, 3, false), ProtocolError);
  EXPECT_NO_THROW(check_embeddings(r, 2, false));
}

TEST(MockChat, TwoChoicesAreDistinctAndGolden) {
  MockProvider mock(7);
  const auto r = mock.chat_complete(chat("paraphrase: hello world", 2));
  ASSERT_EQ(r.choices.size(), 2u);
  EXPECT_NE(r.choices[0], r.choices[1]);
  EXPECT_EQ(MockProvider(7).chat_complete(chat("paraphrase: hello world", 2)).choices, r.choices);
  EXPECT_TRUE(matches_golden("chat_paraphrase_hello_world_n2_seed7", r.choices));
}

TEST(MockChat, SeedChangesOutput) {
  const auto a = MockProvider(7).chat_complete(chat(prompts::paraphrase_single("The happy dog ran fast."), 1, 1));
  const auto b = MockProvider(7).chat_complete(chat(prompts::paraphrase_single("The happy dog ran fast."), 1, 2));
  EXPECT_NE(a.choices, b.choices);
}

TEST(MockChat, BatchParaphrasesDifferFromSourceAndEachOther) {
  MockProvider mock(7);
  const std::string sentence = "I am so happy that my friend finally got the job, it was a long road.";
  const auto r = mock.chat_complete(chat(prompts::paraphrase_batch(3, sentence)));
  const auto lines = text::split_lines(r.choices.at(0));
  ASSERT_EQ(lines.size(), 3u);
  std::set<std::string> unique(lines.begin(), lines.end());
  EXPECT_EQ(unique.size(), 3u);
  EXPECT_FALSE(unique.count(sentence));
  EXPECT_TRUE(matches_golden("chat_paraphrase_batch3_seed7", lines));
}

TEST(MockChat, GenerationReturnsRequestedLineCount) {
  MockProvider mock(7);
  auto req = chat(prompts::generation(6, "embarrassment", {}));
  req.system_message = std::string(prompts::kGenerationSystemMessage);
  const auto lines = text::split_lines(mock.chat_complete(req).choices.at(0));
  EXPECT_EQ(lines.size(), 6u);
  EXPECT_EQ(std::set<std::string>(lines.begin(), lines.end()).size(), 6u);
  EXPECT_TRUE(matches_golden("chat_generation_embarrassment_n6_seed7", lines));
}

TEST(MockTranslate, RoundTripIsDeterministicAndDrifts) {
  MockProvider mock(7);
  const auto pl = mock.translate({"good morning", "en", "pl"});
  const auto back = mock.translate({pl, "pl", "en"});
  EXPECT_NE(pl, "good morning");
  EXPECT_NE(back, "good morning");
  EXPECT_EQ(MockProvider(7).translate({MockProvider(7).translate({"good morning", "en", "pl"}), "pl", "en"}), back);
  EXPECT_TRUE(matches_golden("translate_good_morning_en_pl_en_seed7", {pl, back}));
}

TEST(MockTranslate, ChatTranslatorRoutesThroughThePromptTemplate) {
  MockProvider mock(7);
  ChatTranslator via_chat(mock, "gpt-test");
  EXPECT_EQ(via_chat.translate({"good morning", "en", "pl"}), mock.translate({"good morning", "en", "pl"}));
}

TEST(MockTranslate, RoundTripJaccardStrictlyBetweenZeroAndOne) {
  const std::vector<std::string> sentences = {
      "The quick brown fox jumps over the lazy dog",
      "I really miss my grandmother and her garden",
      "We finally won the championship after ten years",
      "She was nervous before the big interview today",
      "This movie made me laugh and cry at once",
      "Honestly that was the worst pizza I have eaten"};
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    MockProvider mock(seed);
    for (const auto& s : sentences) {
      for (const auto& lang : language_preset("gpt")) {
        const auto back = mock.translate({mock.translate({s, "en", lang}), lang, "en"});
        const double j = quality::jaccard_dissimilarity(s, back);
        EXPECT_GT(j, 0.0) << s << " via " << lang;
        EXPECT_LT(j, 1.0) << s << " via " << lang;
      }
    }
  }
}

TEST(MockTranslate, RejectsBadPairs) {
  MockProvider mock(1);
  EXPECT_THROW(mock.translate({"x", "en", "en"}), ArgumentError);
  EXPECT_THROW(mock.translate({"x", "en", "qq"}), ConfigError);
}

TEST(MockEmbed, DeterministicOrderInsensitiveAndTokenCounts) {
  MockProvider mock(3);
  const std::vector<std::string> texts = {"aa bb", "bb aa", "aa bb", "a b c"};
  const auto r = mock.embed(texts, true);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].sentence_vector.size(), MockProvider::kDimension);
  EXPECT_EQ(r[0].sentence_vector, r[1].sentence_vector);
  EXPECT_EQ(r[0].sentence_vector, r[2].sentence_vector);
  EXPECT_EQ(r[3].token_vectors.size(), 3u);
  EXPECT_TRUE(mock.embed(texts, false)[3].token_vectors.empty());
  EXPECT_THROW(mock.embed(std::vector<std::string>{}, false), ArgumentError);
}

TEST(MockEmbed, SynonymsAreCloserThanUnrelatedWords) {
  MockProvider mock(3);
  std::string word;
  for (const char* w : {"happy", "big", "fast", "sad", "good"}) {
    if (mock_synonym(w)) {
      word = w;
      break;
    }
  }
  ASSERT_FALSE(word.empty());
  const std::string syn(*mock_synonym(word));
  const std::vector<std::string> texts = {word, syn, "zebra"};
  const auto r = mock.embed(texts, false);
  EXPECT_GT(quality::cosine_similarity(r[0].sentence_vector, r[1].sentence_vector),
            quality::cosine_similarity(r[0].sentence_vector, r[2].sentence_vector));
}

TEST(MockProvider, SynonymTableHasTwoHundredWords) { EXPECT_EQ(mock_synonym_table_size(), 200u); }

TEST(MockProvider, ConcurrentCallsMatchSerialCalls) {
  MockProvider mock(5);
  std::vector<std::string> serial(16), parallel(16);
  for (int i = 0; i < 16; ++i)
    serial[i] = mock.chat_complete(chat(prompts::paraphrase_single("sentence number " + std::to_string(i)))).choices[0];
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&, i] {
      parallel[i] =
          mock.chat_complete(chat(prompts::paraphrase_single("sentence number " + std::to_string(i)))).choices[0];
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(serial, parallel);
}
