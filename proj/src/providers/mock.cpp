#include "textaug/providers/mock.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <unordered_map>

#include "textaug/error.hpp"
#include "textaug/prompts.hpp"
#include "textaug/providers/languages.hpp"
#include "textaug/rng.hpp"
#include "textaug/text.hpp"

namespace textaug::providers {

namespace {

using Pair = std::pair<std::string_view, std::string_view>;

// 100 synonym pairs, 200 distinct words.
constexpr std::array<Pair, 100> kSynonymPairs = {{
    {"happy", "glad"},          {"sad", "unhappy"},         {"angry", "furious"},
    {"scared", "afraid"},       {"big", "large"},           {"small", "tiny"},
    {"fast", "quick"},          {"begin", "start"},         {"finish", "complete"},
    {"smart", "clever"},        {"funny", "hilarious"},     {"good", "fine"},
    {"bad", "awful"},           {"terrible", "horrible"},   {"love", "adore"},
    {"hate", "despise"},        {"like", "enjoy"},          {"want", "wish"},
    {"need", "require"},        {"help", "assist"},         {"think", "believe"},
    {"understand", "comprehend"}, {"proud", "pleased"},     {"grief", "sorrow"},
    {"relief", "comfort"},      {"nervous", "anxious"},     {"embarrassed", "ashamed"},
    {"embarrassing", "humiliating"}, {"nervousness", "anxiety"}, {"pride", "satisfaction"},
    {"mourning", "grieving"},   {"lost", "gone"},           {"miss", "yearn"},
    {"friend", "buddy"},        {"people", "folks"},        {"child", "kid"},
    {"mom", "mother"},          {"dad", "father"},          {"house", "home"},
    {"job", "work"},            {"money", "cash"},          {"car", "vehicle"},
    {"movie", "film"},          {"game", "match"},          {"story", "tale"},
    {"problem", "issue"},       {"idea", "notion"},         {"answer", "reply"},
    {"question", "query"},      {"mistake", "error"},       {"chance", "opportunity"},
    {"gift", "present"},        {"road", "street"},         {"really", "truly"},
    {"very", "extremely"},      {"totally", "completely"},  {"maybe", "perhaps"},
    {"often", "frequently"},    {"always", "constantly"},   {"quickly", "rapidly"},
    {"actually", "genuinely"},  {"almost", "nearly"},       {"finally", "eventually"},
    {"beautiful", "gorgeous"},  {"ugly", "hideous"},        {"strange", "weird"},
    {"easy", "simple"},         {"hard", "difficult"},      {"rich", "wealthy"},
    {"poor", "broke"},          {"tired", "exhausted"},     {"calm", "relaxed"},
    {"busy", "occupied"},       {"wrong", "incorrect"},     {"right", "correct"},
    {"new", "fresh"},           {"old", "aged"},            {"amazing", "incredible"},
    {"awesome", "fantastic"},   {"nice", "pleasant"},       {"stupid", "dumb"},
    {"crazy", "insane"},        {"cute", "adorable"},       {"look", "glance"},
    {"see", "notice"},          {"talk", "speak"},          {"shout", "yell"},
    {"laugh", "giggle"},        {"cry", "weep"},            {"walk", "stroll"},
    {"run", "sprint"},          {"buy", "purchase"},        {"get", "obtain"},
    {"give", "offer"},          {"keep", "retain"},         {"try", "attempt"},
    {"show", "display"},        {"fix", "repair"},          {"choose", "select"},
    {"hope", "expect"},
}};

const std::unordered_map<std::string_view, std::string_view>& synonym_map() {
  static const auto table = [] {
    std::unordered_map<std::string_view, std::string_view> m;
    for (const auto& [a, b] : kSynonymPairs) {
      m.emplace(a, b);
      m.emplace(b, a);
    }
    return m;
  }();
  return table;
}

// Representative of a synonym group: the lexicographically smaller word.
std::string canonical(std::string_view word) {
  if (auto s = mock_synonym(word)) return std::string(std::min(word, *s));
  return std::string(word);
}

constexpr std::array<std::string_view, 12> kMarkers = {
    "Honestly", "Really", "Truly", "To be fair", "Frankly", "Basically",
    "In short", "Seriously", "Well", "Plainly put", "Simply put", "All in all",
};
constexpr std::array<std::string_view, 8> kTrailers = {
    "", " for sure", " if you ask me", " no doubt", " to be honest", " as always", " in a way", " I guess",
};

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

struct WordParts {
  std::string lead, core, trail;
};

WordParts split_word(const std::string& token) {
  std::size_t b = 0, e = token.size();
  while (b < e && is_ascii_punct(token[b])) ++b;
  while (e > b && is_ascii_punct(token[e - 1])) --e;
  return {token.substr(0, b), token.substr(b, e - b), token.substr(e)};
}

std::string match_case(std::string_view replacement, std::string_view original) {
  std::string out(replacement);
  if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0])) && !out.empty())
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// Lowercases the first letter unless the sentence starts with the pronoun "I".
std::string decapitalize(std::string s) {
  if (s.empty()) return s;
  const bool pronoun_i = s[0] == 'I' && (s.size() == 1 || !std::isalpha(static_cast<unsigned char>(s[1])));
  if (!pronoun_i) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

bool chance(std::uint64_t h, double p) {
  return static_cast<double>(h >> 11) * 0x1.0p-53 < p;
}

std::string substitute_synonyms(const std::string& sentence, std::uint64_t key) {
  auto tokens = text::split_whitespace(sentence);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto parts = split_word(tokens[i]);
    if (auto syn = mock_synonym(text::to_lower_ascii(parts.core)); syn && chance(hash_combine(key, i), 0.5)) {
      tokens[i] = parts.lead + match_case(*syn, parts.core) + parts.trail;
    }
  }
  return text::join(tokens, " ");
}

// "A, B." -> "B, a."
std::string reorder_clauses(const std::string& sentence) {
  const auto comma = sentence.find(", ");
  if (comma == std::string::npos || comma == 0) return sentence;
  std::string first = sentence.substr(0, comma);
  std::string second = sentence.substr(comma + 2);
  std::string end;
  while (!second.empty() && (second.back() == '.' || second.back() == '!' || second.back() == '?')) {
    end.insert(end.begin(), second.back());
    second.pop_back();
  }
  if (second.empty()) return sentence;
  return capitalize(second) + ", " + decapitalize(first) + end;
}

std::string paraphrase_sentence(const std::string& sentence, std::uint64_t key, std::size_t salt,
                                std::set<std::string>& taken) {
  auto out = substitute_synonyms(sentence, key);
  if (hash_combine(key, "reorder") % 3 == 0) out = reorder_clauses(out);
  for (std::size_t attempt = 0; out == sentence || taken.count(out); ++attempt) {
    const auto marker = kMarkers[(salt + attempt) % kMarkers.size()];
    const auto trailer = kTrailers[((salt + attempt) / kMarkers.size()) % kTrailers.size()];
    auto body = decapitalize(substitute_synonyms(sentence, hash_combine(key, attempt)));
    std::string end;
    while (!body.empty() && (body.back() == '.' || body.back() == '!' || body.back() == '?')) {
      end.insert(end.begin(), body.back());
      body.pop_back();
    }
    out = fmt::format("{}, {}{}{}", marker, body, trailer, end.empty() ? "." : end);
    if (attempt >= kMarkers.size() * kTrailers.size()) out += fmt::format(" ({})", attempt);
  }
  taken.insert(out);
  return out;
}

constexpr std::array<std::string_view, 12> kGenerationTemplates = {
    "I am {i} overwhelmed by {e} right now.",
    "There is {i} nothing like the {e} I felt today.",
    "Honestly, {e} is all I can think about {i} lately.",
    "My friends keep asking why I look so full of {e}, and {i} I cannot explain it.",
    "You know that feeling of {e} that {i} hits you out of nowhere?",
    "The {e} from last night is {i} still with me.",
    "Can't shake this {i} heavy {e}, it just stays.",
    "Some days {e} feels {i} stronger than anything else.",
    "When I told my family, the {e} was {i} impossible to hide.",
    "Reading that comment filled me with {i} deep {e}.",
    "This whole situation is {i} soaked in {e}.",
    "Nobody warned me that {e} could feel {i} this intense.",
};
constexpr std::array<std::string_view, 8> kIntensities = {
    "completely", "honestly", "really", "so", "just", "seriously", "absolutely", "kind of",
};

std::size_t parse_leading_count(std::string_view s) {
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{}) return 0;
  (void)ptr;
  return n;
}

struct ParsedPrompt {
  std::string first_line;
  std::vector<std::string> rest;
};

ParsedPrompt split_prompt(const std::string& prompt) {
  auto lines = text::split_lines(prompt);
  ParsedPrompt p;
  if (!lines.empty()) {
    p.first_line = lines.front();
    p.rest.assign(lines.begin() + 1, lines.end());
  }
  return p;
}

std::string body_text(const std::vector<std::string>& lines) {
  std::vector<std::string> kept;
  for (const auto& l : lines) {
    if (!text::trim(l).empty()) kept.emplace_back(text::trim(l));
  }
  return text::join(kept, " ");
}

std::array<char, 26> cipher_for(std::uint64_t seed, std::string_view lang) {
  std::vector<char> letters(26);
  for (int i = 0; i < 26; ++i) letters[static_cast<std::size_t>(i)] = static_cast<char>('a' + i);
  Rng rng(hash_combine(seed, fmt::format("cipher:{}", lang)));
  rng.shuffle(letters);
  std::array<char, 26> out{};
  std::copy(letters.begin(), letters.end(), out.begin());
  return out;
}

std::string apply_cipher(std::string_view input, const std::array<char, 26>& table) {
  std::string out(input);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') {
      c = table[static_cast<std::size_t>(c - 'a')];
    } else if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(std::toupper(table[static_cast<std::size_t>(c - 'A')]));
    }
  }
  return out;
}

std::array<char, 26> invert(const std::array<char, 26>& table) {
  std::array<char, 26> inv{};
  for (std::size_t i = 0; i < 26; ++i) inv[static_cast<std::size_t>(table[i] - 'a')] = static_cast<char>('a' + i);
  return inv;
}

std::string inflection_variant(const std::string& word) {
  if (word.size() > 3 && word.back() == 's') return word.substr(0, word.size() - 1);
  return word + "s";
}

// Replaces a seeded ~10% of word types with a synonym or inflectional
// variant. At least one type changes and one survives when the sentence has
// two or more distinct types.
std::string lossy_restore(const std::string& sentence, std::uint64_t key) {
  auto tokens = text::split_whitespace(sentence);
  std::vector<WordParts> parts;
  std::set<std::string> types;
  for (const auto& t : tokens) {
    parts.push_back(split_word(t));
    auto core = text::to_lower_ascii(parts.back().core);
    if (!core.empty()) types.insert(core);
  }
  auto replacement_for = [&](const std::string& core) -> std::optional<std::string> {
    if (auto syn = mock_synonym(core); syn && !types.count(std::string(*syn))) return std::string(*syn);
    auto variant = inflection_variant(core);
    if (!types.count(variant)) return variant;
    return std::nullopt;
  };

  // Types ordered by their hash so the forced choices are seeded too.
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  for (const auto& t : types) ranked.emplace_back(hash_combine(key, t), t);
  std::sort(ranked.begin(), ranked.end());

  std::map<std::string, std::string> replaced;
  for (const auto& [h, t] : ranked) {
    if (chance(h, MockProvider::kDropRate)) {
      if (auto r = replacement_for(t)) replaced.emplace(t, *r);
    }
  }
  if (types.size() >= 2) {
    if (replaced.empty()) {
      for (const auto& [h, t] : ranked) {
        if (auto r = replacement_for(t)) {
          replaced.emplace(t, *r);
          break;
        }
      }
    }
    if (replaced.size() == types.size()) replaced.erase(ranked.back().second);
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = replaced.find(text::to_lower_ascii(parts[i].core));
    if (it != replaced.end()) tokens[i] = parts[i].lead + match_case(it->second, parts[i].core) + parts[i].trail;
  }
  return text::join(tokens, " ");
}

std::vector<double> hashed_vector(std::uint64_t seed, std::string_view s) {
  Rng rng(hash_combine(seed, fmt::format("emb:{}", s)));
  std::vector<double> v(MockProvider::kDimension);
  for (auto& x : v) x = rng.unit() * 2.0 - 1.0;
  return v;
}

std::vector<double> token_vector(std::uint64_t seed, const std::string& token) {
  auto shared = hashed_vector(seed, canonical(token));
  auto own = hashed_vector(seed, token);
  for (std::size_t i = 0; i < shared.size(); ++i) shared[i] = 0.8 * shared[i] + 0.2 * own[i];
  return shared;
}

}  // namespace

std::optional<std::string_view> mock_synonym(std::string_view word) {
  const auto& m = synonym_map();
  auto it = m.find(word);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

std::size_t mock_synonym_table_size() { return synonym_map().size(); }

ChatResponse MockProvider::chat_complete(const ChatRequest& request) {
  check_request(request);
  const std::uint64_t base = hash_combine(hash_combine(seed_, request.seed.value_or(0)), request.user_prompt);
  auto prompt = split_prompt(request.user_prompt);
  const std::string& head = prompt.first_line;

  ChatResponse response;
  response.model = request.model.empty() ? "mock" : request.model;

  for (std::size_t c = 0; c < request.n_choices; ++c) {
    const std::uint64_t key = hash_combine(base, c);
    std::set<std::string> taken;
    std::string answer;
    if (head.rfind("Translate the following text from ", 0) == 0) {
      // "Translate the following text from {src} to {dst}. Output only ..."
      auto rest = head.substr(std::string_view("Translate the following text from ").size());
      auto to = rest.find(" to ");
      auto dot = rest.find('.', to == std::string::npos ? 0 : to);
      const Language* src = to == std::string::npos ? nullptr : find_language_by_name(rest.substr(0, to));
      const Language* dst =
          (to == std::string::npos || dot == std::string::npos) ? nullptr
                                                                : find_language_by_name(rest.substr(to + 4, dot - to - 4));
      if (!src || !dst) throw ProtocolError("mock cannot parse translation prompt", request.user_prompt);
      answer = translate({body_text(prompt.rest), std::string(src->code), std::string(dst->code)});
    } else if (head.rfind("Provide ", 0) == 0 && head.find("distinct paraphrases") != std::string::npos) {
      const auto n = std::max<std::size_t>(1, parse_leading_count(std::string_view(head).substr(8)));
      const auto sentence = body_text(prompt.rest);
      taken.insert(sentence);
      std::vector<std::string> lines;
      for (std::size_t j = 0; j < n; ++j) lines.push_back(paraphrase_sentence(sentence, hash_combine(key, j), j + c, taken));
      answer = text::join(lines, "\n");
    } else if (head.rfind("Generate ", 0) == 0 && head.find("following emotion:") != std::string::npos) {
      const auto n = std::max<std::size_t>(1, parse_leading_count(std::string_view(head).substr(9)));
      const auto emotion = std::string(text::trim(head.substr(head.find("following emotion:") + 18)));
      std::vector<std::string> examples;
      bool in_examples = false;
      for (const auto& l : prompt.rest) {
        if (text::trim(l) == prompts::kExamplesHeader) {
          in_examples = true;
        } else if (in_examples && !text::trim(l).empty()) {
          examples.emplace_back(text::trim(l));
        }
      }
      const std::size_t offset = static_cast<std::size_t>(key % kGenerationTemplates.size());
      std::vector<std::string> lines;
      for (std::size_t j = 0; lines.size() < n; ++j) {
        std::string line;
        if (j < examples.size() && j < n / 2) {
          taken.insert(examples[j]);
          line = paraphrase_sentence(examples[j], hash_combine(key, j), j, taken);
        } else {
          const auto t = (j + offset) % kGenerationTemplates.size();
          const auto i = (j / kGenerationTemplates.size() + key) % kIntensities.size();
          line = fmt::format(fmt::runtime(kGenerationTemplates[t]), fmt::arg("e", emotion),
                             fmt::arg("i", kIntensities[i]));
          if (j >= kGenerationTemplates.size() * kIntensities.size()) line += fmt::format(" ({})", j);
          if (taken.count(line)) continue;
          taken.insert(line);
        }
        lines.push_back(std::move(line));
      }
      answer = text::join(lines, "\n");
    } else {
      const std::string sentence =
          prompt.rest.empty() ? std::string(text::trim(head)) : body_text(prompt.rest);
      taken.insert(sentence);
      answer = paraphrase_sentence(sentence, key, static_cast<std::size_t>(key % 96), taken);
    }
    response.choices.push_back(std::move(answer));
  }
  check_response(response, request.n_choices);
  return response;
}

std::string MockProvider::translate(const TranslationRequest& request) {
  check_request(request);
  std::string out = request.text;
  if (request.source_lang != "en") out = apply_cipher(out, invert(cipher_for(seed_, request.source_lang)));
  if (request.target_lang != "en") {
    out = apply_cipher(out, cipher_for(seed_, request.target_lang));
  } else {
    out = lossy_restore(out, hash_combine(hash_combine(seed_, "drop"), request.source_lang));
  }
  if (text::trim(out).empty()) throw ProtocolError("empty translation", out);
  return out;
}

std::vector<EmbeddingResult> MockProvider::embed(std::span<const std::string> texts, bool with_tokens) {
  if (texts.empty()) throw ArgumentError("embed: no input texts");
  std::vector<EmbeddingResult> results;
  results.reserve(texts.size());
  for (const auto& t : texts) {
    EmbeddingResult r;
    auto tokens = text::tokenize(t);
    if (with_tokens) {
      for (const auto& tok : tokens) r.token_vectors.push_back({tok, token_vector(seed_, tok)});
    }
    // Summing in sorted order makes the sentence vector independent of word order.
    std::sort(tokens.begin(), tokens.end());
    r.sentence_vector.assign(kDimension, 0.0);
    for (const auto& tok : tokens) {
      auto v = token_vector(seed_, tok);
      for (std::size_t i = 0; i < kDimension; ++i) r.sentence_vector[i] += v[i];
    }
    if (!tokens.empty()) {
      for (auto& x : r.sentence_vector) x /= static_cast<double>(tokens.size());
    }
    results.push_back(std::move(r));
  }
  check_embeddings(results, texts.size(), with_tokens);
  return results;
}

}  // namespace textaug::providers
