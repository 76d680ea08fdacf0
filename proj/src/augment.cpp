#include "textaug/augment.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "textaug/error.hpp"
#include "textaug/parallel.hpp"
#include "textaug/prompts.hpp"
#include "textaug/providers/languages.hpp"
#include "textaug/rng.hpp"
#include "textaug/text.hpp"

namespace textaug::augment {

using corpus::Dataset;
using corpus::Record;
using corpus::Split;
using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::oversample: return "oversample";
    case Method::paraphrase_p1: return "paraphrase_p1";
    case Method::paraphrase_p2: return "paraphrase_p2";
    case Method::zero_shot: return "zero_shot";
    case Method::few_shot: return "few_shot";
    case Method::backtranslation: return "backtranslation";
  }
  return "oversample";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::oversample, Method::paraphrase_p1, Method::paraphrase_p2, Method::zero_shot,
                 Method::few_shot, Method::backtranslation}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError(fmt::format("unknown augmentation method '{}'", name));
}

std::string_view to_string(PromptMode mode) { return mode == PromptMode::p1_iterative ? "p1_iterative" : "p2_batch"; }

PromptMode parse_prompt_mode(std::string_view name) {
  if (name == "p1_iterative" || name == "p1") return PromptMode::p1_iterative;
  if (name == "p2_batch" || name == "p2") return PromptMode::p2_batch;
  throw ConfigError(fmt::format("unknown prompt mode '{}'", name));
}

std::string_view to_string(Balance balance) { return balance == Balance::nmax ? "nmax" : "nbal"; }

Balance parse_balance(std::string_view name) {
  if (name == "nmax") return Balance::nmax;
  if (name == "nbal") return Balance::nbal;
  throw ConfigError(fmt::format("unknown balance mode '{}'", name));
}

namespace {

void require_targets(const Dataset& dataset, std::span<const std::string> targets) {
  if (targets.empty()) throw ConfigError("no target labels");
  for (const auto& t : targets) {
    if (!dataset.label_index(t)) throw ConfigError(fmt::format("target label '{}' is not in the vocabulary", t));
  }
}

bool carries_any(const Record& r, std::span<const std::string> targets) {
  return std::any_of(targets.begin(), targets.end(), [&](const std::string& t) { return r.has_label(t); });
}

std::vector<const Record*> eligible_sources(const Dataset& dataset, std::span<const std::string> targets,
                                            std::vector<std::string>& warnings) {
  std::vector<const Record*> out;
  for (const auto& r : dataset.records) {
    if (r.split == Split::train && carries_any(r, targets)) out.push_back(&r);
  }
  for (const auto& t : targets) {
    const bool present = std::any_of(out.begin(), out.end(), [&](const Record* r) { return r->has_label(t); });
    if (!present) {
      warnings.push_back(fmt::format("target label '{}' has no train records; nothing generated for it", t));
      spdlog::warn("{}", warnings.back());
    }
  }
  return out;
}

std::string fingerprint(std::string_view system_message, std::string_view user_prompt) {
  return sha256_hex(fmt::format("{}\n{}", system_message, user_prompt));
}

void write_partial(const RunOptions& options, const std::vector<AugmentedRecord>& records) {
  if (!options.partial_path) return;
  fs::create_directories(options.partial_path->parent_path());
  write_augmented(records, *options.partial_path);
  spdlog::warn("provider failure: {} completed records preserved in {}", records.size(),
               options.partial_path->string());
}

// Seeded choice of k positions that keeps the chosen items in their
// original order.
std::vector<std::size_t> seeded_subset(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  auto idx = rng.sample_indices(n, k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<std::string> parse_lines(std::string_view reply) {
  std::vector<std::string> out;
  for (const auto& raw : text::split_lines(reply)) {
    std::string_view line = text::trim(raw);
    if (line.rfind("•", 0) == 0) {
      line = text::trim(line.substr(std::string_view("•").size()));
    } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
      line = text::trim(line.substr(1));
    } else {
      std::size_t digits = 0;
      while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
      const bool spaced = digits + 1 >= line.size() || std::isspace(static_cast<unsigned char>(line[digits + 1]));
      if (digits > 0 && digits < line.size() && (line[digits] == '.' || line[digits] == ')') && spaced)
        line = text::trim(line.substr(digits + 1));
    }
    if (line.size() >= 2) out.emplace_back(line);
  }
  return out;
}

AugmentResult oversample(const Dataset& dataset, std::span<const std::string> targets, std::size_t factor) {
  if (factor < 1) throw ArgumentError("oversampling factor must be >= 1");
  require_targets(dataset, targets);
  AugmentResult result;
  for (const auto* src : eligible_sources(dataset, targets, result.warnings)) {
    for (std::size_t k = 1; k <= factor; ++k) {
      AugmentedRecord r;
      r.id = fmt::format("{}:os:{}", src->id, k);
      r.text = src->text;
      r.labels = src->labels;
      r.source_id = src->id;
      r.method = Method::oversample;
      result.records.push_back(std::move(r));
    }
  }
  return result;
}

AugmentResult paraphrase(const Dataset& dataset, std::span<const std::string> targets, const ParaphraseConfig& config,
                         providers::ChatProvider& client, const RunOptions& options) {
  if (config.n < 1) throw ArgumentError("paraphrase: n must be >= 1");
  if (config.balance == Balance::nbal && config.target_per_class < 1)
    throw ArgumentError("paraphrase: nbal needs target_per_class >= 1");
  require_targets(dataset, targets);

  AugmentResult result;
  const auto sources = eligible_sources(dataset, targets, result.warnings);
  const bool iterative = config.mode == PromptMode::p1_iterative;
  const std::size_t calls_per_source = iterative ? config.n : 1;
  const Method method = iterative ? Method::paraphrase_p1 : Method::paraphrase_p2;

  struct CallResult {
    std::vector<std::string> lines;
    std::string fingerprint;
  };
  auto call = [&](std::size_t task) -> CallResult {
    const Record& src = *sources[task / calls_per_source];
    const std::size_t iteration = task % calls_per_source;
    providers::ChatRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.user_prompt = iterative ? prompts::paraphrase_single(src.text) : prompts::paraphrase_batch(config.n, src.text);
    request.seed = hash_combine(hash_combine(options.seed, src.id), iteration);
    auto response = client.chat_complete(request);
    CallResult out{{}, fingerprint(request.system_message, request.user_prompt)};
    if (iterative) {
      out.lines.emplace_back(text::trim(response.choices.at(0)));
    } else {
      out.lines = parse_lines(response.choices.at(0));
      if (out.lines.size() > config.n) out.lines.resize(config.n);
    }
    return out;
  };

  auto outcome = bounded_parallel_map<CallResult>(sources.size() * calls_per_source, options.concurrency, call);
  result.provider_calls = static_cast<std::size_t>(
      std::count_if(outcome.results.begin(), outcome.results.end(), [](const auto& r) { return r.has_value(); }));

  // Assemble in (source, call) order so output never depends on scheduling.
  std::vector<AugmentedRecord> records;
  std::vector<std::size_t> record_source;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const Record& src = *sources[s];
    std::set<std::string> seen{src.text};
    std::size_t counter = 0;
    for (std::size_t k = 0; k < calls_per_source; ++k) {
      const auto& slot = outcome.results[s * calls_per_source + k];
      if (!slot) continue;
      for (const auto& line : slot->lines) {
        if (line.empty() || !seen.insert(line).second) continue;
        AugmentedRecord r;
        r.id = fmt::format("{}:{}:{}", src.id, iterative ? "p1" : "p2", ++counter);
        r.text = line;
        r.labels = src.labels;
        r.source_id = src.id;
        r.method = method;
        r.model = config.model;
        r.prompt_fingerprint = slot->fingerprint;
        records.push_back(std::move(r));
        record_source.push_back(s);
      }
    }
  }
  if (outcome.error) {
    write_partial(options, records);
    std::rethrow_exception(outcome.error);
  }

  if (config.balance == Balance::nmax) {
    result.records = std::move(records);
    return result;
  }

  // nbal: each record belongs to the first target label (in targets order) it carries.
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (const auto& t : targets) by_class[t];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record& src = *sources[record_source[i]];
    for (const auto& t : targets) {
      if (src.has_label(t)) {
        by_class[t].push_back(i);
        break;
      }
    }
  }
  std::vector<std::string> shortfalls;
  for (const auto& t : targets) {
    const auto have = by_class[t].size();
    if (have < config.target_per_class)
      shortfalls.push_back(fmt::format("'{}' has {} of {} (deficit {})", t, have, config.target_per_class,
                                       config.target_per_class - have));
  }
  if (!shortfalls.empty()) throw BalanceError("nbal shortfall: " + text::join(shortfalls, "; "));

  std::vector<bool> keep(records.size(), false);
  for (const auto& t : targets) {
    const auto& members = by_class[t];
    for (auto pos : seeded_subset(members.size(), config.target_per_class,
                                  hash_combine(hash_combine(options.seed, "nbal"), t))) {
      keep[members[pos]] = true;
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) result.records.push_back(std::move(records[i]));
  }
  return result;
}

AugmentResult generate(std::span<const std::string> targets, const GenerateConfig& config, const Dataset& dataset,
                       providers::ChatProvider& client, const RunOptions& options) {
  if (config.n < 1 || config.per_class < 1) throw ArgumentError("generate: n and per_class must be >= 1");
  require_targets(dataset, targets);

  // Few-shot examples are fixed per class before any call is made.
  std::vector<std::vector<std::string>> examples(targets.size());
  if (config.shots > 0) {
    for (std::size_t c = 0; c < targets.size(); ++c) {
      std::vector<const Record*> pool;
      for (const auto& r : dataset.records) {
        if (r.split == Split::train && r.has_label(targets[c])) pool.push_back(&r);
      }
      if (pool.size() < config.shots)
        throw ArgumentError(fmt::format("class '{}' has {} train records, fewer than {} shots", targets[c],
                                        pool.size(), config.shots));
      Rng rng(hash_combine(hash_combine(options.seed, "shots"), targets[c]));
      for (auto idx : rng.sample_indices(pool.size(), config.shots)) examples[c].push_back(pool[idx]->text);
    }
  }

  const std::size_t calls_per_class = (config.per_class + config.n - 1) / config.n;
  const Method method = config.shots == 0 ? Method::zero_shot : Method::few_shot;

  struct CallResult {
    std::vector<std::string> lines;
    std::string fingerprint;
  };
  auto call = [&](std::size_t task) -> CallResult {
    const std::size_t c = task / calls_per_class;
    providers::ChatRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.system_message = std::string(prompts::kGenerationSystemMessage);
    request.user_prompt = prompts::generation(config.n, targets[c], examples[c]);
    request.seed = hash_combine(hash_combine(options.seed, targets[c]), task % calls_per_class);
    auto response = client.chat_complete(request);
    return {parse_lines(response.choices.at(0)), fingerprint(request.system_message, request.user_prompt)};
  };

  auto outcome = bounded_parallel_map<CallResult>(targets.size() * calls_per_class, options.concurrency, call);
  AugmentResult result;
  result.provider_calls = static_cast<std::size_t>(
      std::count_if(outcome.results.begin(), outcome.results.end(), [](const auto& r) { return r.has_value(); }));

  std::vector<AugmentedRecord> records;
  for (std::size_t c = 0; c < targets.size(); ++c) {
    std::vector<std::pair<std::string, std::string>> lines;  // (text, fingerprint)
    std::set<std::string> seen;
    for (std::size_t k = 0; k < calls_per_class; ++k) {
      const auto& slot = outcome.results[c * calls_per_class + k];
      if (!slot) continue;
      for (const auto& l : slot->lines) {
        if (seen.insert(l).second) lines.emplace_back(l, slot->fingerprint);
      }
    }
    std::vector<std::size_t> chosen;
    if (lines.size() > config.per_class) {
      chosen = seeded_subset(lines.size(), config.per_class,
                             hash_combine(hash_combine(options.seed, "truncate"), targets[c]));
    } else {
      for (std::size_t i = 0; i < lines.size(); ++i) chosen.push_back(i);
      if (!outcome.error && lines.size() < config.per_class) {
        result.warnings.push_back(fmt::format("class '{}': generated {} of {} requested sentences", targets[c],
                                              lines.size(), config.per_class));
        spdlog::warn("{}", result.warnings.back());
      }
    }
    std::size_t counter = 0;
    for (auto i : chosen) {
      AugmentedRecord r;
      r.id = fmt::format("synthetic:{}:{}:{}", to_string(method), targets[c], ++counter);
      r.text = lines[i].first;
      r.labels = {targets[c]};
      r.source_id = std::string(kSyntheticSource);
      r.method = method;
      r.model = config.model;
      r.prompt_fingerprint = lines[i].second;
      records.push_back(std::move(r));
    }
  }
  if (outcome.error) {
    write_partial(options, records);
    std::rethrow_exception(outcome.error);
  }
  result.records = std::move(records);
  return result;
}

AugmentResult backtranslate(const Dataset& dataset, std::span<const std::string> targets,
                            const BacktranslateConfig& config, providers::Translator& client,
                            const RunOptions& options) {
  if (config.languages.empty()) throw ConfigError("backtranslation needs at least one pivot language");
  for (const auto& lang : config.languages) {
    if (lang == "en") throw ConfigError("backtranslation pivot language must differ from 'en'");
    providers::require_language(lang);
  }
  require_targets(dataset, targets);

  AugmentResult result;
  const auto sources = eligible_sources(dataset, targets, result.warnings);
  const std::size_t L = config.languages.size();

  struct CallResult {
    std::optional<std::string> text;
    std::string fingerprint;
    std::string failure;
  };
  auto call = [&](std::size_t task) -> CallResult {
    const Record& src = *sources[task / L];
    const std::string& lang = config.languages[task % L];
    providers::TranslationRequest forward{src.text, "en", lang};
    try {
      auto pivot = client.translate(forward);
      providers::TranslationRequest back{pivot, lang, "en"};
      auto restored = client.translate(back);
      return {std::string(text::trim(restored)),
              sha256_hex(providers::translation_prompt(forward) + "\n" + providers::translation_prompt(back)), {}};
    } catch (const ProviderUnavailableError& e) {
      return {std::nullopt, {}, e.what()};
    } catch (const ProtocolError& e) {
      return {std::nullopt, {}, e.what()};
    }
  };

  auto outcome = bounded_parallel_map<CallResult>(sources.size() * L, options.concurrency, call);
  if (outcome.error) std::rethrow_exception(outcome.error);

  for (std::size_t task = 0; task < outcome.results.size(); ++task) {
    const Record& src = *sources[task / L];
    const std::string& lang = config.languages[task % L];
    const auto& slot = *outcome.results[task];
    result.provider_calls += 2;
    if (!slot.text || slot.text->empty()) {
      ++result.skipped;
      result.warnings.push_back(fmt::format("skipped '{}' via {}: {}", src.id, lang,
                                            slot.failure.empty() ? "empty translation" : slot.failure));
      spdlog::warn("{}", result.warnings.back());
      continue;
    }
    AugmentedRecord r;
    r.id = fmt::format("{}:bt:{}", src.id, lang);
    r.text = *slot.text;
    r.labels = src.labels;
    r.source_id = src.id;
    r.method = Method::backtranslation;
    r.model = config.model;
    r.language_chain = {"en", lang, "en"};
    r.prompt_fingerprint = slot.fingerprint;
    r.identical = r.text == text::trim(src.text);
    result.records.push_back(std::move(r));
  }
  return result;
}

MergeResult merge_into_training_set(const Dataset& dataset, std::span<const AugmentedRecord> augmented,
                                    std::uint64_t seed) {
  MergeResult out;
  out.dataset.vocabulary = dataset.vocabulary;
  std::unordered_set<std::string> ids;
  for (const auto& r : dataset.records) ids.insert(r.id);

  std::vector<Record> train;
  for (const auto& r : dataset.records) {
    if (r.split == Split::train) train.push_back(r);
  }
  for (const auto& a : augmented) {
    if (text::trim(a.text).empty()) throw ValidationError(fmt::format("augmented record '{}' has empty text", a.id));
    if (a.labels.empty()) throw ValidationError(fmt::format("augmented record '{}' has no labels", a.id));
    for (const auto& l : a.labels) {
      if (!dataset.label_index(l))
        throw ValidationError(fmt::format("augmented record '{}': label '{}' not in vocabulary", a.id, l));
    }
    if (a.claimed_split && *a.claimed_split != Split::train) {
      out.warnings.push_back(fmt::format("augmented record '{}' claimed split '{}'; forced to train", a.id,
                                         corpus::to_string(*a.claimed_split)));
      spdlog::warn("{}", out.warnings.back());
    }
    Record r;
    r.id = a.id;
    if (ids.count(r.id)) {
      std::size_t suffix = 1;
      while (ids.count(fmt::format("{}~{}", a.id, suffix))) ++suffix;
      r.id = fmt::format("{}~{}", a.id, suffix);
      out.warnings.push_back(fmt::format("id collision on '{}'; renamed to '{}'", a.id, r.id));
      spdlog::warn("{}", out.warnings.back());
    }
    ids.insert(r.id);
    r.text = a.text;
    r.labels = a.labels;
    std::sort(r.labels.begin(), r.labels.end());
    r.labels.erase(std::unique(r.labels.begin(), r.labels.end()), r.labels.end());
    r.split = Split::train;
    train.push_back(std::move(r));
  }
  Rng rng(seed);
  rng.shuffle(train);
  out.dataset.records = std::move(train);
  for (auto split : {Split::validation, Split::test}) {
    for (const auto& r : dataset.records) {
      if (r.split == split) out.dataset.records.push_back(r);
    }
  }
  return out;
}

json to_json(const AugmentedRecord& r) {
  json j = {{"id", r.id},
            {"text", r.text},
            {"labels", r.labels},
            {"source_id", r.source_id},
            {"method", to_string(r.method)},
            {"model", r.model},
            {"language_chain", r.language_chain},
            {"prompt_fingerprint", r.prompt_fingerprint},
            {"identical", r.identical}};
  if (r.claimed_split) j["split"] = corpus::to_string(*r.claimed_split);
  return j;
}

AugmentedRecord augmented_from_json(const json& j) {
  AugmentedRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.source_id = j.at("source_id").get<std::string>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.model = j.value("model", "");
    r.language_chain = j.value("language_chain", std::vector<std::string>{});
    r.prompt_fingerprint = j.value("prompt_fingerprint", "");
    r.identical = j.value("identical", false);
    if (auto s = j.find("split"); s != j.end() && s->is_string()) r.claimed_split = corpus::parse_split(s->get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("malformed augmented record: {}", e.what()));
  }
  return r;
}

void write_augmented(std::span<const AugmentedRecord> records, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::vector<AugmentedRecord> read_augmented(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<AugmentedRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(path.string(), lineno, "invalid JSON");
    try {
      out.push_back(augmented_from_json(j));
    } catch (const ValidationError& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
  }
  return out;
}

}  // namespace textaug::augment
