#include "textaug/cli/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

#include "textaug/error.hpp"
#include "textaug/providers/languages.hpp"

namespace textaug::cli {

using nlohmann::json;

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::chat: return "chat";
    case ProviderKind::deepl: return "deepl";
    case ProviderKind::embedding: return "embedding";
    case ProviderKind::mock: return "mock";
  }
  return "chat";
}

namespace {

ProviderKind parse_kind(std::string_view name) {
  for (auto k : {ProviderKind::chat, ProviderKind::deepl, ProviderKind::embedding, ProviderKind::mock}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown provider kind '{}' (chat, deepl, embedding, mock)", name));
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("{}: '{}' has the wrong type", where, key));
  }
}

std::optional<fs::path> get_path(const json& j, const char* key, const fs::path& base, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(fmt::format("{}: '{}' must be a path string", where, key));
  fs::path p = it->get<std::string>();
  if (p.is_relative()) p = base / p;
  return p.lexically_normal();
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0)
    throw ConfigError(fmt::format("{}: '{}' must be a non-negative integer", where, key));
  return it->get<std::size_t>();
}

DatasetConfig parse_dataset(const json& j, const fs::path& base) {
  check_keys(j, "dataset", {"format", "path", "train", "validation", "test", "label_file"});
  DatasetConfig d;
  try {
    d.format = corpus::parse_format(get_or<std::string>(j, "format", "jsonl", "dataset"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  d.path = get_path(j, "path", base, "dataset");
  d.train = get_path(j, "train", base, "dataset");
  d.validation = get_path(j, "validation", base, "dataset");
  d.test = get_path(j, "test", base, "dataset");
  d.label_file = get_path(j, "label_file", base, "dataset");
  if (d.path.has_value() == d.train.has_value())
    throw ConfigError("dataset: give either 'path' or 'train' (with optional 'validation' and 'test')");
  if (d.path && (d.validation || d.test)) throw ConfigError("dataset: 'validation'/'test' need 'train', not 'path'");
  return d;
}

TargetConfig parse_targets(const json& j) {
  check_keys(j, "targets", {"k", "labels"});
  TargetConfig t;
  if (j.contains("k")) t.k = get_count(j, "k", 0, "targets");
  t.labels = get_or<std::vector<std::string>>(j, "labels", {}, "targets");
  if (t.k.has_value() == !t.labels.empty()) throw ConfigError("targets: give exactly one of 'k' or 'labels'");
  if (t.k && *t.k == 0) throw ConfigError("targets: k must be at least 1");
  return t;
}

ProviderConfig parse_provider(const std::string& name, const json& j, const fs::path& base) {
  const auto where = fmt::format("providers.{}", name);
  check_keys(j, where,
             {"kind", "endpoint", "api_key_env", "rpm", "max_in_flight", "max_attempts", "timeout_seconds", "model",
              "replay_dir", "record_dir"});
  ProviderConfig p;
  p.name = name;
  p.kind = parse_kind(get_or<std::string>(j, "kind", "", where));
  p.endpoint = get_or<std::string>(j, "endpoint", "", where);
  p.api_key_env = get_or<std::string>(j, "api_key_env", "", where);
  p.requests_per_minute = get_or<double>(j, "rpm", 0.0, where);
  p.max_in_flight = get_count(j, "max_in_flight", 4, where);
  p.max_attempts = get_count(j, "max_attempts", 5, where);
  p.timeout_seconds = get_count(j, "timeout_seconds", 60, where);
  p.model = get_or<std::string>(j, "model", "", where);
  p.replay_dir = get_path(j, "replay_dir", base, where);
  p.record_dir = get_path(j, "record_dir", base, where);
  if (p.kind != ProviderKind::mock && p.endpoint.empty() && !p.replay_dir)
    throw ConfigError(fmt::format("{}: 'endpoint' is required", where));
  if (p.requests_per_minute < 0) throw ConfigError(fmt::format("{}: rpm must be non-negative", where));
  if (p.max_attempts == 0 || p.max_in_flight == 0)
    throw ConfigError(fmt::format("{}: max_attempts and max_in_flight must be at least 1", where));
  return p;
}

PlanConfig parse_plan(const json& j, const ExperimentConfig& config) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw ConfigError("every plan needs a string 'name'");
  PlanConfig p;
  p.name = j["name"].get<std::string>();
  const auto where = fmt::format("plan '{}'", p.name);
  if (p.name.empty() || p.name.find_first_of("/\\") != std::string::npos || p.name == "." || p.name == "..")
    throw ConfigError(fmt::format("{}: name must be a plain directory name", where));
  p.strategy = parse_strategy(get_or<std::string>(j, "strategy", "", where));
  p.provider = get_or<std::string>(j, "provider", "", where);
  const std::string model = get_or<std::string>(j, "model", "", where);
  const double temperature = get_or<double>(j, "temperature", 1.0, where);
  if (temperature < 0) throw ConfigError(fmt::format("{}: temperature must be non-negative", where));

  json raw = {{"name", p.name}, {"strategy", std::string(to_string(p.strategy))}};
  switch (p.strategy) {
    case Strategy::oversample:
      check_keys(j, where, {"name", "strategy", "factor"});
      p.factor = get_count(j, "factor", 3, where);
      if (p.factor == 0) throw ConfigError(fmt::format("{}: factor must be at least 1", where));
      raw["factor"] = p.factor;
      break;
    case Strategy::paraphrase: {
      check_keys(j, where,
                 {"name", "strategy", "provider", "model", "temperature", "mode", "n", "balance", "target_per_class"});
      auto& c = p.paraphrase;
      try {
        c.mode = augment::parse_prompt_mode(get_or<std::string>(j, "mode", "p2_batch", where));
        c.balance = augment::parse_balance(get_or<std::string>(j, "balance", "nmax", where));
      } catch (const Error& e) {
        throw ConfigError(fmt::format("{}: {}", where, e.what()));
      }
      c.n = get_count(j, "n", 3, where);
      c.target_per_class = get_count(j, "target_per_class", 0, where);
      c.model = model;
      c.temperature = temperature;
      if (c.n == 0) throw ConfigError(fmt::format("{}: n must be at least 1", where));
      if (c.balance == augment::Balance::nbal && c.target_per_class == 0)
        throw ConfigError(fmt::format("{}: balance nbal needs target_per_class", where));
      raw.update({{"provider", p.provider},
                  {"model", model},
                  {"temperature", temperature},
                  {"mode", std::string(augment::to_string(c.mode))},
                  {"n", c.n},
                  {"balance", std::string(augment::to_string(c.balance))},
                  {"target_per_class", c.target_per_class}});
      break;
    }
    case Strategy::zero_shot:
    case Strategy::few_shot: {
      check_keys(j, where, {"name", "strategy", "provider", "model", "temperature", "shots", "n", "per_class"});
      auto& c = p.generate;
      c.shots = get_count(j, "shots", p.strategy == Strategy::few_shot ? 3 : 0, where);
      c.n = get_count(j, "n", 6, where);
      c.per_class = get_count(j, "per_class", 6, where);
      c.model = model;
      c.temperature = temperature;
      if (p.strategy == Strategy::zero_shot && c.shots != 0)
        throw ConfigError(fmt::format("{}: zero_shot takes no shots", where));
      if (p.strategy == Strategy::few_shot && c.shots == 0)
        throw ConfigError(fmt::format("{}: few_shot needs shots >= 1", where));
      if (c.n == 0 || c.per_class == 0) throw ConfigError(fmt::format("{}: n and per_class must be at least 1", where));
      raw.update({{"provider", p.provider},
                  {"model", model},
                  {"temperature", temperature},
                  {"shots", c.shots},
                  {"n", c.n},
                  {"per_class", c.per_class}});
      break;
    }
    case Strategy::backtranslation: {
      check_keys(j, where, {"name", "strategy", "provider", "model", "languages", "language_preset"});
      auto& c = p.backtranslate;
      c.model = model;
      const bool has_langs = j.contains("languages"), has_preset = j.contains("language_preset");
      if (has_langs == has_preset)
        throw ConfigError(fmt::format("{}: give exactly one of 'languages' or 'language_preset'", where));
      c.languages = has_langs ? get_or<std::vector<std::string>>(j, "languages", {}, where)
                              : providers::language_preset(get_or<std::string>(j, "language_preset", "", where));
      if (c.languages.empty()) throw ConfigError(fmt::format("{}: no pivot languages", where));
      for (const auto& l : c.languages) {
        if (l == "en") throw ConfigError(fmt::format("{}: pivot language must differ from 'en'", where));
        providers::require_language(l);
      }
      raw.update({{"provider", p.provider}, {"model", model}, {"languages", c.languages}});
      break;
    }
  }
  if (p.strategy != Strategy::oversample) {
    if (p.provider.empty()) throw ConfigError(fmt::format("{}: 'provider' is required", where));
    auto it = config.providers.find(p.provider);
    if (it == config.providers.end())
      throw ConfigError(fmt::format("{}: provider '{}' is not configured", where, p.provider));
    const auto kind = it->second.kind;
    const bool translation_ok = kind == ProviderKind::deepl || kind == ProviderKind::chat || kind == ProviderKind::mock;
    const bool chat_ok = kind == ProviderKind::chat || kind == ProviderKind::mock;
    if (p.strategy == Strategy::backtranslation ? !translation_ok : !chat_ok)
      throw ConfigError(fmt::format("{}: provider '{}' of kind {} cannot serve strategy {}", where, p.provider,
                                    to_string(kind), to_string(p.strategy)));
  }
  p.raw = std::move(raw);
  return p;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::oversample: return "oversample";
    case Strategy::paraphrase: return "paraphrase";
    case Strategy::zero_shot: return "zero_shot";
    case Strategy::few_shot: return "few_shot";
    case Strategy::backtranslation: return "backtranslation";
  }
  return "oversample";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::oversample, Strategy::paraphrase, Strategy::zero_shot, Strategy::few_shot,
                 Strategy::backtranslation}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError(
      fmt::format("unknown strategy '{}' (oversample, paraphrase, zero_shot, few_shot, backtranslation)", name));
}

const PlanConfig& ExperimentConfig::plan(std::string_view name) const {
  for (const auto& p : plans) {
    if (p.name == name) return p;
  }
  throw ConfigError(fmt::format("no plan named '{}'", name));
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  check_keys(doc, "config",
             {"dataset", "targets", "providers", "plans", "quality", "classifier", "seed", "output_dir", "concurrency"});
  const fs::path base = fs::absolute(base_dir);
  ExperimentConfig c;
  if (!doc.contains("seed") || !doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
    throw ConfigError("config: 'seed' (non-negative integer) is required");
  c.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("dataset")) throw ConfigError("config: 'dataset' is required");
  c.dataset = parse_dataset(doc["dataset"], base);
  if (!doc.contains("targets")) throw ConfigError("config: 'targets' is required");
  c.targets = parse_targets(doc["targets"]);
  c.output_dir = get_path(doc, "output_dir", base, "config").value_or((base / "out").lexically_normal());
  c.concurrency = get_count(doc, "concurrency", 4, "config");
  if (c.concurrency == 0) throw ConfigError("config: concurrency must be at least 1");

  if (auto it = doc.find("providers"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("providers must be an object keyed by name");
    for (const auto& [name, section] : it->items()) c.providers.emplace(name, parse_provider(name, section, base));
  }

  if (auto it = doc.find("quality"); it != doc.end()) {
    check_keys(*it, "quality", {"enabled", "embedder"});
    c.quality.enabled = get_or<bool>(*it, "enabled", true, "quality");
    if (auto e = it->find("embedder"); e != it->end() && !e->is_null()) {
      c.quality.embedder = get_or<std::string>(*it, "embedder", "", "quality");
      auto p = c.providers.find(*c.quality.embedder);
      if (p == c.providers.end())
        throw ConfigError(fmt::format("quality: embedder '{}' is not a configured provider", *c.quality.embedder));
      if (p->second.kind != ProviderKind::embedding && p->second.kind != ProviderKind::mock)
        throw ConfigError(fmt::format("quality: provider '{}' is not an embedding provider", *c.quality.embedder));
    }
  }

  if (auto it = doc.find("classifier"); it != doc.end()) {
    check_keys(*it, "classifier", {"learning_rate", "l2_lambda", "epochs", "min_df", "lowercase"});
    c.classifier.learning_rate = get_or<double>(*it, "learning_rate", 0.5, "classifier");
    c.classifier.l2_lambda = get_or<double>(*it, "l2_lambda", 1e-4, "classifier");
    c.classifier.epochs = get_count(*it, "epochs", 200, "classifier");
    c.tfidf.min_df = get_count(*it, "min_df", 1, "classifier");
    c.tfidf.lowercase = get_or<bool>(*it, "lowercase", true, "classifier");
    if (c.classifier.epochs == 0) throw ConfigError("classifier: epochs must be at least 1");
    if (!(c.classifier.learning_rate > 0)) throw ConfigError("classifier: learning_rate must be positive");
    if (c.classifier.l2_lambda < 0) throw ConfigError("classifier: l2_lambda must be non-negative");
  }
  c.classifier.seed = c.seed;

  if (auto it = doc.find("plans"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("plans must be an array");
    std::set<std::string> names;
    for (const auto& section : *it) {
      auto plan = parse_plan(section, c);
      if (!names.insert(plan.name).second) throw ConfigError(fmt::format("duplicate plan name '{}'", plan.name));
      c.plans.push_back(std::move(plan));
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

json to_json(const ExperimentConfig& c) {
  auto opt_path = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(); };
  json dataset = {{"format", std::string(corpus::to_string(c.dataset.format))}};
  if (c.dataset.path) dataset["path"] = c.dataset.path->string();
  if (c.dataset.train) dataset["train"] = c.dataset.train->string();
  if (c.dataset.validation) dataset["validation"] = c.dataset.validation->string();
  if (c.dataset.test) dataset["test"] = c.dataset.test->string();
  if (c.dataset.label_file) dataset["label_file"] = c.dataset.label_file->string();

  json targets = json::object();
  if (c.targets.k) targets["k"] = *c.targets.k;
  else targets["labels"] = c.targets.labels;

  json providers = json::object();
  for (const auto& [name, p] : c.providers) {
    json pj = {{"kind", std::string(to_string(p.kind))},
               {"endpoint", p.endpoint},
               {"api_key_env", p.api_key_env},
               {"rpm", p.requests_per_minute},
               {"max_in_flight", p.max_in_flight},
               {"max_attempts", p.max_attempts},
               {"timeout_seconds", p.timeout_seconds},
               {"model", p.model}};
    if (p.replay_dir) pj["replay_dir"] = opt_path(p.replay_dir);
    if (p.record_dir) pj["record_dir"] = opt_path(p.record_dir);
    providers[name] = std::move(pj);
  }

  json plans = json::array();
  for (const auto& p : c.plans) plans.push_back(p.raw);

  json quality = {{"enabled", c.quality.enabled}};
  if (c.quality.embedder) quality["embedder"] = *c.quality.embedder;

  return {{"seed", c.seed},
          {"dataset", dataset},
          {"targets", targets},
          {"providers", providers},
          {"plans", plans},
          {"quality", quality},
          {"classifier",
           {{"learning_rate", c.classifier.learning_rate},
            {"l2_lambda", c.classifier.l2_lambda},
            {"epochs", c.classifier.epochs},
            {"min_df", c.tfidf.min_df},
            {"lowercase", c.tfidf.lowercase}}},
          {"output_dir", c.output_dir.string()},
          {"concurrency", c.concurrency}};
}

}  // namespace textaug::cli
