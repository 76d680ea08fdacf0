#include "textaug/classify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "textaug/error.hpp"
#include "textaug/text.hpp"

namespace textaug::classify {

using nlohmann::json;

TfidfModel fit_tfidf(std::span<const std::string> documents, const TfidfSettings& settings) {
  std::map<std::string, std::size_t> df;
  std::size_t non_empty = 0;
  for (const auto& doc : documents) {
    const auto tokens = text::tokenize(doc, settings.lowercase);
    if (!tokens.empty()) ++non_empty;
    const std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  if (non_empty == 0) throw ArgumentError("fit_tfidf: no non-empty document");

  TfidfModel model;
  model.settings = settings;
  model.n_documents = documents.size();
  const double n = static_cast<double>(documents.size());
  for (const auto& [term, count] : df) {
    if (count < settings.min_df) continue;
    model.vocabulary.emplace(term, static_cast<std::uint32_t>(model.idf.size()));
    model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  if (model.idf.empty())
    throw ConfigError(fmt::format("TF-IDF vocabulary is empty (no term in at least {} documents)", settings.min_df));
  return model;
}

CsrMatrix TfidfModel::transform(std::span<const std::string> texts) const {
  CsrMatrix m;
  m.cols = dimension();
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  for (const auto& t : texts) {
    std::map<std::uint32_t, double> tf;
    for (const auto& tok : text::tokenize(t, settings.lowercase)) {
      if (auto it = vocabulary.find(tok); it != vocabulary.end()) tf[it->second] += 1.0;
    }
    cols.clear();
    vals.clear();
    double norm2 = 0.0;
    for (const auto& [c, count] : tf) {
      cols.push_back(c);
      vals.push_back(count * idf[c]);
      norm2 += vals.back() * vals.back();
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& v : vals) v *= inv;
    }
    m.append_row(cols, vals);
  }
  return m;
}

LogRegModel train(const CsrMatrix& features, const LabelMatrix& targets, const Hyperparams& hp, Backend backend) {
  if (hp.epochs == 0) throw ArgumentError("train: epochs must be at least 1");
  if (features.rows != targets.rows)
    throw ArgumentError(fmt::format("train: {} feature rows but {} target rows", features.rows, targets.rows));
  if (!(hp.learning_rate > 0.0) || !(hp.l2_lambda >= 0.0))
    throw ArgumentError("train: learning rate must be positive and l2_lambda non-negative");

  LogRegModel model;
  model.labels = targets.cols;
  model.features = features.cols;
  model.hyperparams = hp;
  model.weights.assign(model.labels * model.features, 0.0);
  model.bias.assign(model.labels, 0.0);
  model.loss_history.reserve(hp.epochs);

  kernels::LossGradient g;
  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    if (backend == Backend::parallel)
      kernels::parallel::logistic_loss_gradient(features, targets, model.weights, model.bias, hp.l2_lambda, g);
    else
      kernels::serial::logistic_loss_gradient(features, targets, model.weights, model.bias, hp.l2_lambda, g);
    double total = 0.0;
    for (double l : g.loss) total += l;
    if (!std::isfinite(total)) throw DivergenceError(epoch, fmt::format("loss became {}", total));
    model.loss_history.push_back(total);
    for (std::size_t i = 0; i < model.weights.size(); ++i) model.weights[i] -= hp.learning_rate * g.grad_w[i];
    for (std::size_t l = 0; l < model.labels; ++l) model.bias[l] -= hp.learning_rate * g.grad_b[l];
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw DivergenceError(hp.epochs, "non-finite weight after the last update");
  }
  return model;
}

std::vector<double> predict_proba(const LogRegModel& model, const CsrMatrix& features, Backend backend) {
  if (features.cols != model.features)
    throw ArgumentError(
        fmt::format("predict: model expects {} features, got {}", model.features, features.cols));
  return backend == Backend::parallel
             ? kernels::parallel::logistic_scores(features, model.labels, model.weights, model.bias)
             : kernels::serial::logistic_scores(features, model.labels, model.weights, model.bias);
}

LabelMatrix predict(const LogRegModel& model, const CsrMatrix& features, Backend backend) {
  const auto p = predict_proba(model, features, backend);
  LabelMatrix out(features.rows, model.labels);
  for (std::size_t i = 0; i < p.size(); ++i) out.data[i] = p[i] > 0.5 ? 1 : 0;
  return out;
}

LabelMatrix label_matrix(std::span<const corpus::Record* const> records, std::span<const std::string> labels) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t j = 0; j < labels.size(); ++j) index.emplace(labels[j], j);
  LabelMatrix m(records.size(), labels.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& l : records[i]->labels) {
      auto it = index.find(l);
      if (it == index.end())
        throw ValidationError(fmt::format("record {} has label '{}' outside the vocabulary", records[i]->id, l));
      m.at(i, it->second) = 1;
    }
  }
  return m;
}

std::optional<double> pct_change(double current, double baseline) {
  if (baseline == 0.0) return std::nullopt;
  return 100.0 * (current - baseline) / baseline;
}

ClassificationReport f1_report(const LabelMatrix& predictions, const LabelMatrix& gold,
                               std::span<const std::string> labels, std::span<const std::string> augmented_labels,
                               const ClassificationReport* baseline) {
  if (predictions.rows != gold.rows || predictions.cols != gold.cols || gold.cols != labels.size())
    throw ArgumentError(fmt::format("f1_report: predictions {}x{}, gold {}x{}, {} labels", predictions.rows,
                                    predictions.cols, gold.rows, gold.cols, labels.size()));
  const std::set<std::string> label_set(labels.begin(), labels.end());
  const std::set<std::string> aug(augmented_labels.begin(), augmented_labels.end());
  for (const auto& a : aug) {
    if (!label_set.count(a)) throw ArgumentError(fmt::format("augmented label '{}' is not a known label", a));
  }

  ClassificationReport r;
  r.labels.assign(labels.begin(), labels.end());
  r.augmented_labels.assign(aug.begin(), aug.end());
  double sum_all = 0, sum_aug = 0, sum_other = 0;
  std::size_t n_aug = 0, n_other = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.rows; ++i) {
      const bool p = predictions.at(i, j) != 0, g = gold.at(i, j) != 0;
      tp += p && g;
      fp += p && !g;
      fn += !p && g;
    }
    const std::size_t denom = 2 * tp + fp + fn;
    const double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    r.per_label_f1[labels[j]] = f1;
    sum_all += f1;
    if (aug.count(labels[j])) {
      sum_aug += f1;
      ++n_aug;
    } else {
      sum_other += f1;
      ++n_other;
    }
  }
  r.f1_macro_all = labels.empty() ? 0.0 : sum_all / static_cast<double>(labels.size());
  r.f1_macro_augmented = n_aug ? sum_aug / static_cast<double>(n_aug) : 0.0;
  r.f1_macro_other = n_other ? sum_other / static_cast<double>(n_other) : 0.0;
  if (labels.empty()) r.flags.emplace_back("empty_group:all");
  if (n_aug == 0) r.flags.emplace_back("empty_group:aug");
  if (n_other == 0) r.flags.emplace_back("empty_group:othr");

  if (baseline) {
    if (baseline->labels != r.labels) throw ComparisonError("reports cover different label sets");
    if (baseline->augmented_labels != r.augmented_labels)
      throw ComparisonError("reports use different augmented-label groups");
    auto change = [&](double cur, double base, const char* group) {
      if (auto pc = pct_change(cur, base)) return *pc;
      r.flags.emplace_back(fmt::format("zero_baseline:{}", group));
      return 0.0;
    };
    r.pct_change_all = change(r.f1_macro_all, baseline->f1_macro_all, "all");
    r.pct_change_augmented = change(r.f1_macro_augmented, baseline->f1_macro_augmented, "aug");
    r.pct_change_other = change(r.f1_macro_other, baseline->f1_macro_other, "othr");
  }
  return r;
}

namespace {

std::vector<std::string> texts_of(std::span<const corpus::Record* const> records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto* r : records) out.push_back(r->text);
  return out;
}

LabelMatrix fit_and_predict(const corpus::Dataset& ds, std::span<const std::string> test_texts,
                            const EvalOptions& options) {
  const auto train_records = ds.in_split(corpus::Split::train);
  if (train_records.empty()) throw ConfigError("dataset has no train split");
  const auto tfidf = fit_tfidf(texts_of(train_records), options.tfidf);
  const auto x = tfidf.transform(texts_of(train_records));
  const auto y = label_matrix(train_records, ds.vocabulary);
  const auto model = train(x, y, options.hyperparams, options.backend);
  return predict(model, tfidf.transform(test_texts), options.backend);
}

void check_external(const std::optional<LabelMatrix>& m, std::size_t rows, std::size_t cols, const char* side) {
  if (m && (m->rows != rows || m->cols != cols))
    throw ComparisonError(fmt::format("{} predictions are {}x{}, test split is {}x{}", side, m->rows, m->cols, rows,
                                      cols));
}

}  // namespace

EvalResult run_eval(const corpus::Dataset& original, const corpus::Dataset& augmented,
                    std::span<const std::string> augmented_labels, const EvalOptions& options) {
  const auto test = original.in_split(corpus::Split::test);
  if (test.empty()) throw ConfigError("dataset has no test split");
  if (original.vocabulary != augmented.vocabulary)
    throw ComparisonError("original and augmented datasets use different label vocabularies");
  const auto test_aug = augmented.in_split(corpus::Split::test);
  if (test_aug.size() != test.size())
    throw ComparisonError(
        fmt::format("test splits differ in size ({} vs {})", test.size(), test_aug.size()));
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!(*test[i] == *test_aug[i]))
      throw ComparisonError(fmt::format("test splits differ at position {} (id {})", i, test[i]->id));
  }

  const auto& labels = original.vocabulary;
  const auto gold = label_matrix(test, labels);
  check_external(options.external_baseline, gold.rows, gold.cols, "baseline");
  check_external(options.external_augmented, gold.rows, gold.cols, "augmented");
  const auto test_texts = texts_of(test);

  EvalResult result;
  const auto base_pred =
      options.external_baseline ? *options.external_baseline : fit_and_predict(original, test_texts, options);
  result.baseline = f1_report(base_pred, gold, labels, augmented_labels);
  result.baseline = f1_report(base_pred, gold, labels, augmented_labels, &result.baseline);
  const auto aug_pred =
      options.external_augmented ? *options.external_augmented : fit_and_predict(augmented, test_texts, options);
  result.augmented = f1_report(aug_pred, gold, labels, augmented_labels, &result.baseline);
  return result;
}

LabelMatrix import_external_predictions(const std::filesystem::path& path, const corpus::Dataset& gold) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open predictions file {}", path.string()));
  const auto test = gold.in_split(corpus::Split::test);
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < test.size(); ++i) row_of.emplace(test[i]->id, i);

  LabelMatrix m(test.size(), gold.vocabulary.size());
  std::vector<bool> seen(test.size(), false);
  std::vector<std::string> duplicates, unknown;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("labels") ||
        !j["labels"].is_array())
      throw ParseError(path.string(), line_no, "expected {\"id\": string, \"labels\": [string, ...]}");
    const auto id = j["id"].get<std::string>();
    auto it = row_of.find(id);
    if (it == row_of.end()) {
      unknown.push_back(id);
      continue;
    }
    if (seen[it->second]) {
      duplicates.push_back(id);
      continue;
    }
    seen[it->second] = true;
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw ParseError(path.string(), line_no, "labels must be strings");
      const auto idx = gold.label_index(l.get<std::string>());
      if (!idx)
        throw ImportError(fmt::format("{}: id {} has unknown label '{}'", path.string(), id, l.get<std::string>()));
      m.at(it->second, *idx) = 1;
    }
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!seen[i]) missing.push_back(test[i]->id);
  }
  if (!missing.empty() || !duplicates.empty() || !unknown.empty()) {
    std::string msg = fmt::format("{} does not cover the test split exactly once:", path.string());
    if (!missing.empty()) msg += fmt::format(" missing ids [{}]", text::join(missing, ", "));
    if (!duplicates.empty()) msg += fmt::format(" duplicate ids [{}]", text::join(duplicates, ", "));
    if (!unknown.empty()) msg += fmt::format(" unknown ids [{}]", text::join(unknown, ", "));
    throw ImportError(msg);
  }
  return m;
}

std::string csv_header() {
  return "Data aug,FT Model,F1-macro (all Cls),%Change (all Cls),F1-macro (aug Cls),%Change (aug Cls),"
         "F1-macro (othr Cls),%Change (othr Cls)";
}

std::string csv_row(std::string_view data_aug, std::string_view model, const ClassificationReport& r) {
  // Keeps tiny negative changes from printing as "-0.00".
  auto pct = [](double v) { return std::abs(v) < 0.005 ? 0.0 : v; };
  return fmt::format("{},{},{:.4f},{:.2f},{:.4f},{:.2f},{:.4f},{:.2f}", text::csv_field(data_aug),
                     text::csv_field(model), r.f1_macro_all, pct(r.pct_change_all), r.f1_macro_augmented,
                     pct(r.pct_change_augmented), r.f1_macro_other, pct(r.pct_change_other));
}

json to_json(const ClassificationReport& r) {
  json per_label = json::object();
  for (const auto& l : r.labels) per_label[l] = r.per_label_f1.at(l);
  return {{"labels", r.labels},
          {"augmented_labels", r.augmented_labels},
          {"per_label_f1", per_label},
          {"F1-macro (all Cls)", r.f1_macro_all},
          {"%Change (all Cls)", r.pct_change_all},
          {"F1-macro (aug Cls)", r.f1_macro_augmented},
          {"%Change (aug Cls)", r.pct_change_augmented},
          {"F1-macro (othr Cls)", r.f1_macro_other},
          {"%Change (othr Cls)", r.pct_change_other},
          {"flags", r.flags}};
}

}  // namespace textaug::classify
