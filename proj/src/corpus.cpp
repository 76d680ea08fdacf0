#include "textaug/corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "textaug/error.hpp"
#include "textaug/text.hpp"

namespace textaug::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation" || name == "dev" || name == "val") return Split::validation;
  if (name == "test") return Split::test;
  throw ValidationError(fmt::format("unknown split '{}'", name));
}

std::string_view to_string(Format format) {
  return format == Format::jsonl ? "jsonl" : "tsv";
}

Format parse_format(std::string_view name) {
  if (name == "jsonl") return Format::jsonl;
  if (name == "tsv") return Format::tsv;
  throw ConfigError(fmt::format("unknown dataset format '{}' (expected jsonl or tsv)", name));
}

bool Record::has_label(std::string_view label) const {
  return std::binary_search(labels.begin(), labels.end(), label);
}

std::size_t Dataset::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const Record& r) { return r.split == split; }));
}

std::vector<const Record*> Dataset::in_split(Split split) const {
  std::vector<const Record*> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(&r);
  }
  return out;
}

std::optional<std::size_t> Dataset::label_index(std::string_view label) const {
  auto it = std::find(vocabulary.begin(), vocabulary.end(), label);
  if (it == vocabulary.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vocabulary.begin());
}

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::vector<std::string> read_label_file(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    auto name = text::trim(line);
    if (!name.empty()) labels.emplace_back(name);
  }
  return labels;
}

void normalize_labels(std::vector<std::string>& labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
}

std::vector<std::string> union_vocabulary(const std::vector<Record>& records) {
  std::set<std::string> all;
  for (const auto& r : records) all.insert(r.labels.begin(), r.labels.end());
  return {all.begin(), all.end()};
}

Record parse_jsonl_line(const std::string& line, const std::string& file, std::size_t lineno,
                        Split default_split) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(file, lineno, e.what());
  }
  if (!obj.is_object()) throw ParseError(file, lineno, "expected a JSON object");
  auto require_string = [&](const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
      throw ParseError(file, lineno, fmt::format("missing string field '{}'", key));
    return it->get<std::string>();
  };
  Record r;
  r.id = require_string("id");
  r.text = require_string("text");
  auto labels = obj.find("labels");
  if (labels == obj.end() || !labels->is_array())
    throw ParseError(file, lineno, "missing array field 'labels'");
  for (const auto& l : *labels) {
    if (!l.is_string()) throw ParseError(file, lineno, "labels must be strings");
    r.labels.push_back(l.get<std::string>());
  }
  normalize_labels(r.labels);
  r.split = default_split;
  if (auto s = obj.find("split"); s != obj.end() && !s->is_null()) {
    if (!s->is_string()) throw ParseError(file, lineno, "split must be a string");
    try {
      r.split = parse_split(s->get<std::string>());
    } catch (const ValidationError& e) {
      throw ParseError(file, lineno, e.what());
    }
  }
  if (auto a = obj.find("annotator"); a != obj.end() && a->is_string()) r.annotator = a->get<std::string>();
  return r;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cols;
}

Record parse_tsv_line(const std::string& line, const std::string& file, std::size_t lineno,
                      const std::vector<std::string>& vocabulary, const std::string& stem,
                      Split default_split) {
  auto cols = split_tabs(line);
  if (cols.size() < 2 || cols.size() > 5)
    throw ParseError(file, lineno, fmt::format("expected 2 to 5 tab-separated columns, got {}", cols.size()));
  Record r;
  r.text = cols[0];
  std::string_view indices = cols[1];
  std::size_t start = 0;
  while (start <= indices.size()) {
    auto comma = indices.find(',', start);
    if (comma == std::string_view::npos) comma = indices.size();
    auto piece = text::trim(indices.substr(start, comma - start));
    if (!piece.empty()) {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), idx);
      if (ec != std::errc{} || ptr != piece.data() + piece.size())
        throw ParseError(file, lineno, fmt::format("label index '{}' is not an integer", piece));
      if (idx >= vocabulary.size())
        throw ParseError(file, lineno,
                         fmt::format("label index {} outside label file ({} labels)", idx, vocabulary.size()));
      r.labels.push_back(vocabulary[idx]);
    }
    start = comma + 1;
  }
  normalize_labels(r.labels);
  if (cols.size() >= 3) r.annotator = cols[2];
  r.id = cols.size() >= 4 && !cols[3].empty() ? cols[3] : fmt::format("{}:{}", stem, lineno);
  r.split = default_split;
  if (cols.size() == 5 && !cols[4].empty()) {
    try {
      r.split = parse_split(cols[4]);
    } catch (const ValidationError& e) {
      throw ParseError(file, lineno, e.what());
    }
  }
  return r;
}

std::optional<fs::path> resolve_label_file(const fs::path& data, const LoadOptions& options) {
  if (options.label_file) return options.label_file;
  auto sidecar = default_label_file(data);
  if (fs::exists(sidecar)) return sidecar;
  auto emotions = data.parent_path() / "emotions.txt";
  if (fs::exists(emotions)) return emotions;
  return std::nullopt;
}

}  // namespace

fs::path default_label_file(const fs::path& tsv_path) {
  auto p = tsv_path;
  p += ".labels";
  return p;
}

void validate(const Dataset& dataset) {
  std::vector<std::string> empty_text, empty_labels, duplicate, unknown;
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> vocab(dataset.vocabulary.begin(), dataset.vocabulary.end());
  for (const auto& r : dataset.records) {
    if (text::trim(r.text).empty()) empty_text.push_back(r.id);
    if (r.labels.empty()) empty_labels.push_back(r.id);
    if (!seen.insert(r.id).second) duplicate.push_back(r.id);
    for (const auto& l : r.labels) {
      if (!vocab.count(l)) unknown.push_back(fmt::format("{} ({})", r.id, l));
    }
  }
  std::vector<std::string> problems;
  auto add = [&](const char* what, const std::vector<std::string>& ids) {
    if (!ids.empty()) problems.push_back(fmt::format("{}: {}", what, text::join(ids, ", ")));
  };
  add("empty text", empty_text);
  add("empty label set", empty_labels);
  add("duplicate id", duplicate);
  add("unknown label", unknown);
  if (!problems.empty()) throw ValidationError("invalid dataset: " + text::join(problems, "; "));
}

Dataset load_dataset(const fs::path& path, Format format, const LoadOptions& options) {
  auto in = open_input(path);
  const std::string file = path.string();
  Dataset ds;
  std::optional<fs::path> label_file;
  if (format == Format::tsv) {
    label_file = resolve_label_file(path, options);
    if (!label_file)
      throw ConfigError(fmt::format("TSV dataset '{}' needs a label file (one name per line)", file));
    ds.vocabulary = read_label_file(*label_file);
  } else if (options.label_file) {
    label_file = options.label_file;
    ds.vocabulary = read_label_file(*label_file);
  }

  const std::string stem = path.stem().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (format == Format::jsonl) {
      if (text::trim(line).empty()) continue;
      ds.records.push_back(parse_jsonl_line(line, file, lineno, options.default_split));
    } else {
      if (line.empty()) continue;
      ds.records.push_back(parse_tsv_line(line, file, lineno, ds.vocabulary, stem, options.default_split));
    }
  }
  if (!label_file) ds.vocabulary = union_vocabulary(ds.records);
  validate(ds);
  return ds;
}

Dataset load_split_files(const fs::path& train, const std::optional<fs::path>& validation,
                         const std::optional<fs::path>& test, Format format,
                         const std::optional<fs::path>& label_file) {
  Dataset out;
  auto append = [&](const fs::path& p, Split split) {
    LoadOptions opts;
    opts.label_file = label_file;
    opts.default_split = split;
    auto part = load_dataset(p, format, opts);
    for (auto& r : part.records) out.records.push_back(std::move(r));
    if (out.vocabulary.empty()) {
      out.vocabulary = part.vocabulary;
    } else if (label_file) {
      if (out.vocabulary != part.vocabulary)
        throw ValidationError("split files disagree on the label vocabulary");
    } else {
      std::set<std::string> merged(out.vocabulary.begin(), out.vocabulary.end());
      merged.insert(part.vocabulary.begin(), part.vocabulary.end());
      out.vocabulary.assign(merged.begin(), merged.end());
    }
  };
  append(train, Split::train);
  if (validation) append(*validation, Split::validation);
  if (test) append(*test, Split::test);
  validate(out);
  return out;
}

void write_dataset(const Dataset& dataset, const fs::path& path, Format format) {
  std::ostringstream buf;
  if (format == Format::jsonl) {
    for (const auto& r : dataset.records) {
      json obj = {{"id", r.id}, {"text", r.text}, {"labels", r.labels}, {"split", to_string(r.split)}};
      if (!r.annotator.empty()) obj["annotator"] = r.annotator;
      buf << obj.dump(-1, ' ', false, json::error_handler_t::strict) << '\n';
    }
  } else {
    for (const auto& r : dataset.records) {
      for (const auto* field : {&r.text, &r.annotator, &r.id}) {
        if (field->find_first_of("\t\r\n") != std::string::npos)
          throw ArgumentError(fmt::format(
              "record '{}' contains a tab or newline; TSV cannot represent it, use JSONL", r.id));
      }
      std::vector<std::string> indices;
      for (const auto& l : r.labels) {
        auto idx = dataset.label_index(l);
        if (!idx) throw ValidationError(fmt::format("record '{}': label '{}' not in vocabulary", r.id, l));
        indices.push_back(std::to_string(*idx));
      }
      buf << r.text << '\t' << text::join(indices, ",") << '\t' << r.annotator << '\t' << r.id << '\t'
          << to_string(r.split) << '\n';
    }
  }
  auto write_file = [](const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", p.string()));
    out << content;
    if (!out) throw IoError(fmt::format("write to '{}' failed", p.string()));
  };
  write_file(path, buf.str());
  if (format == Format::tsv) {
    std::string labels;
    for (const auto& l : dataset.vocabulary) labels += l + "\n";
    write_file(default_label_file(path), labels);
  }
}

std::vector<LabelStats> label_counts(const Dataset& dataset, std::span<const Split> splits) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& l : dataset.vocabulary) counts[l] = 0;
  std::size_t n = 0;
  for (const auto& r : dataset.records) {
    if (std::find(splits.begin(), splits.end(), r.split) == splits.end()) continue;
    ++n;
    for (const auto& l : r.labels) ++counts[l];
  }
  std::vector<LabelStats> stats;
  stats.reserve(counts.size());
  for (const auto& [label, count] : counts) {
    stats.push_back({label, count, n ? static_cast<double>(count) / static_cast<double>(n) : 0.0});
  }
  std::sort(stats.begin(), stats.end(), [](const LabelStats& a, const LabelStats& b) {
    return a.count != b.count ? a.count > b.count : a.label < b.label;
  });
  return stats;
}

std::vector<std::string> select_least_represented(std::span<const LabelStats> stats, std::size_t k) {
  if (k == 0) throw ArgumentError("k must be positive");
  if (k > stats.size())
    throw ArgumentError(fmt::format("k = {} exceeds the vocabulary size {}", k, stats.size()));
  std::vector<const LabelStats*> order;
  for (const auto& s : stats) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const LabelStats* a, const LabelStats* b) {
    return a->count != b->count ? a->count < b->count : a->label < b->label;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(order[i]->label);
  return out;
}

LabelCorrelationMatrix label_correlation(const Dataset& dataset, std::span<const Split> splits) {
  const std::size_t L = dataset.vocabulary.size();
  std::vector<double> single(L, 0.0);
  std::vector<double> joint(L * L, 0.0);
  std::size_t n = 0;
  std::vector<std::size_t> present;
  for (const auto& r : dataset.records) {
    if (std::find(splits.begin(), splits.end(), r.split) == splits.end()) continue;
    ++n;
    present.clear();
    for (const auto& l : r.labels) {
      if (auto idx = dataset.label_index(l)) present.push_back(*idx);
    }
    for (auto i : present) {
      single[i] += 1.0;
      for (auto j : present) joint[i * L + j] += 1.0;
    }
  }
  LabelCorrelationMatrix m{dataset.vocabulary, std::vector<double>(L * L, 0.0)};
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < L; ++i) {
    m.values[i * L + i] = 1.0;
    for (std::size_t j = i + 1; j < L; ++j) {
      double c = 0.0;
      if (n > 0) {
        const double pi = single[i] / dn, pj = single[j] / dn;
        const double var = pi * (1.0 - pi) * pj * (1.0 - pj);
        if (var > 0.0) {
          const double cov = joint[i * L + j] / dn - pi * pj;
          c = std::clamp(cov / std::sqrt(var), -1.0, 1.0);
        }
      }
      m.values[i * L + j] = c;
      m.values[j * L + i] = c;
    }
  }
  return m;
}

}  // namespace textaug::corpus
