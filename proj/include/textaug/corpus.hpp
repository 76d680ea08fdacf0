#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace textaug::corpus {

enum class Split { train, validation, test };

std::string_view to_string(Split split);
/// Accepts "train", "validation"/"dev"/"val", "test".
Split parse_split(std::string_view name);

inline constexpr Split kAllSplits[] = {Split::train, Split::validation, Split::test};

enum class Format { jsonl, tsv };

std::string_view to_string(Format format);
Format parse_format(std::string_view name);

/// One labelled text sample. Labels are kept sorted and unique.
struct Record {
  std::string id;
  std::string text;
  std::vector<std::string> labels;
  Split split = Split::train;
  /// Third TSV column (GoEmotions rater/comment id). Carried, never used.
  std::string annotator;

  bool has_label(std::string_view label) const;
  bool operator==(const Record&) const = default;
};

struct Dataset {
  std::vector<Record> records;
  /// Ordered label names. Sorted unless an explicit vocabulary was loaded.
  std::vector<std::string> vocabulary;

  std::size_t count(Split split) const;
  std::vector<const Record*> in_split(Split split) const;
  std::optional<std::size_t> label_index(std::string_view label) const;

  bool operator==(const Dataset&) const = default;
};

struct LoadOptions {
  /// Label names, one per line. Required for TSV (index = 0-based line
  /// number); for JSONL it pins the vocabulary and rejects unknown labels.
  /// For TSV, defaults to "<file>.labels" and then "emotions.txt" next to the
  /// data file.
  std::optional<std::filesystem::path> label_file;
  /// Split assigned to records that carry no split tag.
  Split default_split = Split::train;
};

/// Reads a dataset and checks every record invariant.
/// Throws ParseError (with line number), ValidationError or IoError.
Dataset load_dataset(const std::filesystem::path& path, Format format,
                     const LoadOptions& options = {});

/// Loads one file per split (GoEmotions ships train/dev/test separately) and
/// concatenates them in train, validation, test order. All files must share
/// the label file when TSV is used.
Dataset load_split_files(const std::filesystem::path& train,
                         const std::optional<std::filesystem::path>& validation,
                         const std::optional<std::filesystem::path>& test, Format format,
                         const std::optional<std::filesystem::path>& label_file);

/// Writes a dataset so that load_dataset reproduces it. TSV output also
/// writes the label sidecar to default_label_file(path) and rejects texts
/// containing tabs or newlines (ArgumentError).
void write_dataset(const Dataset& dataset, const std::filesystem::path& path, Format format);

std::filesystem::path default_label_file(const std::filesystem::path& tsv_path);

/// Checks id uniqueness, non-empty texts and label sets, and vocabulary
/// membership. Throws ValidationError naming every offending id.
void validate(const Dataset& dataset);

struct LabelStats {
  std::string label;
  std::size_t count = 0;
  double frequency = 0.0;
};

/// Per-label membership counts over the chosen splits, sorted by descending
/// count (ties: lexicographic label name).
std::vector<LabelStats> label_counts(const Dataset& dataset,
                                     std::span<const Split> splits = kAllSplits);

/// k labels with the smallest counts, ascending, ties broken lexicographically.
/// Throws ArgumentError when k is zero or exceeds the vocabulary.
std::vector<std::string> select_least_represented(std::span<const LabelStats> stats,
                                                  std::size_t k);

struct LabelCorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major, labels.size()^2

  double at(std::size_t i, std::size_t j) const { return values[i * labels.size() + j]; }
};

/// Pearson correlation between binary label-indicator columns. A constant
/// column correlates 0 with every other label; the diagonal is always 1.
LabelCorrelationMatrix label_correlation(const Dataset& dataset,
                                         std::span<const Split> splits = kAllSplits);

}  // namespace textaug::corpus
