#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace textaug::text {

/// Word tokenizer shared by every lexical metric and the TF-IDF featurizer.
///
/// Splits on Unicode whitespace, strips leading and trailing punctuation
/// (ASCII and common Unicode quotes, dashes, ellipses) from each piece and
/// drops pieces that end up empty. Inner punctuation is kept, so "can't"
/// stays a single token. Lowercasing applies to ASCII letters only.
std::vector<std::string> tokenize(std::string_view input, bool lowercase = true);

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Splits on '\n' (a trailing '\r' on each line is removed).
std::vector<std::string> split_lines(std::string_view s);

/// Splits on runs of ASCII whitespace, keeping punctuation attached.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in double quotes with embedded quotes doubled.
std::string csv_field(std::string_view field);

}  // namespace textaug::text
