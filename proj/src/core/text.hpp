#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ermm {

// UTF-8 decode; invalid bytes are kept as single code points so that
// distances over malformed input stay well defined.
std::vector<char32_t> utf8_decode(const std::string& text);

std::size_t codepoint_count(const std::string& text);

std::string trim(const std::string& text);
std::string to_lower_ascii(const std::string& text);

// Lowercases and strips the Latin-1 / Latin Extended-A diacritics that
// occur in city names (São Paulo -> sao paulo).
std::string normalize_city_name(const std::string& name);

// Whitespace-separated tokens with leading/trailing punctuation removed.
std::vector<std::string> tokenize_words(const std::string& text);

// Lenient numeric parse: strips whitespace and currency decoration, then
// resolves '.' vs ',' as decimal/grouping separators.
//   - both present: the rightmost separator is the decimal point;
//   - one present: decimal unless it splits off a single group of exactly
//     three digits with a plausible integer part (grouping style);
//   - a zero or empty integer part always reads as a decimal.
std::optional<double> parse_flexible_number(const std::string& raw);

// Shortest round-trippable decimal representation used for all numeric
// file output; identical across runs.
std::string format_double(double value);

bool starts_with(const std::string& text, const std::string& prefix);

} // namespace ermm
