#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vpd::text {

/// ASCII lower-casing; other bytes pass through.
std::string case_fold(std::string_view s);

/// Lower-case, strip trailing punctuation, collapse runs of whitespace.
/// Shared by the QA oracle lookup and answer validation.
std::string normalize(std::string_view s);

/// Whitespace tokenization after case folding.
std::vector<std::string> split_words(std::string_view s);

/// Lower-case alphanumeric runs; punctuation separates tokens.
std::vector<std::string> word_tokens(std::string_view s);

std::string trim(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

/// Naive English plural used by question templates ("box" -> "boxes").
std::string plural(std::string_view noun);

}  // namespace vpd::text
