#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace litpipe::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool is_blank(std::string_view s);

/// Collapses every whitespace run (including newlines) to one space and trims.
std::string collapse_whitespace(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Largest codepoint boundary <= pos in a UTF-8 string.
std::size_t utf8_floor(std::string_view s, std::size_t pos);

/// Byte length of the UTF-8 sequence starting at s[pos] (1 for invalid lead bytes).
std::size_t utf8_char_len(std::string_view s, std::size_t pos);

std::vector<std::string> split(std::string_view s, char delim);

/// Sentence spans over `s`: a sentence ends after `.`, `?` or `!` followed by
/// whitespace, or at a newline. Returned pieces are trimmed and nonblank.
std::vector<std::string> split_sentences(std::string_view s);

}  // namespace litpipe::text
