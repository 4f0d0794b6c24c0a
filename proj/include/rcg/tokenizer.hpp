#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rcg {

using TokenSequence = std::vector<std::string>;

/// NFC-normalizes `text`, splits on Unicode whitespace, then splits each
/// non-space run into maximal [letter|digit|_] runs and single characters for
/// everything else. Case is preserved. Invalid UTF-8 bytes become U+FFFD.
TokenSequence tokenize(std::string_view text);

std::size_t count_tokens(std::string_view text);

/// NFC normalization of UTF-8 text.
std::string nfc(std::string_view text);

/// Trims and collapses Unicode whitespace runs to a single ASCII space.
std::string collapse_whitespace(std::string_view text);

std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

}  // namespace rcg
