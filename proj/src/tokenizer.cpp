#include "rcg/tokenizer.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace rcg {
namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *n;
}

bool is_word_char(UChar32 c) { return c == U'_' || u_isalpha(c) || u_isdigit(c); }

bool is_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

// Calls on_token(begin, end) for each token in NFC-normalized UTF-8 `s`.
template <typename F>
void scan_tokens(std::string_view s, F&& on_token) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  int32_t word_begin = -1;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    if (is_word_char(c)) {
      if (word_begin < 0) word_begin = start;
      continue;
    }
    if (word_begin >= 0) {
      on_token(word_begin, start);
      word_begin = -1;
    }
    if (!u_isUWhiteSpace(c)) on_token(start, i);
  }
  if (word_begin >= 0) on_token(word_begin, length);
}

}  // namespace

std::string nfc(std::string_view text) {
  if (is_ascii(text)) return std::string(text);
  const icu::Normalizer2& normalizer = nfc_instance();
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  if (normalizer.isNormalized(source, status) && U_SUCCESS(status)) {
    std::string out;
    source.toUTF8String(out);
    return out;
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString normalized = normalizer.normalize(source, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

TokenSequence tokenize(std::string_view text) {
  const std::string normalized = nfc(text);
  TokenSequence tokens;
  scan_tokens(normalized, [&](int32_t begin, int32_t end) {
    tokens.emplace_back(normalized.data() + begin, static_cast<std::size_t>(end - begin));
  });
  return tokens;
}

std::size_t count_tokens(std::string_view text) {
  const std::string normalized = nfc(text);
  std::size_t count = 0;
  scan_tokens(normalized, [&](int32_t, int32_t) { ++count; });
  return count;
}

std::string collapse_whitespace(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c >= 0 && u_isUWhiteSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(text.data() + start, static_cast<std::size_t>(i - start));
  }
  return out;
}

std::string join(std::span<const std::string> tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

}  // namespace rcg
