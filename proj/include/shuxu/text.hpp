#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace shuxu::text {

// Strict UTF-8 decoding. Rejects overlong forms, surrogates and values
// above U+10FFFF. Throws DataError on malformed input.
std::u32string decode_utf8(std::string_view bytes);

bool is_valid_utf8(std::string_view bytes) noexcept;

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);
std::string encode_utf8(char32_t cp);

// Unicode NFC normalization of valid UTF-8.
std::string to_nfc(std::string_view utf8);

bool is_whitespace(char32_t cp) noexcept;

// Strips leading and trailing Unicode whitespace (including U+3000).
std::string trim(std::string_view utf8);

// NFC followed by trim; the canonical form of every title.
std::string normalize_title(std::string_view utf8);

// Number of Unicode scalar values.
std::size_t scalar_length(std::string_view utf8);

// First and last scalar values; U+0000 for empty input.
char32_t first_scalar(std::string_view utf8);
char32_t last_scalar(std::string_view utf8);

}  // namespace shuxu::text
