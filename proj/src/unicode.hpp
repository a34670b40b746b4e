#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace traitlab::uni {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the codepoint starting at byte `pos`, advancing `pos` past it.
// Malformed sequences yield U+FFFD and advance one byte, so decoding is
// total over arbitrary byte strings.
char32_t decode(std::string_view text, std::size_t& pos);

void encode(char32_t cp, std::string& out);

bool is_alpha(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);

// Simple (1:1) case folding over Latin, Greek and Cyrillic; other
// codepoints map to themselves. Idempotent.
char32_t fold(char32_t cp);

// Case-folds a UTF-8 string codepoint by codepoint.
std::string fold_utf8(std::string_view text);

}  // namespace traitlab::uni
