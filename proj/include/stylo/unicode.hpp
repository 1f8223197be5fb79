#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stylo::unicode {

/// Decodes UTF-8 into code points. Returns nullopt on any malformed sequence,
/// overlong encoding, surrogate, or value above U+10FFFF.
std::optional<std::u32string> decode(std::string_view utf8);

bool is_valid(std::string_view utf8);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

/// Number of code points; the input must be valid UTF-8.
std::size_t length(std::string_view utf8) noexcept;

/// Simple (one-to-one) Unicode lowercase mapping.
char32_t to_lower(char32_t cp) noexcept;

/// General category Nd.
bool is_decimal_digit(char32_t cp) noexcept;

/// Horizontal whitespace: tab, vertical tab, form feed and category Zs.
bool is_horizontal_space(char32_t cp) noexcept;

/// LF, CR, NEL, LINE SEPARATOR, PARAGRAPH SEPARATOR.
bool is_line_break(char32_t cp) noexcept;

}  // namespace stylo::unicode
