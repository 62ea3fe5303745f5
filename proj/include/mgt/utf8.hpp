#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace mgt::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point starting at `pos` and advances it. Invalid or truncated
/// sequences consume a single byte and yield U+FFFD.
char32_t decode(std::string_view text, std::size_t& pos) noexcept;

void append(std::string& out, char32_t cp);

/// Number of code points; invalid bytes count as one each.
std::size_t length(std::string_view text) noexcept;

bool is_letter(char32_t cp) noexcept;
bool is_digit(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;

std::string to_lower(std::string_view text);

} // namespace mgt::utf8
