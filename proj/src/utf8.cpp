#include "mgt/utf8.hpp"

#include <algorithm>
#include <iterator>

namespace mgt::utf8 {
namespace {

struct CodeRange {
    char32_t lo;
    char32_t hi;
};

struct CodeMapping {
    char32_t from;
    char32_t to;
};

#include "mgt/detail/unicode_tables.inc"

template <std::size_t N>
bool in_ranges(const CodeRange (&table)[N], char32_t cp) noexcept {
    auto it = std::upper_bound(std::begin(table), std::end(table), cp,
                               [](char32_t value, const CodeRange& r) { return value < r.lo; });
    if (it == std::begin(table)) {
        return false;
    }
    --it;
    return cp <= it->hi;
}

bool continuation(unsigned char c) noexcept { return (c & 0xC0) == 0x80; }

} // namespace

char32_t decode(std::string_view text, std::size_t& pos) noexcept {
    const auto lead = static_cast<unsigned char>(text[pos]);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    std::size_t extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
        min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
        min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
        min = 0x10000;
    } else {
        ++pos;
        return kReplacement;
    }
    if (pos + extra >= text.size()) {
        ++pos;
        return kReplacement;
    }
    for (std::size_t i = 1; i <= extra; ++i) {
        const auto c = static_cast<unsigned char>(text[pos + i]);
        if (!continuation(c)) {
            ++pos;
            return kReplacement;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kReplacement;
    }
    pos += extra + 1;
    return cp;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::size_t length(std::string_view text) noexcept {
    std::size_t n = 0;
    for (std::size_t pos = 0; pos < text.size();) {
        decode(text, pos);
        ++n;
    }
    return n;
}

bool is_letter(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    return in_ranges(kLetterRanges, cp);
}

bool is_digit(char32_t cp) noexcept {
    if (cp < 0x80) {
        return cp >= '0' && cp <= '9';
    }
    return in_ranges(kDigitRanges, cp);
}

bool is_space(char32_t cp) noexcept { return in_ranges(kSpaceRanges, cp); }

char32_t to_lower(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= 'A' && cp <= 'Z') ? cp + ('a' - 'A') : cp;
    }
    auto it = std::lower_bound(std::begin(kLowercaseMap), std::end(kLowercaseMap), cp,
                               [](const CodeMapping& m, char32_t value) { return m.from < value; });
    if (it != std::end(kLowercaseMap) && it->from == cp) {
        return it->to;
    }
    return cp;
}

std::string to_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        append(out, to_lower(decode(text, pos)));
    }
    return out;
}

} // namespace mgt::utf8
