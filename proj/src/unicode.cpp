#include "stylo/unicode.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>

namespace stylo::unicode {
namespace {

struct CaseMapping {
    char32_t from;
    char32_t to;
};

struct CodePointRange {
    char32_t first;
    char32_t last;
};

#include "unicode_tables.inc"

template <std::size_t N>
bool in_ranges(const CodePointRange (&table)[N], char32_t cp) noexcept {
    const auto* it = std::upper_bound(std::begin(table), std::end(table), cp,
                                      [](char32_t v, const CodePointRange& r) { return v < r.first; });
    if (it == std::begin(table)) return false;
    --it;
    return cp <= it->last;
}

}  // namespace

std::optional<std::u32string> decode(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* p = reinterpret_cast<const unsigned char*>(utf8.data());
    const auto* end = p + utf8.size();
    while (p < end) {
        const unsigned char b0 = *p;
        char32_t cp = 0;
        int extra = 0;
        char32_t min_value = 0;
        if (b0 < 0x80) {
            out.push_back(b0);
            ++p;
            continue;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            extra = 1;
            min_value = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            extra = 2;
            min_value = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            extra = 3;
            min_value = 0x10000;
        } else {
            return std::nullopt;
        }
        if (end - p <= extra) return std::nullopt;
        for (int i = 1; i <= extra; ++i) {
            const unsigned char b = p[i];
            if ((b & 0xC0) != 0x80) return std::nullopt;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (cp < min_value || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
        out.push_back(cp);
        p += extra + 1;
    }
    return out;
}

bool is_valid(std::string_view utf8) { return decode(utf8).has_value(); }

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

std::string encode(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) append(out, cp);
    return out;
}

std::size_t length(std::string_view utf8) noexcept {
    return static_cast<std::size_t>(
        std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

char32_t to_lower(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
    const auto* it = std::lower_bound(std::begin(kLowerTable), std::end(kLowerTable), cp,
                                      [](const CaseMapping& m, char32_t v) { return m.from < v; });
    if (it != std::end(kLowerTable) && it->from == cp) return it->to;
    return cp;
}

bool is_decimal_digit(char32_t cp) noexcept {
    if (cp < 0x80) return cp >= U'0' && cp <= U'9';
    return in_ranges(kDecimalDigitRanges, cp);
}

bool is_horizontal_space(char32_t cp) noexcept {
    if (cp == U'\t' || cp == U'\v' || cp == U'\f') return true;
    return in_ranges(kSpaceSeparatorRanges, cp);
}

bool is_line_break(char32_t cp) noexcept {
    return cp == U'\n' || cp == U'\r' || cp == 0x85 || cp == 0x2028 || cp == 0x2029;
}

}  // namespace stylo::unicode
