#include "stylo/preprocess.hpp"

#include "stylo/errors.hpp"
#include "stylo/log.hpp"
#include "stylo/unicode.hpp"

namespace stylo {
namespace {

// Returns the replacement for a single code point, or nullptr to keep it.
const char32_t* punctuation_replacement(char32_t cp) noexcept {
    switch (cp) {
        case 0x015E: return U"Ș";  // Ş -> Ș
        case 0x015F: return U"ș";  // ş -> ș
        case 0x0162: return U"Ț";  // Ţ -> Ț
        case 0x0163: return U"ț";  // ţ -> ț
        case 0x201E:                    // „
        case 0x201C:                    // “
        case 0x201D:                    // ”
        case 0x2019:                    // ’
            return U"\"";
        case 0x2013:  // en dash
        case 0x2014:  // em dash
        case 0x2015:  // horizontal bar
            return U"-";
        case 0x2026: return U"...";
        default: return nullptr;
    }
}

}  // namespace

std::string_view to_string(Casing casing) noexcept {
    return casing == Casing::Lower ? "lower" : "original";
}

Casing parse_casing(std::string_view name) {
    if (name == "lower") return Casing::Lower;
    if (name == "original") return Casing::Original;
    throw InvalidArgument("unknown casing '" + std::string(name) + "' (expected original or lower)");
}

std::string normalize(std::string_view text) {
    const auto decoded = unicode::decode(text);
    if (!decoded) throw InvalidArgument("normalize: input is not valid UTF-8");

    std::u32string out;
    out.reserve(decoded->size());
    const std::u32string& in = *decoded;
    for (std::size_t i = 0; i < in.size();) {
        const char32_t cp = in[i];
        if (unicode::is_horizontal_space(cp) || unicode::is_line_break(cp)) {
            bool line_break = false;
            while (i < in.size() && (unicode::is_horizontal_space(in[i]) || unicode::is_line_break(in[i]))) {
                line_break = line_break || unicode::is_line_break(in[i]);
                ++i;
            }
            out.push_back(line_break ? U'\n' : U' ');
            continue;
        }
        if (const char32_t* repl = punctuation_replacement(cp)) {
            out.append(repl);
        } else {
            out.push_back(cp);
        }
        ++i;
    }
    return unicode::encode(out);
}

EncodedText encode(std::string_view normalized, Casing casing) {
    const auto decoded = unicode::decode(normalized);
    if (!decoded) throw InvalidArgument("encode: input is not valid UTF-8");

    EncodedText result;
    result.casing = casing;
    result.text.reserve(normalized.size());
    for (char32_t cp : *decoded) {
        if (casing == Casing::Lower) cp = unicode::to_lower(cp);
        if (unicode::is_decimal_digit(cp)) {
            cp = U'@';
        } else if (unicode::is_line_break(cp)) {
            cp = U'$';
        } else if (unicode::is_horizontal_space(cp)) {
            cp = U'_';
        }
        unicode::append(result.text, cp);
    }
    return result;
}

EncodedText preprocess(std::string_view raw, Casing casing) {
    if (raw.find_first_of("@_$") != std::string_view::npos) {
        log().warn("input already contains a sentinel character (@, _ or $); keeping it as punctuation");
    }
    return encode(normalize(raw), casing);
}

}  // namespace stylo
