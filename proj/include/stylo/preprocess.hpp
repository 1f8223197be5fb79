#pragma once

#include <string>
#include <string_view>

namespace stylo {

enum class Casing { Original, Lower };

std::string_view to_string(Casing casing) noexcept;
/// Accepts "original" or "lower"; throws InvalidArgument otherwise.
Casing parse_casing(std::string_view name);

/// Text after normalization and sentinel encoding, stored as UTF-8.
/// Contains no space, tab, line break or decimal digit code points.
struct EncodedText {
    std::string text;
    Casing casing = Casing::Original;
};

/// Canonicalizes Romanian cedilla letters to comma-below forms, unifies
/// smart quotes, dashes and the ellipsis character, and collapses whitespace:
/// a run containing a line break becomes "\n", any other run becomes " ".
/// Idempotent. The input must be valid UTF-8.
std::string normalize(std::string_view text);

/// Optional lowercasing, then digits -> '@', space/tab -> '_', newline -> '$'.
/// Expects normalized text; other whitespace is mapped too so the output
/// invariant holds for any input.
EncodedText encode(std::string_view normalized, Casing casing);

/// encode(normalize(raw), casing). Logs a warning if the raw text already
/// contains one of the sentinel characters '@', '_' or '$'; they are kept.
EncodedText preprocess(std::string_view raw, Casing casing);

}  // namespace stylo
