#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from Python's unicodedata.

Emits three sorted tables consumed by src/unicode.cpp:
  - simple lowercase mapping (code point -> single code point)
  - decimal digit ranges (general category Nd)
  - space separator ranges (general category Zs)

Usage: python3 scripts/gen_unicode_tables.py > src/unicode_tables.inc
"""
import sys
import unicodedata


def ranges(pred):
    out, start = [], None
    for cp in range(0x110000):
        if pred(cp):
            if start is None:
                start = cp
        elif start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, 0x10FFFF))
    return out


def main():
    lower = []
    for cp in range(0x110000):
        low = chr(cp).lower()
        if len(low) == 1 and low != chr(cp):
            lower.append((cp, ord(low)))
    # U+0130 has only a multi-character full mapping; its simple mapping is U+0069.
    lower.append((0x130, 0x69))
    lower.sort()

    digits = ranges(lambda cp: unicodedata.category(chr(cp)) == "Nd")
    spaces = ranges(lambda cp: unicodedata.category(chr(cp)) == "Zs")

    w = sys.stdout.write
    w("// Generated by scripts/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
      % unicodedata.unidata_version)
    w("// NOLINTBEGIN\n")
    w("static constexpr CaseMapping kLowerTable[] = {\n")
    for a, b in lower:
        w("    {0x%04X, 0x%04X},\n" % (a, b))
    w("};\n\n")
    for name, table in (("kDecimalDigitRanges", digits), ("kSpaceSeparatorRanges", spaces)):
        w("static constexpr CodePointRange %s[] = {\n" % name)
        for a, b in table:
            w("    {0x%04X, 0x%04X},\n" % (a, b))
        w("};\n\n")
    w("// NOLINTEND\n")


if __name__ == "__main__":
    main()
