#!/usr/bin/env python3
"""Regenerates include/mgt/detail/unicode_tables.inc from Python's unicodedata."""
import sys
import unicodedata


def ranges(pred):
    out, start, prev = [], None, None
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if pred(cp):
            if start is None:
                start = cp
            prev = cp
        elif start is not None:
            out.append((start, prev))
            start = None
    if start is not None:
        out.append((start, prev))
    return out


def emit_ranges(name, rs, f):
    f.write(f"inline constexpr CodeRange {name}[] = {{\n")
    for lo, hi in rs:
        f.write(f"    {{0x{lo:X}, 0x{hi:X}}},\n")
    f.write("};\n\n")


def main(path):
    letters = ranges(lambda cp: unicodedata.category(chr(cp)).startswith("L"))
    digits = ranges(lambda cp: unicodedata.category(chr(cp)) == "Nd")
    spaces = ranges(lambda cp: chr(cp).isspace())
    lower = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        lo = chr(cp).lower()
        if len(lo) == 1 and ord(lo) != cp:
            lower.append((cp, ord(lo)))
    with open(path, "w", encoding="ascii") as f:
        f.write(f"// Generated by tools/gen_unicode_tables.py (Unicode {unicodedata.unidata_version}).\n")
        f.write("// Do not edit by hand.\n\n")
        emit_ranges("kLetterRanges", letters, f)
        emit_ranges("kDigitRanges", digits, f)
        emit_ranges("kSpaceRanges", spaces, f)
        f.write("inline constexpr CodeMapping kLowercaseMap[] = {\n")
        for a, b in lower:
            f.write(f"    {{0x{a:X}, 0x{b:X}}},\n")
        f.write("};\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/mgt/detail/unicode_tables.inc")
