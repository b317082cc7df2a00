#!/usr/bin/env python3
# Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
"""Regenerates src/unicode_tables.inc from Python's unicodedata."""
import sys
import unicodedata


def ranges(pred):
    out, start = [], None
    for cp in range(0x110000):
        hit = pred(cp)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, 0x10FFFF))
    return out


def is_punct(cp):
    c = chr(cp)
    if cp < 128:
        return c.isprintable() and not c.isalnum() and c != " "
    return unicodedata.category(c).startswith("P")


def is_space(cp):
    return chr(cp) in " \t\n\r" or unicodedata.category(chr(cp)) == "Zs"


def is_control(cp):
    c = chr(cp)
    if c in "\t\n\r":
        return False
    return unicodedata.category(c) in ("Cc", "Cf")


def lower_pairs():
    pairs = []
    for cp in range(0x110000):
        c = chr(cp)
        lo = c.lower()
        if len(lo) == 1 and lo != c:
            pairs.append((cp, ord(lo)))
    return pairs


def emit(name, rs, f):
    f.write(f"constexpr CodeRange {name}[] = {{\n")
    for a, b in rs:
        f.write(f"    {{0x{a:X}, 0x{b:X}}},\n")
    f.write("};\n\n")


def main(path):
    with open(path, "w") as f:
        f.write("// Generated by tools/gen_unicode_tables.py (Unicode "
                f"{unicodedata.unidata_version}). Do not edit.\n\n")
        emit("kPunctuation", ranges(is_punct), f)
        emit("kWhitespace", ranges(is_space), f)
        emit("kControl", ranges(is_control), f)
        f.write("constexpr CasePair kLowercase[] = {\n")
        for a, b in lower_pairs():
            f.write(f"    {{0x{a:X}, 0x{b:X}}},\n")
        f.write("};\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc")
