#!/usr/bin/env python3
# Copyright 2026 The Anuvaad Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates include/anuvaad/metrics/unicode_tables.hpp.

Character classes are taken from the `regex` module (the engine used by the
reference BLEU tokenizer) so that \\p{P}, \\p{N} and \\p{S} agree exactly.
Whitespace follows Python's str.isspace(); case folding follows str.casefold().
"""
import sys

import regex

MAX_CP = 0x110000


def ranges(pred):
    out = []
    start = None
    for cp in range(MAX_CP):
        hit = pred(cp)
        if hit and start is None:
            start = cp
        elif not hit and start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def emit_ranges(name, rs):
    lines = [f"inline constexpr CodepointRange {name}[] = {{"]
    row = []
    for lo, hi in rs:
        row.append(f"{{0x{lo:X}, 0x{hi:X}}}")
        if len(row) == 6:
            lines.append("    " + ", ".join(row) + ",")
            row = []
    if row:
        lines.append("    " + ", ".join(row) + ",")
    lines.append("};")
    return "\n".join(lines)


def main(path):
    def cls(prop):
        pat = regex.compile(r"\p{%s}" % prop)
        return lambda cp: not (0xD800 <= cp <= 0xDFFF) and pat.match(chr(cp)) is not None

    punct = ranges(cls("P"))
    number = ranges(cls("N"))
    symbol = ranges(cls("S"))
    space = ranges(lambda cp: not (0xD800 <= cp <= 0xDFFF) and chr(cp).isspace())

    folds = []
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        c = chr(cp)
        f = c.casefold()
        if f != c:
            assert len(f) <= 3
            folds.append((cp, [ord(x) for x in f]))

    fold_lines = ["inline constexpr CaseFold kCaseFold[] = {"]
    for cp, seq in folds:
        padded = seq + [0] * (3 - len(seq))
        fold_lines.append(
            f"    {{0x{cp:X}, {len(seq)}, {{0x{padded[0]:X}, 0x{padded[1]:X}, 0x{padded[2]:X}}}}},")
    fold_lines.append("};")

    header = f"""// Copyright 2026 The Anuvaad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// GENERATED by scripts/gen_unicode_tables.py -- do not edit.
// regex {regex.__version__}, Python {sys.version.split()[0]}

#pragma once

#include <cstdint>

namespace anuvaad::unicode_tables {{

struct CodepointRange {{
  char32_t lo;
  char32_t hi;
}};

struct CaseFold {{
  char32_t cp;
  std::uint8_t len;
  char32_t to[3];
}};

// General category P (punctuation).
{emit_ranges("kPunctuation", punct)}

// General category N (numbers).
{emit_ranges("kNumber", number)}

// General category S (symbols).
{emit_ranges("kSymbol", symbol)}

// Python str.isspace().
{emit_ranges("kWhitespace", space)}

// Python str.casefold(), sorted by code point.
{chr(10).join(fold_lines)}

}}  // namespace anuvaad::unicode_tables
"""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "include/anuvaad/metrics/unicode_tables.hpp")
