"""Normalization of numeric/temporal expressions for alignment.

There is no entity list to train a translator for numbers and dates, so
N/T expressions are aligned by reducing both sides to a digit skeleton:
number words and numerals for one..nine become ASCII digits, month names
become the month number, and every other character (zero included) is
discarded.  "百分之四点二" and "4.2%" both reduce to "42" and therefore
match exactly.

Rules are data-driven (pattern / replacement / language TSV); the packaged
default covers Chinese and English.  Alphabetic patterns only match at the
start of a letter run, so "seventh" yields "7" while "stone" yields
nothing.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import simdist
from .errors import ParseError

DIGITS = "123456789"

# month number -> display name, used by the restoration fallback rules
MONTH_NAMES = {
    "en": (
        "January", "February", "March", "April", "May", "June",
        "July", "August", "September", "October", "November", "December",
    ),
    "zh": (
        "一月", "二月", "三月", "四月", "五月", "六月",
        "七月", "八月", "九月", "十月", "十一月", "十二月",
    ),
}


def _is_ascii_letter(c: str) -> bool:
    return "a" <= c <= "z" or "A" <= c <= "Z"


@dataclass(frozen=True)
class RuleTable:
    """Longest-pattern-first rewrite table, grouped by language."""

    rules: dict[str, tuple[tuple[str, str], ...]]

    @classmethod
    def from_rows(cls, rows) -> "RuleTable":
        by_lang: dict[str, list[tuple[str, str]]] = {}
        for pattern, replacement, lang in rows:
            by_lang.setdefault(lang, []).append((pattern.lower(), replacement))
        ordered = {
            lang: tuple(sorted(pats, key=lambda pr: (-len(pr[0]), pr[0])))
            for lang, pats in by_lang.items()
        }
        return cls(ordered)

    @classmethod
    def from_path(cls, path) -> "RuleTable":
        rows = []
        for i, line in enumerate(Path(path).read_text(encoding="utf-8-sig").splitlines()):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}", path, i + 1)
            if not cols[0]:
                raise ParseError("empty pattern", path, i + 1)
            rows.append((cols[0], cols[1], cols[2]))
        return cls.from_rows(rows)

    def patterns_for(self, lang: str) -> tuple[tuple[str, str], ...]:
        specific = self.rules.get(lang, ())
        universal = self.rules.get("*", ())
        if not universal:
            return specific
        return tuple(sorted(specific + universal, key=lambda pr: (-len(pr[0]), pr[0])))

    def match_at(self, lowered: str, i: int, patterns) -> tuple[int, str] | None:
        """Longest pattern matching at position i, or None.

        Alphabetic (ASCII-letter) patterns require a word start: they do
        not match right after another ASCII letter.
        """
        for pattern, replacement in patterns:
            end = i + len(pattern)
            if lowered[i:end] != pattern:
                continue
            if _is_ascii_letter(pattern[0]) and i > 0 and _is_ascii_letter(lowered[i - 1]):
                continue
            return len(pattern), replacement
        return None


@lru_cache(maxsize=1)
def default_rules() -> RuleTable:
    ref = resources.files("netrans.data").joinpath("numnorm_rules.tsv")
    with resources.as_file(ref) as path:
        return RuleTable.from_path(path)


def normalize_numeric(s: str, lang: str, table: RuleTable | None = None) -> str:
    """Reduce an expression to its digit skeleton over the alphabet 1-9."""
    table = table or default_rules()
    patterns = table.patterns_for(lang)
    lowered = unicodedata.normalize("NFC", s).lower()
    out: list[str] = []
    i = 0
    n = len(lowered)
    while i < n:
        hit = table.match_at(lowered, i, patterns)
        if hit is None:
            i += 1
            continue
        length, replacement = hit
        out.append(replacement)
        i += length
    return "".join(c for c in "".join(out) if c in DIGITS)


def nt_similarity(
    src: str, src_lang: str, tgt: str, tgt_lang: str, table: RuleTable | None = None
) -> float:
    """Similarity of two N/T expressions via their digit skeletons.

    Returns 0.0 when either skeleton is empty; no trained translator is
    involved.
    """
    a = normalize_numeric(src, src_lang, table)
    b = normalize_numeric(tgt, tgt_lang, table)
    if not a or not b:
        return 0.0
    return simdist.similarity(a, b)


def month_number(s: str, lang: str) -> int | None:
    """Month index 1-12 when the whole (folded) string names a month."""
    folded = unicodedata.normalize("NFC", s).strip().lower().rstrip(".")
    names = MONTH_NAMES.get(lang, ())
    for idx, name in enumerate(names, start=1):
        if folded == name.lower():
            return idx
    if lang == "en" and len(folded) >= 3:
        for idx, name in enumerate(names, start=1):
            if name.lower().startswith(folded) and len(folded) <= 4:
                return idx
    return None


def month_name(number: int, lang: str) -> str | None:
    names = MONTH_NAMES.get(lang)
    if names is None or not 1 <= number <= 12:
        return None
    return names[number - 1]
