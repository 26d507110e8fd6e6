"""Entity recognition plug points.

The toolkit never trains a recognizer. Sentences are tagged either by
replaying externally produced stand-off annotations or, for self-contained
runs, by a gazetteer plus numeric/temporal token rules.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Protocol

from .core import NeSpan, NeType, Sentence, _read_lines
from .errors import AnnotationError, ParseError
from .numnorm import RuleTable, default_rules, month_number, normalize_numeric

log = logging.getLogger(__name__)


class Recognizer(Protocol):
    def recognize(self, sentence: Sentence, sentence_id: int, side: str) -> list[NeSpan]:
        """In-bounds, non-overlapping spans sorted by start position."""
        ...


@dataclass(frozen=True)
class Gazetteer:
    """Fixed surface list plus numeric/temporal token rules.

    Matching is longest-entry-first (ties to the leftmost occurrence), then
    maximal runs of numeric or month tokens over the uncovered remainder
    become NT spans.
    """

    entries: dict[tuple[str, ...], NeType]
    nt_rules: RuleTable = field(default_factory=default_rules)

    def __post_init__(self):
        for key in self.entries:
            if not key or any(not tok for tok in key):
                raise ValueError(f"gazetteer entry with empty tokens: {key!r}")

    @classmethod
    def from_path(cls, path) -> "Gazetteer":
        entries: dict[tuple[str, ...], NeType] = {}
        dropped_org = 0
        for i, line in enumerate(_read_lines(path)):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ParseError(f"expected 2 tab-separated columns, got {len(cols)}", path, i + 1)
            surface, type_text = cols
            if type_text.strip().upper() == "ORG":
                dropped_org += 1
                continue
            key = tuple(surface.split())
            if not key:
                raise ParseError("empty gazetteer surface", path, i + 1)
            try:
                ne_type = NeType.parse(type_text)
            except ValueError as exc:
                raise ParseError(str(exc), path, i + 1) from None
            if entries.get(key, ne_type) != ne_type:
                raise ParseError(f"conflicting types for {surface!r}", path, i + 1)
            entries[key] = ne_type
        if dropped_org:
            log.warning("%s: dropped %d ORG entr(ies)", path, dropped_org)
        return cls(entries)

    def _is_nt_token(self, token: str, lang: str) -> bool:
        if normalize_numeric(token, lang, self.nt_rules):
            return True
        return month_number(token, lang) is not None

    def recognize(self, sentence: Sentence, sentence_id: int, side: str) -> list[NeSpan]:
        tokens = sentence.tokens
        n = len(tokens)
        matches = []
        for (key, ne_type) in self.entries.items():
            width = len(key)
            for start in range(0, n - width + 1):
                if tuple(tokens[start:start + width]) == key:
                    matches.append((start, width, ne_type))
        matches.sort(key=lambda m: (-m[1], m[0]))

        covered = [False] * n
        spans = []
        for start, width, ne_type in matches:
            if any(covered[start:start + width]):
                continue
            for j in range(start, start + width):
                covered[j] = True
            spans.append(NeSpan(sentence_id, side, start, start + width, ne_type))

        i = 0
        while i < n:
            if covered[i] or not self._is_nt_token(tokens[i], sentence.lang):
                i += 1
                continue
            j = i
            while j < n and not covered[j] and self._is_nt_token(tokens[j], sentence.lang):
                j += 1
            spans.append(NeSpan(sentence_id, side, i, j, NeType.NT))
            i = j

        spans.sort(key=lambda s: s.start)
        return [s.with_surface(sentence) for s in spans]


class AnnotationRecognizer:
    """Replays stand-off spans, keyed by sentence id and side."""

    def __init__(self, spans: Iterable[NeSpan]):
        self._stored: dict[tuple[int, str], list[NeSpan]] = {}
        for span in spans:
            self._stored.setdefault((span.sentence_id, span.side), []).append(span)
        for (sid, _), group in self._stored.items():
            group.sort(key=lambda s: (s.start, s.end))
            for a, b in zip(group, group[1:]):
                if b.start < a.end:
                    raise AnnotationError(
                        f"sentence {sid}: overlapping spans "
                        f"[{a.start}, {a.end}) and [{b.start}, {b.end})")

    def recognize(self, sentence: Sentence, sentence_id: int, side: str) -> list[NeSpan]:
        stored = self._stored.get((sentence_id, side), [])
        # with_surface re-checks bounds, so stale annotations fail loudly here
        return [s.with_surface(sentence) for s in stored]
