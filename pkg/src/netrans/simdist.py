"""Edit distance, longest common subsequence, and similarity scoring.

The edit distance here is *indel-only* (insertions and deletions, no
substitutions), which ties the two quantities together exactly:

    lcs_length(a, b) == (len(a) + len(b) - edit_distance_indel(a, b)) / 2

A Levenshtein distance with substitutions would break that identity.

The similarity of a translation candidate ``c`` against a text fragment
``t`` is lcs(c, t) / len(c), an asymmetric score in [0, 1].  Candidate and
fragment are NFC-normalized and lowercased before comparison, so
"Berlin" and "berlin" match; lcs_length and edit_distance_indel themselves
compare raw scalar sequences.

At import time the compiled kernel (built from _simdist_c.pyx) is
preferred; the pure-Python kernel is a drop-in fallback.  ``BACKEND``
names the active one.
"""

from __future__ import annotations

import unicodedata

from . import _simdist_py
from .errors import DegenerateInputError, LengthLimitError

try:
    from . import _simdist_c as _kernel

    BACKEND = "c"
except ImportError:  # pragma: no cover - depends on build environment
    _kernel = _simdist_py
    BACKEND = "python"

MAX_CHARS = 1024


def _check_lengths(a: str, b: str) -> None:
    if len(a) > MAX_CHARS or len(b) > MAX_CHARS:
        raise LengthLimitError(
            f"input of {max(len(a), len(b))} chars exceeds the {MAX_CHARS}-char limit"
        )


def lcs_length(a: str, b: str) -> int:
    """Length of the longest common subsequence of two strings."""
    _check_lengths(a, b)
    return _kernel.lcs_length(a, b)


def edit_distance_indel(a: str, b: str) -> int:
    """Minimal number of single-character insertions and deletions turning a into b."""
    _check_lengths(a, b)
    return _kernel.edit_distance_indel(a, b)


def fold(s: str) -> str:
    """Comparison form used for similarity: NFC normalization + lowercase."""
    return unicodedata.normalize("NFC", s).lower()


def similarity(candidate: str, target: str) -> float:
    """lcs(candidate, target) / len(candidate) on folded strings.

    Asymmetric by design: the candidate is the translated entity, the
    target is the corpus fragment it is checked against.
    """
    c = fold(candidate)
    t = fold(target)
    if not c:
        raise DegenerateInputError("similarity candidate must be non-empty")
    _check_lengths(c, t)
    return _kernel.lcs_length(c, t) / len(c)
