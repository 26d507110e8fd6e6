"""Bilingual named-entity translation, alignment, and placeholder rewriting."""

from .core import NePair, NeSpan, NeType, Sentence, SentencePair

__version__ = "0.1.0"

__all__ = [
    "NePair",
    "NeSpan",
    "NeType",
    "Sentence",
    "SentencePair",
    "__version__",
]
