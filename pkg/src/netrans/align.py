"""Bidirectional entity alignment over a parallel corpus.

Recognized entities on one side are translated (k-best) and compared with
every word sequence up to `max_ngram` tokens on the other side; the final
result is the union of both directions, so an entity missed by one
recognizer can still be aligned through the other. Numeric/temporal spans
skip the translator and match on digit skeletons instead.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from . import numnorm, simdist
from .core import NePair, NeSpan, NeType, SentencePair, _read_lines
from .errors import ConfigError, ContractError, ParseError
from .ner import Recognizer

log = logging.getLogger(__name__)

S2T = "s2t"
T2S = "t2s"
BOTH = "both"
DIRECTIONS = (BOTH, S2T, T2S)

# k-best: text -> [(candidate, logprob), ...]
Translator = Callable[[str], list[tuple[str, float]]]


@dataclass(frozen=True)
class AlignConfig:
    sim_threshold: float = 0.6
    max_ngram: int = 3
    beam_width: int = 5
    directions: str = BOTH

    def __post_init__(self):
        if not 0.0 < self.sim_threshold <= 1.0:
            raise ConfigError(f"sim_threshold must lie in (0, 1], got {self.sim_threshold}")
        if self.max_ngram < 1:
            raise ConfigError(f"max_ngram must be >= 1, got {self.max_ngram}")
        if self.beam_width < 1:
            raise ConfigError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.directions not in DIRECTIONS:
            raise ConfigError(f"directions must be one of {DIRECTIONS}, got {self.directions!r}")


@dataclass(frozen=True)
class AlignedPair:
    """One aligned entity: a source token range linked to a target range."""

    sentence_id: int
    src_start: int
    src_end: int
    tgt_start: int
    tgt_end: int
    ne_type: NeType
    score: float
    direction: str


def match_span(ne: NeSpan, candidates: Sequence[tuple[str, float]],
               other_tokens: Sequence[str], cfg: AlignConfig, *,
               ne_lang: str, other_lang: str) -> tuple[int, int, float] | None:
    """Best-scoring token range for one entity, or None below threshold.

    Ties prefer the shorter range, then the leftmost, then the higher-ranked
    candidate.
    """
    if ne.ne_type is NeType.NT:
        scored = [(ne.surface, 0.0)]
    else:
        scored = [(c, lp) for c, lp in candidates if c]
        if not scored:
            raise ConfigError(
                f"no translation candidates for {ne.ne_type.value} span {ne.surface!r}")

    n = len(other_tokens)
    best = None
    best_key = None
    for start in range(n):
        for end in range(start + 1, min(start + cfg.max_ngram, n) + 1):
            text = " ".join(other_tokens[start:end])
            for rank, (cand, _) in enumerate(scored):
                if ne.ne_type is NeType.NT:
                    score = numnorm.nt_similarity(ne.surface, ne_lang, text, other_lang)
                else:
                    score = simdist.similarity(cand, text)
                if score < cfg.sim_threshold:
                    continue
                key = (-score, end - start, start, rank)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (start, end, score)
    return best


def _spans_for(pair: SentencePair, spans: Sequence[NeSpan], side: str) -> list[NeSpan]:
    out = []
    for s in spans:
        if s.sentence_id != pair.id or s.side != side:
            raise ContractError(
                f"span for sentence {s.sentence_id}/{s.side} handed to "
                f"sentence {pair.id}/{side}")
        out.append(s)
    return out


def _overlaps(a_start: int, a_end: int, b_start: int, b_end: int) -> bool:
    return a_start < b_end and b_start < a_end


def align_sentence_pair(pair: SentencePair, src_spans: Sequence[NeSpan],
                        tgt_spans: Sequence[NeSpan], cfg: AlignConfig,
                        s2t: Translator | None = None,
                        t2s: Translator | None = None) -> list[AlignedPair]:
    """Union of both matching directions for one sentence pair.

    Matches whose source and target ranges both overlap collapse into a
    single direction="both" pair keeping each direction's recognized span
    and the higher score. Remaining conflicts are resolved score-first
    (then s2t before t2s), one link per token on either side.
    """
    src_spans = _spans_for(pair, src_spans, "source")
    tgt_spans = _spans_for(pair, tgt_spans, "target")

    fwd: list[AlignedPair] = []
    if cfg.directions in (BOTH, S2T):
        for ne in src_spans:
            cands = _candidates(ne, s2t, S2T)
            hit = match_span(ne, cands, pair.tgt.tokens, cfg,
                             ne_lang=pair.src.lang, other_lang=pair.tgt.lang)
            if hit:
                start, end, score = hit
                fwd.append(AlignedPair(pair.id, ne.start, ne.end, start, end,
                                       ne.ne_type, score, S2T))

    rev: list[AlignedPair] = []
    if cfg.directions in (BOTH, T2S):
        for ne in tgt_spans:
            cands = _candidates(ne, t2s, T2S)
            hit = match_span(ne, cands, pair.src.tokens, cfg,
                             ne_lang=pair.tgt.lang, other_lang=pair.src.lang)
            if hit:
                start, end, score = hit
                rev.append(AlignedPair(pair.id, start, end, ne.start, ne.end,
                                       ne.ne_type, score, T2S))

    pool = _merge_directions(fwd, rev)

    rank = {BOTH: 0, S2T: 1, T2S: 2}
    pool.sort(key=lambda a: (-a.score, rank[a.direction], a.src_start, a.tgt_start))
    taken_src: set[int] = set()
    taken_tgt: set[int] = set()
    accepted = []
    for a in pool:
        src_range = range(a.src_start, a.src_end)
        tgt_range = range(a.tgt_start, a.tgt_end)
        if taken_src.intersection(src_range) or taken_tgt.intersection(tgt_range):
            continue
        taken_src.update(src_range)
        taken_tgt.update(tgt_range)
        accepted.append(a)

    accepted.sort(key=lambda a: (a.src_start, a.tgt_start))
    return accepted


def _candidates(ne: NeSpan, translator: Translator | None, direction: str):
    if ne.ne_type is NeType.NT:
        return []
    if translator is None:
        raise ConfigError(
            f"{ne.ne_type.value} span {ne.surface!r} needs a {direction} translator")
    return translator(ne.surface)


def _merge_directions(fwd: list[AlignedPair], rev: list[AlignedPair]) -> list[AlignedPair]:
    used_rev: set[int] = set()
    pool: list[AlignedPair] = []
    for a in fwd:
        partner = None
        partner_key = None
        for j, b in enumerate(rev):
            if j in used_rev:
                continue
            if not _overlaps(a.src_start, a.src_end, b.src_start, b.src_end):
                continue
            if not _overlaps(a.tgt_start, a.tgt_end, b.tgt_start, b.tgt_end):
                continue
            if a.ne_type != b.ne_type:
                log.info("sentence %d: type disagreement %s/%s at src %d-%d, not merged",
                         a.sentence_id, a.ne_type.value, b.ne_type.value,
                         a.src_start, a.src_end)
                continue
            key = (-b.score, b.tgt_start)
            if partner_key is None or key < partner_key:
                partner_key = key
                partner = j
        if partner is None:
            pool.append(a)
        else:
            used_rev.add(partner)
            b = rev[partner]
            # keep each direction's recognized span, drop the fuzzy matched ranges
            pool.append(AlignedPair(a.sentence_id, a.src_start, a.src_end,
                                    b.tgt_start, b.tgt_end, a.ne_type,
                                    max(a.score, b.score), BOTH))
    pool.extend(b for j, b in enumerate(rev) if j not in used_rev)
    return pool


# -- corpus-level driver --------------------------------------------------

_WORKER_STATE: dict = {}


def _init_worker(recognizer, cfg, s2t, t2s) -> None:
    _WORKER_STATE["recognizer"] = recognizer
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["s2t"] = s2t
    _WORKER_STATE["t2s"] = t2s


def _align_one(pair: SentencePair) -> list[AlignedPair]:
    recognizer = _WORKER_STATE["recognizer"]
    src_spans = recognizer.recognize(pair.src, pair.id, "source")
    tgt_spans = recognizer.recognize(pair.tgt, pair.id, "target")
    return align_sentence_pair(pair, src_spans, tgt_spans, _WORKER_STATE["cfg"],
                               _WORKER_STATE["s2t"], _WORKER_STATE["t2s"])


def align_corpus(corpus: Sequence[SentencePair], recognizer: Recognizer,
                 cfg: AlignConfig, s2t: Translator | None = None,
                 t2s: Translator | None = None, jobs: int = 1,
                 ) -> tuple[list[AlignedPair], list[NePair]]:
    """Align every sentence pair and aggregate the extracted entity pairs.

    jobs > 1 fans sentences out to worker processes; outputs are identical
    for any job count because results are consumed in corpus order.
    """
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if jobs == 1:
        _init_worker(recognizer, cfg, s2t, t2s)
        per_sentence = [_align_one(pair) for pair in corpus]
    else:
        chunk = max(1, len(corpus) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(recognizer, cfg, s2t, t2s)) as pool:
            per_sentence = list(pool.map(_align_one, corpus, chunksize=chunk))

    alignments: list[AlignedPair] = []
    counts: dict[tuple[str, str, NeType], int] = {}
    for pair, found in zip(corpus, per_sentence):
        for a in found:
            alignments.append(a)
            src_surface = " ".join(pair.src.tokens[a.src_start:a.src_end])
            tgt_surface = " ".join(pair.tgt.tokens[a.tgt_start:a.tgt_end])
            counts[(src_surface, tgt_surface, a.ne_type)] = (
                counts.get((src_surface, tgt_surface, a.ne_type), 0) + 1)

    ne_pairs = [NePair(src, tgt, ne_type, count)
                for (src, tgt, ne_type), count in counts.items()]
    ne_pairs.sort(key=lambda p: (-p.count, p.src, p.tgt, p.ne_type.value))
    return alignments, ne_pairs


# -- translators and file formats ------------------------------------------

_MODEL_CACHE: dict = {}


@dataclass(frozen=True)
class ModelTranslator:
    """K-best translator backed by a model file; loads lazily per process."""

    path: str
    beam_width: int = 5

    def __call__(self, text: str) -> list[tuple[str, float]]:
        from .neural import beam, io

        model = _MODEL_CACHE.get(self.path)
        if model is None:
            model = io.load_model(self.path)
            _MODEL_CACHE[self.path] = model
        return beam.translate(model, text, self.beam_width)


def write_alignments(alignments: Sequence[AlignedPair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in alignments:
            fh.write(f"{a.sentence_id}\t{a.src_start}\t{a.src_end}"
                     f"\t{a.tgt_start}\t{a.tgt_end}\t{a.ne_type.value}"
                     f"\t{a.score:.6f}\t{a.direction}\n")


def read_alignments(path) -> list[AlignedPair]:
    out = []
    for i, line in enumerate(_read_lines(path)):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 8:
            raise ParseError(f"expected 8 tab-separated columns, got {len(cols)}", path, i + 1)
        try:
            if cols[7] not in DIRECTIONS:
                raise ValueError(f"unknown direction {cols[7]!r}")
            out.append(AlignedPair(int(cols[0]), int(cols[1]), int(cols[2]),
                                   int(cols[3]), int(cols[4]), NeType.parse(cols[5]),
                                   float(cols[6]), cols[7]))
        except ValueError as exc:
            raise ParseError(str(exc), path, i + 1) from None
    return out
