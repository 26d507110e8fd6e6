"""Beam-search decoding producing k-best candidate translations."""

from __future__ import annotations

import math

from ..errors import ConfigError, DegenerateInputError
from .model import Seq2SeqModel
from .vocab import BOS, EOS


def translate(model: Seq2SeqModel, src: str, beam_width: int = 5,
              max_len: int | None = None) -> list[tuple[str, float]]:
    """K-best target strings with exact summed step log-probs, best first.

    Hypotheses finish at <eos> (scored including that step) or when they hit
    max_len, in which case the score covers only the emitted characters.
    Width 1 reduces to greedy decoding; ties break toward the lower
    character id, matching argmax.
    """
    if beam_width < 1:
        raise ConfigError(f"beam_width must be >= 1, got {beam_width}")
    if not src:
        raise DegenerateInputError("cannot translate an empty source string")
    if max_len is None:
        max_len = model.config.max_decode_len

    enc = model.encode(model.src_vocab.encode(src))
    att_enc = enc @ model.params["att_u"]
    s0 = model.initial_state(enc)

    # live hypothesis: (ids tuple, logprob, state, previous id)
    live = [((), 0.0, s0, BOS)]
    finished: list[tuple[float, tuple[int, ...]]] = []

    for _ in range(max_len):
        expansions = []
        for ids, lp, state, y_prev in live:
            logp, s_new = model.step(state, y_prev, enc, att_enc)
            for y in range(len(logp)):
                step_lp = logp[y]
                if not math.isfinite(step_lp):
                    continue
                expansions.append((ids + (y,), lp + step_lp, s_new))
        expansions.sort(key=lambda item: (-item[1], item[0]))
        live = []
        for ids, lp, s_new in expansions[:beam_width]:
            if ids[-1] == EOS:
                finished.append((lp, ids[:-1]))
            else:
                live.append((ids, lp, s_new, ids[-1]))
        if not live:
            break

    # anything still alive ran into the length cap; keep its raw score
    for ids, lp, _, _ in live:
        finished.append((lp, ids))

    finished.sort(key=lambda item: (-item[0], item[1]))
    return [(model.tgt_vocab.decode(ids), float(lp))
            for lp, ids in finished[:beam_width]]
