"""Training loop, AdaDelta updates, and a finite-difference gradient check."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..core import NePair
from ..errors import ConfigError, DivergenceError
from .model import ModelConfig, Seq2SeqModel
from .vocab import BOS, EOS, UNK, CharVocab

S2T = "s2t"
T2S = "t2s"


def oriented(pairs: Sequence[NePair], direction: str) -> list[tuple[str, str]]:
    """Orient NE pairs as (input, output) strings for one translator."""
    if direction == S2T:
        return [(p.src, p.tgt) for p in pairs]
    if direction == T2S:
        return [(p.tgt, p.src) for p in pairs]
    raise ConfigError(f"direction must be {S2T!r} or {T2S!r}, got {direction!r}")


def make_model(pairs: Sequence[NePair], direction: str, config: ModelConfig) -> Seq2SeqModel:
    """Fresh model with vocabularies built from the oriented training pairs."""
    texts = oriented(pairs, direction)
    if not texts:
        raise ConfigError("cannot build a model from an empty training set")
    src_vocab = CharVocab.from_texts(inp for inp, _ in texts)
    tgt_vocab = CharVocab.from_texts(out for _, out in texts)
    return Seq2SeqModel(config, src_vocab, tgt_vocab)


class AdaDelta:
    """Per-parameter accumulator update (Zeiler 2012) with a global rate."""

    def __init__(self, model: Seq2SeqModel):
        cfg = model.config
        self.model = model
        self.rho = cfg.adadelta_rho
        self.eps = cfg.adadelta_eps
        self.lr = cfg.learning_rate
        self.sq_grad = model.zero_grads()
        self.sq_delta = model.zero_grads()

    def update(self, grads: dict[str, np.ndarray], scale: float = 1.0) -> None:
        rho, eps = self.rho, self.eps
        for name, raw in grads.items():
            g = raw * scale
            eg = self.sq_grad[name]
            ex = self.sq_delta[name]
            eg *= rho
            eg += (1.0 - rho) * g * g
            delta = -np.sqrt(ex + eps) / np.sqrt(eg + eps) * g
            ex *= rho
            ex += (1.0 - rho) * delta * delta
            self.model.params[name] += self.lr * delta


def _pair_nll(model: Seq2SeqModel, src_ids: list[int], out_ids: list[int]) -> tuple[float, int]:
    """Forward-only NLL sum and counted steps; unknown target chars are skipped."""
    enc = model.encode(src_ids)
    att_enc = enc @ model.params["att_u"]
    s = model.initial_state(enc)
    y_prev = BOS
    nll = 0.0
    steps = 0
    for y in out_ids:
        logp, s = model.step(s, y_prev, enc, att_enc)
        if y != UNK:
            nll -= logp[y]
            steps += 1
        y_prev = y
    return nll, steps


def loss_on(model: Seq2SeqModel, texts: Sequence[tuple[str, str]]) -> float:
    """Mean per-character cross-entropy (terminal <eos> steps included)."""
    total = 0.0
    steps = 0
    for inp, out in texts:
        src_ids = model.src_vocab.encode(inp)
        out_ids = model.tgt_vocab.encode(out) + [EOS]
        nll, n = _pair_nll(model, src_ids, out_ids)
        total += nll
        steps += n
    if steps == 0:
        raise ConfigError("no scoreable steps in evaluation set")
    return total / steps


def train(pairs: Sequence[NePair], direction: str, config: ModelConfig,
          dev_pairs: Sequence[NePair] | None = None, *,
          max_epochs: int = 100, patience: int = 5,
          on_epoch: Callable[[int, float, float | None, Seq2SeqModel], bool | None] | None = None,
          ) -> Seq2SeqModel:
    """Train one translator direction; returns the best checkpoint.

    The monitored quantity is dev loss when dev_pairs is given, otherwise the
    epoch's mean training loss. Training stops when the monitor fails to
    improve for `patience` consecutive epochs or at max_epochs. Each pair is
    one update (batch size 1); pair counts are frequencies for the lexical
    table, not training multiplicities. on_epoch may return True to stop
    early, in which case the current (not best) parameters are kept.
    """
    model = make_model(pairs, direction, config)
    texts = oriented(pairs, direction)
    dev_texts = oriented(dev_pairs, direction) if dev_pairs else None
    encoded = [(model.src_vocab.encode(inp), model.tgt_vocab.encode(out) + [EOS])
               for inp, out in texts]

    opt = AdaDelta(model)
    rng = np.random.default_rng(config.seed)
    best = {name: p.copy() for name, p in model.params.items()}
    best_loss = np.inf
    bad_epochs = 0

    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(len(encoded))
        nll_total = 0.0
        step_total = 0
        for idx in order:
            src_ids, out_ids = encoded[idx]
            nll, steps, grads = model.loss_and_grads(src_ids, out_ids[:-1])
            if not np.isfinite(nll):
                raise DivergenceError(f"non-finite training loss in epoch {epoch}")
            opt.update(grads, 1.0 / steps)
            nll_total += nll
            step_total += steps
        train_loss = nll_total / step_total

        dev_loss = loss_on(model, dev_texts) if dev_texts else None
        monitored = dev_loss if dev_loss is not None else train_loss
        if not np.isfinite(monitored):
            raise DivergenceError(f"non-finite monitored loss in epoch {epoch}")

        if on_epoch is not None and on_epoch(epoch, train_loss, dev_loss, model):
            return model

        if monitored < best_loss:
            best_loss = monitored
            best = {name: p.copy() for name, p in model.params.items()}
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= patience:
                break

    model.params = best
    return model


def gradient_check(model: Seq2SeqModel, texts: Sequence[tuple[str, str]],
                   eps: float = 1e-4) -> dict[str, float]:
    """Max relative error between analytic and central-difference gradients.

    Covers every parameter tensor elementwise; the batch loss is the mean
    per-character NLL over `texts`. Relative error for one element is
    |ga - gn| / max(|ga| + |gn|, 1e-6).
    """
    encoded = [(model.src_vocab.encode(inp), model.tgt_vocab.encode(out))
               for inp, out in texts]

    total = model.zero_grads()
    nll_sum = 0.0
    steps_sum = 0
    for src_ids, tgt_ids in encoded:
        nll, steps, grads = model.loss_and_grads(src_ids, tgt_ids)
        nll_sum += nll
        steps_sum += steps
        for name in total:
            total[name] += grads[name]
    analytic = {name: g / steps_sum for name, g in total.items()}

    def batch_loss() -> float:
        acc = 0.0
        for src_ids, tgt_ids in encoded:
            nll, _ = _pair_nll(model, src_ids, tgt_ids + [EOS])
            acc += nll
        return acc / steps_sum

    report: dict[str, float] = {}
    for name, _ in model.param_specs():
        tensor = model.params[name]
        worst = 0.0
        it = np.nditer(tensor, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            saved = tensor[idx]
            tensor[idx] = saved + eps
            up = batch_loss()
            tensor[idx] = saved - eps
            down = batch_loss()
            tensor[idx] = saved
            numeric = (up - down) / (2.0 * eps)
            ga = analytic[name][idx]
            err = abs(ga - numeric) / max(abs(ga) + abs(numeric), 1e-6)
            if err > worst:
                worst = err
            it.iternext()
        report[name] = worst
    return report
