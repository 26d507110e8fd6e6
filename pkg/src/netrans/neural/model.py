"""Character-level attention encoder-decoder for entity transliteration.

The network reads a source string one character at a time with a
bidirectional gated recurrent encoder, then emits target characters from a
gated recurrent decoder that attends over all encoder states at every step
(additive scoring: v . tanh(W s + U h_j)).

Everything is float64 numpy, batch size 1. The backward pass is written out
by hand next to the forward pass it mirrors; `loss_and_grads` returns
unnormalized sums so callers can weight batches however they like.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DegenerateInputError, ShapeError, VocabError
from .vocab import BOS, EOS, PAD, UNK, CharVocab

# Ids the decoder must never emit. Their logits are pinned to -inf so every
# step distribution spreads all mass over real characters plus <eos>.
_MASKED_IDS = (BOS, UNK, PAD)

_INIT_SCALE = 0.08


@dataclass(frozen=True)
class ModelConfig:
    hidden_size: int = 64
    embed_size: int = 32
    max_decode_len: int = 64
    learning_rate: float = 1e-4
    adadelta_rho: float = 0.95
    adadelta_eps: float = 1e-6
    seed: int = 42

    def __post_init__(self):
        if self.hidden_size < 1 or self.embed_size < 1 or self.max_decode_len < 1:
            raise ConfigError("model sizes must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not 0.0 < self.adadelta_rho < 1.0:
            raise ConfigError("adadelta_rho must lie in (0, 1)")
        if self.adadelta_eps <= 0:
            raise ConfigError("adadelta_eps must be positive")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    # Masked entries are -inf; exp(-inf) underflows cleanly to 0.
    shifted = logits - np.max(logits)
    return shifted - np.log(np.exp(shifted).sum())


def _gru_forward(p: dict, prefix: str, x: np.ndarray, h: np.ndarray):
    z = _sigmoid(x @ p[prefix + "_wz"] + h @ p[prefix + "_uz"] + p[prefix + "_bz"])
    r = _sigmoid(x @ p[prefix + "_wr"] + h @ p[prefix + "_ur"] + p[prefix + "_br"])
    rh = r * h
    hh = np.tanh(x @ p[prefix + "_wh"] + rh @ p[prefix + "_uh"] + p[prefix + "_bh"])
    h_new = (1.0 - z) * h + z * hh
    return h_new, (x, h, z, r, rh, hh)


def _gru_backward(p: dict, prefix: str, cache, d_new: np.ndarray, g: dict):
    """Backprop one cell. Returns (d_input, d_prev_state)."""
    x, h, z, r, rh, hh = cache
    dz = d_new * (hh - h)
    dhh = d_new * z
    dh = d_new * (1.0 - z)

    dph = dhh * (1.0 - hh * hh)
    g[prefix + "_wh"] += np.outer(x, dph)
    g[prefix + "_uh"] += np.outer(rh, dph)
    g[prefix + "_bh"] += dph
    dx = p[prefix + "_wh"] @ dph
    drh = p[prefix + "_uh"] @ dph
    dr = drh * h
    dh += drh * r

    dpz = dz * z * (1.0 - z)
    dpr = dr * r * (1.0 - r)
    g[prefix + "_wz"] += np.outer(x, dpz)
    g[prefix + "_uz"] += np.outer(h, dpz)
    g[prefix + "_bz"] += dpz
    g[prefix + "_wr"] += np.outer(x, dpr)
    g[prefix + "_ur"] += np.outer(h, dpr)
    g[prefix + "_br"] += dpr
    dx += p[prefix + "_wz"] @ dpz + p[prefix + "_wr"] @ dpr
    dh += p[prefix + "_uz"] @ dpz + p[prefix + "_ur"] @ dpr
    return dx, dh


def _gru_specs(prefix: str, in_size: int, hidden: int) -> list[tuple[str, tuple]]:
    specs = []
    for gate in ("z", "r", "h"):
        specs.append((f"{prefix}_w{gate}", (in_size, hidden)))
        specs.append((f"{prefix}_u{gate}", (hidden, hidden)))
        specs.append((f"{prefix}_b{gate}", (hidden,)))
    return specs


class Seq2SeqModel:
    """Bidirectional GRU encoder + attention GRU decoder over characters."""

    def __init__(self, config: ModelConfig, src_vocab: CharVocab,
                 tgt_vocab: CharVocab, params: dict[str, np.ndarray] | None = None):
        self.config = config
        self.src_vocab = src_vocab
        self.tgt_vocab = tgt_vocab
        if params is None:
            params = self._init_params()
        else:
            self._check_shapes(params)
        self.params = params

    # -- parameter bookkeeping ------------------------------------------

    def param_specs(self) -> list[tuple[str, tuple]]:
        """Fixed name/shape table; iteration order is the on-disk order."""
        h = self.config.hidden_size
        e = self.config.embed_size
        dec_in = e + 2 * h
        specs: list[tuple[str, tuple]] = [
            ("src_emb", (len(self.src_vocab), e)),
            ("tgt_emb", (len(self.tgt_vocab), e)),
        ]
        specs += _gru_specs("enc_f", e, h)
        specs += _gru_specs("enc_b", e, h)
        specs += [
            ("att_w", (h, h)),
            ("att_u", (2 * h, h)),
            ("att_v", (h,)),
            ("init_w", (2 * h, h)),
            ("init_b", (h,)),
        ]
        specs += _gru_specs("dec", dec_in, h)
        specs += [
            ("out_w", (3 * h + e, len(self.tgt_vocab))),
            ("out_b", (len(self.tgt_vocab),)),
        ]
        return specs

    def _init_params(self) -> dict[str, np.ndarray]:
        rng = np.random.default_rng(self.config.seed)
        params = {}
        for name, shape in self.param_specs():
            last = name.rsplit("_", 1)[-1]
            if last.startswith("b"):
                params[name] = np.zeros(shape)
            else:
                params[name] = rng.uniform(-_INIT_SCALE, _INIT_SCALE, size=shape)
        return params

    def _check_shapes(self, params: dict[str, np.ndarray]) -> None:
        specs = dict(self.param_specs())
        if set(params) != set(specs):
            missing = sorted(set(specs) - set(params))
            extra = sorted(set(params) - set(specs))
            raise ShapeError(f"parameter names do not match: missing {missing}, extra {extra}")
        for name, shape in specs.items():
            if params[name].shape != shape:
                raise ShapeError(
                    f"{name}: expected shape {shape}, got {params[name].shape}")

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {name: np.zeros(shape) for name, shape in self.param_specs()}

    # -- encoder ---------------------------------------------------------

    def encode(self, src_ids) -> np.ndarray:
        """Encoder states, one row of width 2*hidden per source position."""
        enc, _, _ = self._encode_cached(src_ids)
        return enc

    def _encode_cached(self, src_ids):
        src_ids = list(src_ids)
        if not src_ids:
            raise DegenerateInputError("cannot encode an empty source sequence")
        n_src = len(self.src_vocab)
        for i in src_ids:
            if not 0 <= i < n_src:
                raise VocabError(f"source id {i} outside vocabulary of size {n_src}")
        p = self.params
        h_size = self.config.hidden_size
        m = len(src_ids)
        xs = [p["src_emb"][i] for i in src_ids]

        fwd = np.zeros((m, h_size))
        caches_f = []
        h = np.zeros(h_size)
        for t in range(m):
            h, cache = _gru_forward(p, "enc_f", xs[t], h)
            fwd[t] = h
            caches_f.append(cache)

        bwd = np.zeros((m, h_size))
        caches_b: list = [None] * m
        h = np.zeros(h_size)
        for t in range(m - 1, -1, -1):
            h, cache = _gru_forward(p, "enc_b", xs[t], h)
            bwd[t] = h
            caches_b[t] = cache

        return np.concatenate([fwd, bwd], axis=1), caches_f, caches_b

    def _encoder_backward(self, src_ids, caches_f, caches_b,
                          d_enc: np.ndarray, g: dict) -> None:
        p = self.params
        h_size = self.config.hidden_size
        m = len(src_ids)
        dxs = np.zeros((m, self.config.embed_size))

        carry = np.zeros(h_size)
        for t in range(m - 1, -1, -1):
            carry = carry + d_enc[t, :h_size]
            dx, carry = _gru_backward(p, "enc_f", caches_f[t], carry, g)
            dxs[t] += dx

        carry = np.zeros(h_size)
        for t in range(m):
            carry = carry + d_enc[t, h_size:]
            dx, carry = _gru_backward(p, "enc_b", caches_b[t], carry, g)
            dxs[t] += dx

        for t, i in enumerate(src_ids):
            g["src_emb"][i] += dxs[t]

    # -- attention ---------------------------------------------------------

    def attention(self, decoder_state: np.ndarray, encoder_states: np.ndarray) -> np.ndarray:
        """Softmax weights over source positions for one decoder state."""
        h_size = self.config.hidden_size
        decoder_state = np.asarray(decoder_state, dtype=np.float64)
        encoder_states = np.asarray(encoder_states, dtype=np.float64)
        if decoder_state.shape != (h_size,):
            raise ShapeError(
                f"decoder state must have shape ({h_size},), got {decoder_state.shape}")
        if encoder_states.ndim != 2 or encoder_states.shape[1] != 2 * h_size:
            raise ShapeError(
                f"encoder states must have shape (m, {2 * h_size}), got {encoder_states.shape}")
        att_enc = encoder_states @ self.params["att_u"]
        weights, _, _ = self._attention_forward(decoder_state, encoder_states, att_enc)
        return weights

    def _attention_forward(self, s_prev, enc, att_enc):
        p = self.params
        t = np.tanh(s_prev @ p["att_w"] + att_enc)  # (m, hidden)
        scores = t @ p["att_v"]
        e = np.exp(scores - scores.max())
        weights = e / e.sum()
        ctx = weights @ enc
        return weights, ctx, (s_prev, enc, t, weights)

    def _attention_backward(self, cache, d_ctx, g):
        """Returns (d_decoder_state, d_enc_direct, d_att_enc)."""
        p = self.params
        s_prev, enc, t, weights = cache
        d_weights = enc @ d_ctx
        d_enc = np.outer(weights, d_ctx)
        de = weights * (d_weights - weights @ d_weights)  # softmax jacobian
        g["att_v"] += t.T @ de
        d_pre = np.outer(de, p["att_v"]) * (1.0 - t * t)
        dq = d_pre.sum(axis=0)
        g["att_w"] += np.outer(s_prev, dq)
        d_state = p["att_w"] @ dq
        return d_state, d_enc, d_pre

    # -- decoder -----------------------------------------------------------

    def initial_state(self, enc: np.ndarray) -> np.ndarray:
        return np.tanh(enc[0] @ self.params["init_w"] + self.params["init_b"])

    def step(self, s_prev: np.ndarray, y_prev: int, enc: np.ndarray,
             att_enc: np.ndarray | None = None):
        """One decode step. Returns (log-probs over target vocab, new state)."""
        if att_enc is None:
            att_enc = enc @ self.params["att_u"]
        logp, s_new, _ = self._step_forward(s_prev, y_prev, enc, att_enc)
        return logp, s_new

    def _step_forward(self, s_prev, y_prev, enc, att_enc):
        p = self.params
        emb = p["tgt_emb"][y_prev]
        weights, ctx, att_cache = self._attention_forward(s_prev, enc, att_enc)
        x = np.concatenate([emb, ctx])
        s_new, gru_cache = _gru_forward(p, "dec", x, s_prev)
        o = np.concatenate([s_new, ctx, emb])
        logits = o @ p["out_w"] + p["out_b"]
        logits[list(_MASKED_IDS)] = -np.inf
        logp = _log_softmax(logits)
        cache = (y_prev, att_cache, gru_cache, o, logp)
        return logp, s_new, cache

    def _step_backward(self, cache, y_out, ds_carry, g):
        """Returns (d_prev_state, d_enc_direct, d_att_enc) for one step."""
        p = self.params
        h_size = self.config.hidden_size
        e_size = self.config.embed_size
        y_prev, att_cache, gru_cache, o, logp = cache

        d_logits = np.exp(logp)  # softmax probabilities; masked ids hold 0
        d_logits[y_out] -= 1.0
        g["out_w"] += np.outer(o, d_logits)
        g["out_b"] += d_logits
        do = p["out_w"] @ d_logits

        ds_new = do[:h_size] + ds_carry
        d_ctx = do[h_size:3 * h_size].copy()
        d_emb = do[3 * h_size:].copy()

        dx, ds_prev = _gru_backward(p, "dec", gru_cache, ds_new, g)
        d_emb += dx[:e_size]
        d_ctx += dx[e_size:]

        d_state, d_enc, d_att_enc = self._attention_backward(att_cache, d_ctx, g)
        g["tgt_emb"][y_prev] += d_emb
        return ds_prev + d_state, d_enc, d_att_enc

    # -- scoring -----------------------------------------------------------

    def charize(self, text: str, side: str) -> list[int]:
        vocab = self.src_vocab if side == "source" else self.tgt_vocab
        return vocab.encode(text)

    def sequence_logprob(self, src: str, tgt: str, terminated: bool = True) -> float:
        """log p(tgt | src), teacher forced.

        With terminated=True the terminal <eos> step is included; with
        terminated=False the score covers exactly the characters of tgt,
        which is the probability of the truncated decode-tree leaf.
        """
        if not src:
            raise DegenerateInputError("cannot score an empty source string")
        src_ids = self.src_vocab.encode(src)
        out_ids = self.tgt_vocab.encode(tgt)
        if terminated:
            out_ids = out_ids + [EOS]
        enc = self.encode(src_ids)
        att_enc = enc @ self.params["att_u"]
        s = self.initial_state(enc)
        total = 0.0
        y_prev = BOS
        for y in out_ids:
            logp, s = self.step(s, y_prev, enc, att_enc)
            total += logp[y]
            y_prev = y
        return float(total)

    # -- training loss and gradients ----------------------------------------

    def loss_and_grads(self, src_ids, tgt_ids):
        """Teacher-forced NLL of tgt_ids + <eos> given src_ids.

        Returns (nll_sum, n_steps, grads) where grads holds d nll_sum / d θ
        for every parameter. Callers divide by whatever step count defines
        their batch mean.
        """
        src_ids = list(src_ids)
        out_ids = list(tgt_ids) + [EOS]
        p = self.params

        enc, caches_f, caches_b = self._encode_cached(src_ids)
        att_enc = enc @ p["att_u"]
        init_pre = enc[0] @ p["init_w"] + p["init_b"]
        s = np.tanh(init_pre)
        s0 = s

        nll = 0.0
        step_caches = []
        y_prev = BOS
        for y in out_ids:
            logp, s, cache = self._step_forward(s, y_prev, enc, att_enc)
            nll -= logp[y]
            step_caches.append(cache)
            y_prev = y

        g = self.zero_grads()
        m = len(src_ids)
        d_enc = np.zeros((m, 2 * self.config.hidden_size))
        d_att_enc = np.zeros((m, self.config.hidden_size))
        ds = np.zeros(self.config.hidden_size)
        for cache, y in zip(reversed(step_caches), reversed(out_ids)):
            ds, d_enc_step, d_att_step = self._step_backward(cache, y, ds, g)
            d_enc += d_enc_step
            d_att_enc += d_att_step

        # initial decoder state projection
        d_pre = ds * (1.0 - s0 * s0)
        g["init_w"] += np.outer(enc[0], d_pre)
        g["init_b"] += d_pre
        d_enc[0] += p["init_w"] @ d_pre

        # fold the attention precomputation back onto the encoder states
        d_enc += d_att_enc @ p["att_u"].T
        g["att_u"] += enc.T @ d_att_enc

        self._encoder_backward(src_ids, caches_f, caches_b, d_enc, g)
        return float(nll), len(out_ids), g
