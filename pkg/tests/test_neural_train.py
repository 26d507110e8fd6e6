import numpy as np
import pytest

from netrans.core import NePair, NeType
from netrans.errors import ConfigError, DivergenceError
from netrans.neural import (
    AdaDelta,
    EOS,
    ModelConfig,
    S2T,
    Seq2SeqModel,
    T2S,
    gradient_check,
    loss_on,
    make_model,
    oriented,
    train,
)

PAIRS = [
    NePair("巴林", "balin", NeType.LOC),
    NePair("安娜", "anna", NeType.PER),
    NePair("马克", "make", NeType.PER),
]


def small_config(**kwargs):
    defaults = dict(hidden_size=10, embed_size=6, seed=1)
    defaults.update(kwargs)
    return ModelConfig(**defaults)


def test_oriented_swaps_pairs_for_the_reverse_direction():
    assert oriented(PAIRS, S2T)[0] == ("巴林", "balin")
    assert oriented(PAIRS, T2S)[0] == ("balin", "巴林")
    with pytest.raises(ConfigError):
        oriented(PAIRS, "sideways")


def test_make_model_builds_vocabularies_from_the_right_sides():
    m = make_model(PAIRS, S2T, small_config())
    assert m.src_vocab.id_of("巴") != 2  # known, not <unk>
    assert m.tgt_vocab.id_of("b") != 2
    assert m.src_vocab.id_of("b") == 2  # Latin chars are unseen on the source side
    r = make_model(PAIRS, T2S, small_config())
    assert r.src_vocab.id_of("b") != 2
    with pytest.raises(ConfigError):
        make_model([], S2T, small_config())


def test_adadelta_first_step_matches_hand_computation():
    config = small_config(learning_rate=0.5, adadelta_rho=0.9, adadelta_eps=1e-6)
    model = make_model(PAIRS, S2T, config)
    theta0 = model.params["att_v"].copy()
    grads = model.zero_grads()
    g = np.full_like(theta0, 0.25)
    grads["att_v"][:] = g

    optimizer = AdaDelta(model)
    optimizer.update(grads)

    # Zeiler's recurrences from zero accumulators, scaled by the global rate
    e_g = 0.1 * g**2
    delta = -np.sqrt(1e-6) / np.sqrt(e_g + 1e-6) * g
    np.testing.assert_allclose(model.params["att_v"], theta0 + 0.5 * delta, atol=1e-15)


def test_adadelta_scale_rescales_the_gradient():
    config = small_config()
    a = make_model(PAIRS, S2T, config)
    b = make_model(PAIRS, S2T, config)
    grads_a = a.zero_grads()
    grads_b = b.zero_grads()
    grads_a["att_v"][:] = 1.0
    grads_b["att_v"][:] = 0.5
    AdaDelta(a).update(grads_a, scale=0.5)
    AdaDelta(b).update(grads_b, scale=1.0)
    np.testing.assert_allclose(a.params["att_v"], b.params["att_v"], atol=1e-15)


def test_loss_on_matches_sequence_logprob():
    model = make_model(PAIRS, S2T, small_config())
    text_in, text_out = oriented(PAIRS, S2T)[0]
    expected = -model.sequence_logprob(text_in, text_out) / (len(text_out) + 1)
    assert abs(loss_on(model, [(text_in, text_out)]) - expected) < 1e-12


def test_loss_on_skips_unknown_target_chars():
    model = make_model(PAIRS, S2T, small_config())
    value = loss_on(model, [("巴林", "baQin")])  # Q is not in the target vocab
    assert np.isfinite(value)
    with pytest.raises(ConfigError):
        loss_on(model, [])


def test_gradients_match_finite_differences():
    config = ModelConfig(hidden_size=8, embed_size=8, seed=5)
    pairs = [NePair("巴林", "bal", NeType.LOC), NePair("克安", "kean", NeType.PER)]
    model = make_model(pairs, S2T, config)
    report = gradient_check(model, oriented(pairs, S2T), eps=1e-4)
    assert set(report) == set(model.params)
    worst = max(report.values())
    assert worst <= 1e-3, f"worst relative error {worst:.3e}"


def test_one_epoch_at_the_default_rate_reduces_training_loss():
    config = small_config()  # learning_rate 1e-4
    texts = oriented(PAIRS, S2T)
    before_model = make_model(PAIRS, S2T, config)
    before = loss_on(before_model, texts)
    model = train(PAIRS, S2T, config, max_epochs=1)
    assert loss_on(model, texts) < before


def test_training_is_deterministic():
    config = small_config(learning_rate=1.0)
    a = train(PAIRS, S2T, config, max_epochs=5)
    b = train(PAIRS, S2T, config, max_epochs=5)
    for name in a.params:
        assert np.array_equal(a.params[name], b.params[name])


def test_training_overfits_a_tiny_list():
    config = small_config(hidden_size=16, embed_size=8, learning_rate=1.0)
    model = train(PAIRS, S2T, config, max_epochs=120)
    assert loss_on(model, oriented(PAIRS, S2T)) < 0.2


def test_on_epoch_callback_can_stop_training():
    seen = []

    def stop_at_three(epoch, train_loss, dev_loss, model):
        seen.append((epoch, train_loss, dev_loss))
        return epoch == 3

    train(PAIRS, S2T, small_config(), max_epochs=50, on_epoch=stop_at_three)
    assert [e for e, _, _ in seen] == [1, 2, 3]
    assert all(dev is None for _, _, dev in seen)


def test_dev_pairs_are_reported_to_the_callback():
    seen = []

    def record(epoch, train_loss, dev_loss, model):
        seen.append(dev_loss)
        return True

    train(PAIRS, S2T, small_config(), PAIRS[:1], max_epochs=5, on_epoch=record)
    assert len(seen) == 1 and seen[0] is not None and np.isfinite(seen[0])


def test_patience_restores_the_best_dev_checkpoint():
    seen = []

    def record(epoch, train_loss, dev_loss, model):
        seen.append(dev_loss)
        return False

    config = small_config(hidden_size=16, embed_size=8, learning_rate=1.0)
    # same source, contradictory target: overfitting the training list must
    # eventually push the dev loss up, which is what patience watches for
    conflicting_dev = [NePair("巴林", "nilab", NeType.LOC)]
    model = train(PAIRS, S2T, config, conflicting_dev,
                  max_epochs=400, patience=3, on_epoch=record)
    assert len(seen) < 400
    restored = loss_on(model, oriented(conflicting_dev, S2T))
    assert abs(restored - min(seen)) < 1e-9


def test_divergence_is_reported_with_the_epoch(monkeypatch):
    def explode(self, src_ids, tgt_ids):
        return float("nan"), 1, self.zero_grads()

    monkeypatch.setattr(Seq2SeqModel, "loss_and_grads", explode)
    with pytest.raises(DivergenceError, match="epoch 1"):
        train(PAIRS, S2T, small_config(), max_epochs=5)
