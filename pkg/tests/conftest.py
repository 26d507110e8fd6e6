"""Shared fixtures.

The expensive pieces (the synthetic corpus and the two entity translators
trained on its noisy pair list) are built once per session; alignment
results are cached alongside so the corpus-level tests share one run.
"""

import time

import pytest

from netrans import synth
from netrans.align import AlignConfig, BOTH, ModelTranslator, align_corpus
from netrans.neural import ModelConfig, S2T, T2S, save_model, train
from netrans.ner import AnnotationRecognizer

TRAIN_STOP_LOSS = 0.05


def fit_translator(pairs, direction, out_path, hidden=32, embed=16, max_epochs=150):
    config = ModelConfig(hidden_size=hidden, embed_size=embed,
                         learning_rate=1.0, seed=42)

    def stop_when_fit(epoch, train_loss, dev_loss, model):
        return train_loss < TRAIN_STOP_LOSS

    model = train(pairs, direction, config, max_epochs=max_epochs,
                  patience=max_epochs, on_epoch=stop_when_fit)
    save_model(model, str(out_path))
    return out_path


@pytest.fixture(scope="session")
def synth_corpus():
    return synth.make_corpus(n_pairs=50, n_sentences=200, seed=42, noise=0.1)


@pytest.fixture(scope="session")
def model_paths(synth_corpus, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("models")
    s2t = fit_translator(synth_corpus.train_pairs, S2T, tmp / "s2t.bin")
    t2s = fit_translator(synth_corpus.train_pairs, T2S, tmp / "t2s.bin")
    return str(s2t), str(t2s)


@pytest.fixture(scope="session")
def translators(model_paths):
    s2t_path, t2s_path = model_paths
    return ModelTranslator(s2t_path, 5), ModelTranslator(t2s_path, 5)


@pytest.fixture(scope="session")
def aligned_synth(synth_corpus, translators):
    """(alignments, extracted pairs, elapsed seconds) for the standard corpus."""
    s2t, t2s = translators
    recognizer = AnnotationRecognizer(synth_corpus.annotations)
    cfg = AlignConfig(sim_threshold=0.6, max_ngram=3, beam_width=5, directions=BOTH)
    started = time.perf_counter()
    alignments, pairs = align_corpus(synth_corpus.corpus, recognizer, cfg, s2t, t2s)
    return alignments, pairs, time.perf_counter() - started


@pytest.fixture(scope="session")
def clean_synth_corpus():
    """Same corpus text as synth_corpus, but the training list is noise-free."""
    return synth.make_corpus(n_pairs=50, n_sentences=200, seed=42, noise=0.0)


@pytest.fixture(scope="session")
def clean_aligned(clean_synth_corpus, tmp_path_factory):
    """(alignments, extracted pairs) from translators that saw clean spellings."""
    tmp = tmp_path_factory.mktemp("clean_models")
    s2t = ModelTranslator(str(fit_translator(
        clean_synth_corpus.train_pairs, S2T, tmp / "s2t.bin")), 5)
    t2s = ModelTranslator(str(fit_translator(
        clean_synth_corpus.train_pairs, T2S, tmp / "t2s.bin")), 5)
    recognizer = AnnotationRecognizer(clean_synth_corpus.annotations)
    cfg = AlignConfig(sim_threshold=0.6, max_ngram=3, beam_width=5, directions=BOTH)
    return align_corpus(clean_synth_corpus.corpus, recognizer, cfg, s2t, t2s)
