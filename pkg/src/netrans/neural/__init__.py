"""Neural entity translator: model, training, decoding, serialization."""

from .beam import translate
from .io import load_model, save_model
from .model import ModelConfig, Seq2SeqModel
from .train import AdaDelta, S2T, T2S, gradient_check, loss_on, make_model, oriented, train
from .vocab import BOS, EOS, PAD, RESERVED, UNK, CharVocab

__all__ = [
    "AdaDelta",
    "BOS",
    "CharVocab",
    "EOS",
    "ModelConfig",
    "PAD",
    "RESERVED",
    "S2T",
    "Seq2SeqModel",
    "T2S",
    "UNK",
    "gradient_check",
    "load_model",
    "loss_on",
    "make_model",
    "oriented",
    "save_model",
    "train",
    "translate",
]
