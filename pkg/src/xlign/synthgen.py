"""Synthetic trilingual fixtures with planted cross-lingual structure.

EN and HI embeddings are i.i.d. Gaussian. On layers listed in the alignment
schedule, CM is a noisy linear mixture of its EN and HI partners; elsewhere
it is independent Gaussian. The planted mixture gives closed-form oracles:
retrieval must succeed when the mixture is clean, entropy reduction must
order EN above HI when w_en > w_hi, and everything must collapse to chance
on unaligned layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedio import Language, LayerEmbeddings, Pooling, TripleIndex


@dataclass
class PlantedModel:
    """Generation recipe: sizes, mixture weights, noise, alignment schedule,
    and the integer range token lengths are drawn from."""

    n: int
    d: int
    w_en: float = 0.9
    w_hi: float = 0.1
    sigma: float = 0.1
    layers: tuple = (0,)
    aligned_layers: tuple = (0,)
    length_min: int = 3
    length_max: int = 40

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("n and d must be >= 1")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        self.layers = tuple(sorted(set(int(v) for v in self.layers)))
        self.aligned_layers = tuple(sorted(set(int(v) for v in self.aligned_layers)))
        if not self.layers:
            raise ValueError("at least one layer required")
        if not set(self.aligned_layers) <= set(self.layers):
            raise ValueError("aligned_layers must be a subset of layers")
        if not 1 <= self.length_min <= self.length_max:
            raise ValueError("need 1 <= length_min <= length_max")


@dataclass
class GeneratedFixture:
    """Per-language, per-layer embedding sets plus the aligning index."""

    en: dict
    hi: dict
    cm: dict
    index: TripleIndex

    def sets(self) -> dict:
        return {Language.EN: self.en, Language.HI: self.hi, Language.CM: self.cm}


def _ids(lang: Language, n: int) -> list:
    return [f"{lang.value}-{i:05d}" for i in range(n)]


def generate(model: PlantedModel, seed: int) -> GeneratedFixture:
    """Draw one fixture deterministically from (model, seed)."""
    rng = np.random.default_rng(seed)
    ids = {lang: _ids(lang, model.n) for lang in Language}
    lengths = {
        lang: rng.integers(model.length_min, model.length_max + 1, size=model.n)
        for lang in Language
    }
    triples = [
        (ids[Language.EN][i], ids[Language.HI][i], ids[Language.CM][i])
        for i in range(model.n)
    ]
    token_lengths = {
        lang: {ids[lang][i]: int(lengths[lang][i]) for i in range(model.n)}
        for lang in Language
    }
    index = TripleIndex(triples=triples, token_lengths=token_lengths)
    aligned = set(model.aligned_layers)
    out = {lang: {} for lang in Language}
    for layer in model.layers:
        en = rng.standard_normal((model.n, model.d))
        hi = rng.standard_normal((model.n, model.d))
        if layer in aligned:
            cm = model.w_en * en + model.w_hi * hi
            if model.sigma > 0.0:
                cm = cm + model.sigma * rng.standard_normal((model.n, model.d))
        else:
            cm = rng.standard_normal((model.n, model.d))
        for lang, mat in ((Language.EN, en), (Language.HI, hi), (Language.CM, cm)):
            out[lang][layer] = LayerEmbeddings(
                model_id=f"synthetic-seed{seed}",
                language=lang,
                layer=layer,
                pooling=Pooling.CLS,
                matrix=mat,
                sentence_ids=list(ids[lang]),
            )
    return GeneratedFixture(
        en=out[Language.EN], hi=out[Language.HI], cm=out[Language.CM], index=index
    )
