"""Shared builders for test fixtures."""

import numpy as np

from xlign import Language, LayerEmbeddings, Pooling, TripleIndex


def sid(lang: Language, i: int) -> str:
    return f"{lang.value}-{i:05d}"


def emb(
    matrix,
    language: Language = Language.EN,
    layer: int = 0,
    model_id: str = "toy",
    pooling: Pooling = Pooling.CLS,
    ids=None,
) -> LayerEmbeddings:
    matrix = np.asarray(matrix)
    if ids is None:
        ids = [sid(language, i) for i in range(matrix.shape[0])]
    return LayerEmbeddings(model_id, language, layer, pooling, matrix, list(ids))


def index_for(n: int, lengths=None, seed: int = 0) -> TripleIndex:
    """Triple index over sid(lang, 0..n-1). ``lengths`` may be a single
    per-sentence list shared by all languages or a dict keyed by Language."""
    rng = np.random.default_rng(seed)
    if lengths is None:
        lengths = {
            lang: rng.integers(3, 41, size=n).tolist() for lang in Language
        }
    elif not isinstance(lengths, dict):
        lengths = {lang: list(lengths) for lang in Language}
    triples = [
        (sid(Language.EN, i), sid(Language.HI, i), sid(Language.CM, i))
        for i in range(n)
    ]
    token_lengths = {
        lang: {sid(lang, i): int(lengths[lang][i]) for i in range(n)}
        for lang in Language
    }
    return TripleIndex(triples=triples, token_lengths=token_lengths)
