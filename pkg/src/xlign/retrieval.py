"""Dot-product parallel-sentence retrieval with length-matched negative sampling.

Each query is scored against a pool of one positive (the parallel sentence)
plus ``num_negatives`` sampled distractors; a query succeeds when the positive
strictly outscores every negative. Negative pools are derived from per-query
RNG streams keyed by (seed, direction, layer, query ordinal), so results are
identical regardless of thread count or evaluation order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .embedio import Language, LayerEmbeddings, RetrievalConfig, SamplerKind, TripleIndex

_MASK = (1 << 64) - 1
_LANG_ORDER = (Language.EN, Language.HI, Language.CM)


@dataclass(frozen=True)
class Direction:
    source: Language
    target: Language

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError("retrieval direction must cross languages")

    @property
    def code(self) -> int:
        return _LANG_ORDER.index(self.source) * 3 + _LANG_ORDER.index(self.target)

    def __str__(self) -> str:
        return f"{self.source.value}->{self.target.value}"


@dataclass
class RetrievalOutcome:
    query_id: str
    candidate_ids: list[str]  # positive first, then negatives
    scores: np.ndarray
    success: bool


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_stream(seed: int, direction_code: int, layer: int, ordinal: int) -> np.random.Generator:
    """Per-query RNG stream from a counter-based mixer over the key tuple."""
    h = seed & _MASK
    for part in (direction_code, layer, ordinal):
        h = _splitmix64(h ^ (part & _MASK))
    return np.random.Generator(np.random.PCG64(h))


def length_percentiles(lengths) -> np.ndarray:
    """Mid-rank percentile of each element: 100 * (#less + 0.5 * #equal) / n.

    Ties share a rank; a single element sits at 50.
    """
    arr = np.asarray(lengths)
    if arr.size == 0:
        raise ValueError("empty length list")
    order = np.sort(arr)
    less = np.searchsorted(order, arr, side="left")
    upto = np.searchsorted(order, arr, side="right")
    return 100.0 * (less + 0.5 * (upto - less)) / arr.size


def _window_candidates(
    query_rank: float,
    target_ranks: np.ndarray,
    positive_pos: int,
    num_negatives: int,
    window: float,
) -> np.ndarray:
    """Positions of eligible negatives, widening the window in +5 steps until
    at least ``num_negatives`` candidates exist."""
    n = target_ranks.size
    if n - 1 < num_negatives:
        raise ValueError(
            f"pool too small: {n - 1} candidates available, {num_negatives} requested"
        )
    w = window
    while True:
        mask = np.abs(target_ranks - query_rank) <= w
        mask[positive_pos] = False
        candidates = np.flatnonzero(mask)
        if candidates.size >= num_negatives:
            return candidates
        if w >= 100.0:
            # whole pool already eligible; guarded above, unreachable in practice
            raise ValueError("pool too small even at full window")
        w += 5.0


def _percentile_context(index: TripleIndex, query_lang: Language, target_lang: Language):
    """Precompute per-language percentile ranks used by both samplers."""
    query_ranks = length_percentiles(index.lengths(query_lang))
    target_ranks = length_percentiles(index.lengths(target_lang))
    return query_ranks, target_ranks


def sample_negatives_percentile(
    query_id: str,
    target_lang: Language,
    cfg: RetrievalConfig,
    index: TripleIndex,
    layer: int = 0,
    _ctx=None,
) -> list[str]:
    """Draw ``cfg.num_negatives`` distinct length-matched negatives, uniformly
    over the percentile window around the query's rank."""
    query_lang = index.language_of(query_id)
    ordinal = index.ordinal_of(query_id)
    query_ranks, target_ranks = _ctx if _ctx is not None else _percentile_context(
        index, query_lang, target_lang
    )
    candidates = _window_candidates(
        query_ranks[ordinal], target_ranks, ordinal, cfg.num_negatives, cfg.percentile_window
    )
    direction = Direction(query_lang, target_lang)
    rng = derive_stream(cfg.seed, direction.code, layer, ordinal)
    chosen = rng.choice(candidates, size=cfg.num_negatives, replace=False)
    target_ids = index.ids(target_lang)
    return [target_ids[i] for i in chosen]


def sample_negatives_simweighted(
    query_id: str,
    target_emb: LayerEmbeddings,
    cfg: RetrievalConfig,
    index: TripleIndex,
    layer: int = 0,
    _ctx=None,
) -> list[str]:
    """Percentile-filter the pool, then draw negatives without replacement with
    probability proportional to max(eps, 1 - s_hat), where s_hat is the cosine
    similarity to the query's parallel target vector, min-max normalized within
    the pool: lower-similarity candidates receive higher sampling probability.
    """
    query_lang = index.language_of(query_id)
    target_lang = target_emb.language
    ordinal = index.ordinal_of(query_id)
    query_ranks, target_ranks = _ctx if _ctx is not None else _percentile_context(
        index, query_lang, target_lang
    )
    candidates = _window_candidates(
        query_ranks[ordinal], target_ranks, ordinal, cfg.num_negatives, cfg.percentile_window
    )
    target_ids = index.ids(target_lang)
    positive_id = index.parallel_id(query_id, target_lang)

    mat = target_emb.matrix.astype(np.float64)
    rows = np.array([target_emb.row_of(target_ids[i]) for i in candidates])
    query_vec = mat[target_emb.row_of(positive_id)]
    qnorm = np.linalg.norm(query_vec)
    cnorms = np.linalg.norm(mat[rows], axis=1)
    if qnorm == 0.0 or np.any(cnorms == 0.0):
        raise ValueError("zero-norm vector in similarity pool")
    sims = mat[rows] @ query_vec / (cnorms * qnorm)

    lo, hi = sims.min(), sims.max()
    if hi - lo > 0.0:
        shat = (sims - lo) / (hi - lo)
    else:
        shat = np.full_like(sims, 0.5)  # all-equal pool: uniform draw
    weights = np.maximum(1e-6, 1.0 - shat)
    probs = weights / weights.sum()

    direction = Direction(query_lang, target_lang)
    rng = derive_stream(cfg.seed, direction.code, layer, ordinal)
    chosen = rng.choice(candidates, size=cfg.num_negatives, replace=False, p=probs)
    return [target_ids[i] for i in chosen]


def _score_query(
    ordinal: int,
    query_id: str,
    src_mat: np.ndarray,
    tgt: LayerEmbeddings,
    tgt_mat: np.ndarray,
    direction: Direction,
    cfg: RetrievalConfig,
    index: TripleIndex,
    sim_emb: LayerEmbeddings | None,
    ctx,
    layer: int,
) -> RetrievalOutcome:
    if cfg.sampler is SamplerKind.PERCENTILE:
        negatives = sample_negatives_percentile(
            query_id, direction.target, cfg, index, layer=layer, _ctx=ctx
        )
    else:
        negatives = sample_negatives_simweighted(
            query_id, sim_emb, cfg, index, layer=layer, _ctx=ctx
        )
    positive_id = index.parallel_id(query_id, direction.target)
    candidate_ids = [positive_id] + negatives
    cand_rows = [tgt.row_of(cid) for cid in candidate_ids]
    scores = tgt_mat[cand_rows] @ src_mat[ordinal]
    success = bool(np.all(scores[0] > scores[1:]))  # ties count as failure
    return RetrievalOutcome(query_id, candidate_ids, scores, success)


def directional_accuracy(
    src: LayerEmbeddings,
    tgt: LayerEmbeddings,
    direction: Direction,
    cfg: RetrievalConfig,
    index: TripleIndex,
    sim_emb: LayerEmbeddings | None = None,
    threads: int = 1,
) -> tuple[float, list[RetrievalOutcome]]:
    """Raw dot-product retrieval accuracy over all queries of the source language.

    ``sim_emb`` supplies the target-language embeddings used by the
    SIM_WEIGHTED sampler (defaults to ``tgt`` itself). Scores accumulate in
    float64. Returns (accuracy, per-query outcomes in corpus order).
    """
    if src.dim != tgt.dim:
        raise ValueError(f"dimension mismatch: src d={src.dim}, tgt d={tgt.dim}")
    if src.language != direction.source or tgt.language != direction.target:
        raise ValueError("embedding languages do not match the retrieval direction")
    if cfg.sampler is SamplerKind.SIM_WEIGHTED and sim_emb is None:
        sim_emb = tgt

    query_ids = index.ids(direction.source)
    src_mat = np.array(
        [src.vector(q) for q in query_ids], dtype=np.float64
    )  # also validates coverage
    for cid in index.ids(direction.target):
        tgt.row_of(cid)
    tgt_mat = tgt.matrix.astype(np.float64)
    ctx = _percentile_context(index, direction.source, direction.target)
    layer = src.layer

    def run(ordinal: int) -> RetrievalOutcome:
        return _score_query(
            ordinal, query_ids[ordinal], src_mat, tgt, tgt_mat,
            direction, cfg, index, sim_emb, ctx, layer,
        )

    ordinals = range(len(query_ids))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, ordinals))
    else:
        outcomes = [run(i) for i in ordinals]
    accuracy = sum(o.success for o in outcomes) / len(outcomes)
    return accuracy, outcomes


def layer_curve(
    src_set: dict[int, LayerEmbeddings],
    tgt_set: dict[int, LayerEmbeddings],
    direction: Direction,
    cfg: RetrievalConfig,
    index: TripleIndex,
    threads: int = 1,
) -> tuple[list[tuple[int, float]], float]:
    """Per-layer retrieval accuracy plus the arithmetic mean over layers.

    Negatives are resampled per layer from streams keyed by the layer index,
    so the curve is reproducible layer by layer.
    """
    if set(src_set) != set(tgt_set):
        raise ValueError("layer-set mismatch between source and target embeddings")
    layers = sorted(src_set)
    sim_emb = None
    if cfg.sampler is SamplerKind.SIM_WEIGHTED:
        sim_layer = cfg.similarity_layer if cfg.similarity_layer is not None else layers[-1]
        if sim_layer not in tgt_set:
            raise ValueError(f"similarity layer {sim_layer} missing from target set")
        sim_emb = tgt_set[sim_layer]
    curve = []
    for layer in layers:
        acc, _ = directional_accuracy(
            src_set[layer], tgt_set[layer], direction, cfg, index,
            sim_emb=sim_emb, threads=threads,
        )
        curve.append((layer, acc))
    mean = float(np.mean([a for _, a in curve]))
    return curve, mean
