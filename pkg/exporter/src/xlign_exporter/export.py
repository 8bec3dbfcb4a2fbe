"""Export jobs: corpus in, XEB1 matrices / attribution TSV out.

Embedding export runs the encoder once per language, pools every hidden
layer two ways (CLS vector; mask-weighted mean over real tokens), and
writes one XEB1 file per (language, layer, pooling).  Rows keep corpus
order, so row i of every matrix is sentence triple i; triples.json written
alongside makes that alignment explicit and records post-truncation token
counts.  Hidden states are exported raw, not normalized: consumers decide
their own geometry.

Attribution export runs integrated gradients per sentence on the input
embeddings against the l2 norm of the final-layer [CLS] vector, with the
all-[PAD] sequence as baseline.  Subword attributions are summed to words
before language tagging; special tokens keep their own rows tagged other.
Every sentence must pass the completeness check or the job aborts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .corpus import LANGUAGES, Corpus, load_corpus
from .ig import integrated_gradients, require_completeness
from .langtag import tag_word
from .model import resolve_backend
from .toytok import SPECIAL_TOKENS, Encoding
from .xebwrite import write_attribution_tsv, write_triples, write_xeb

logger = logging.getLogger(__name__)

POOLINGS = ("cls", "mean")


@dataclass(frozen=True)
class ExportJob:
    model_id: str
    corpus_path: Path
    out_dir: Path
    layers: tuple[int, ...] | None = None  # None = every layer output
    poolings: tuple[str, ...] = POOLINGS
    max_length: int = 48
    batch_size: int = 8
    ig_steps: int = 64
    ig_tolerance: float = 0.01
    attribution_language: str = "cm"

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if not self.poolings or any(p not in POOLINGS for p in self.poolings):
            raise ValueError(f"poolings must be drawn from {POOLINGS}")
        if self.layers is not None and (
            not self.layers or any(l < 0 for l in self.layers)
        ):
            raise ValueError("layers must be a non-empty tuple of indices >= 0")
        if self.max_length < 3:
            raise ValueError("max_length must be >= 3")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.ig_steps < 1:
            raise ValueError("ig_steps must be >= 1")
        if not 0.0 < self.ig_tolerance <= 1.0:
            raise ValueError("ig_tolerance must be in (0, 1]")
        if self.attribution_language not in LANGUAGES:
            raise ValueError(f"attribution_language must be one of {LANGUAGES}")


@dataclass(frozen=True)
class ExportIndex:
    out_dir: Path
    embedding_paths: dict[tuple[str, int, str], Path]
    triples_path: Path


def embedding_filename(language: str, layer: int, pooling: str) -> str:
    return f"{language}.l{layer}.{pooling}.xeb"


def _encode_all(backend, texts: list[str], max_length: int) -> list[Encoding]:
    encodings = [backend.encode(text, max_length) for text in texts]
    n_trunc = sum(e.truncated for e in encodings)
    if n_trunc:
        logger.warning("truncated %d/%d sentences at max_length=%d",
                       n_trunc, len(encodings), max_length)
    return encodings


def _padded_batch(encodings: list[Encoding], pad_id: int) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(e.ids) for e in encodings)
    ids = torch.full((len(encodings), width), pad_id, dtype=torch.long)
    mask = torch.zeros((len(encodings), width), dtype=torch.long)
    for i, e in enumerate(encodings):
        ids[i, : len(e.ids)] = torch.tensor(e.ids, dtype=torch.long)
        mask[i, : len(e.ids)] = 1
    return ids, mask


def _pool(states: list[torch.Tensor], mask: torch.Tensor, pooling: str) -> list[np.ndarray]:
    pooled = []
    for h in states:
        if pooling == "cls":
            vec = h[:, 0, :]
        else:
            weights = mask.unsqueeze(-1).to(h.dtype)
            vec = (h * weights).sum(dim=1) / weights.sum(dim=1)
        pooled.append(vec.numpy().astype(np.float32))
    return pooled


def export_layer_embeddings(job: ExportJob) -> ExportIndex:
    corpus = load_corpus(job.corpus_path)
    backend = resolve_backend(job.model_id)
    layers = tuple(range(backend.n_layer_outputs)) if job.layers is None else job.layers
    bad = [l for l in layers if l >= backend.n_layer_outputs]
    if bad:
        raise ValueError(
            f"layers {bad} out of range: model has {backend.n_layer_outputs} layer outputs"
        )
    job.out_dir.mkdir(parents=True, exist_ok=True)

    paths: dict[tuple[str, int, str], Path] = {}
    lengths: dict[str, list[int]] = {}
    for language in LANGUAGES:
        encodings = _encode_all(backend, corpus.texts(language), job.max_length)
        lengths[language] = [e.content_length for e in encodings]
        per_layer: dict[tuple[int, str], list[np.ndarray]] = {
            (l, p): [] for l in layers for p in job.poolings
        }
        for start in range(0, len(encodings), job.batch_size):
            chunk = encodings[start : start + job.batch_size]
            ids, mask = _padded_batch(chunk, backend.pad_id)
            states = backend.hidden_states(ids, mask)
            for pooling in job.poolings:
                pooled = _pool(states, mask, pooling)
                for l in layers:
                    per_layer[(l, pooling)].append(pooled[l])
        for (l, pooling), blocks in per_layer.items():
            matrix = np.concatenate(blocks, axis=0)
            path = job.out_dir / embedding_filename(language, l, pooling)
            write_xeb(
                path,
                matrix,
                model_id=job.model_id,
                language=language,
                layer=l,
                pooling=pooling,
                sentence_ids=corpus.ids(language),
                corpus_sha256=corpus.sha256,
            )
            paths[(language, l, pooling)] = path

    triples_path = job.out_dir / "triples.json"
    write_triples(triples_path, _triple_rows(corpus, lengths))
    logger.info("wrote %d embedding files and %s", len(paths), triples_path)
    return ExportIndex(out_dir=job.out_dir, embedding_paths=paths, triples_path=triples_path)


def _triple_rows(corpus: Corpus, lengths: dict[str, list[int]]) -> list[dict]:
    rows = []
    for i, triple in enumerate(corpus.triples):
        row: dict = {}
        for lang in LANGUAGES:
            row[f"id_{lang}"] = triple.ids[lang]
            row[f"len_{lang}"] = lengths[lang][i]
        rows.append(row)
    return rows


def export_attributions(job: ExportJob, out_path: "str | Path") -> Path:
    corpus = load_corpus(job.corpus_path)
    backend = resolve_backend(job.model_id)
    language = job.attribution_language
    rows: list[tuple[str, str, float, str]] = []
    for sid, text in zip(corpus.ids(language), corpus.texts(language)):
        encoding = backend.encode(text, job.max_length)
        ids = torch.tensor([encoding.ids], dtype=torch.long)
        mask = torch.ones_like(ids)
        with torch.no_grad():
            x = backend.input_embeddings(ids)[0]
            baseline = backend.input_embeddings(torch.full_like(ids, backend.pad_id))[0]

        def cls_norm(z: torch.Tensor) -> torch.Tensor:
            return torch.linalg.vector_norm(
                backend.cls_from_embeddings(z, mask), dim=-1
            )

        attr = integrated_gradients(cls_norm, x, baseline, job.ig_steps)
        require_completeness(attr, job.ig_tolerance)
        rows.extend(_word_rows(sid, encoding, attr.values))
    out_path = Path(out_path)
    write_attribution_tsv(out_path, rows)
    logger.info("wrote %d attribution rows to %s", len(rows), out_path)
    return out_path


def _word_rows(
    sid: str, encoding: Encoding, values: torch.Tensor
) -> list[tuple[str, str, float, str]]:
    rows: list[tuple[str, str, float, str]] = []
    emitted: set[int] = set()
    for t, w in enumerate(encoding.word_index):
        if w is None:
            token = SPECIAL_TOKENS.get(encoding.ids[t], "[UNK]")
            rows.append((sid, token, float(values[t]), "other"))
        elif w not in emitted:
            emitted.add(w)
            score = sum(
                float(values[u])
                for u, wu in enumerate(encoding.word_index)
                if wu == w
            )
            word = encoding.words[w]
            rows.append((sid, word, score, tag_word(word)))
    return rows
