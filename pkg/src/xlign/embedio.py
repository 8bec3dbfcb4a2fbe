"""On-disk embedding format (XEB1), corpus manifests, and the in-memory data model.

An XEB1 file stores one n x d float32 matrix of sentence vectors for a single
(model, language, layer, pooling) tuple. A JSON sidecar (same basename plus
``.manifest.json``) carries the metadata and row-to-sentence-id mapping, so the
binary stays trivially writable from any language.
"""

from __future__ import annotations

import enum
import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"XEB1"
VERSION = 1
DTYPE_F32 = 1
HEADER = struct.Struct("<4sIQQB")  # magic, version, n, d, dtype


class FileFormatError(ValueError):
    """Raised when an XEB1 file or manifest does not match its declared layout."""


class Language(enum.Enum):
    EN = "en"
    HI = "hi"
    CM = "cm"

    @classmethod
    def parse(cls, value: "str | Language") -> "Language":
        if isinstance(value, Language):
            return value
        try:
            return cls[value.upper()]
        except KeyError:
            raise ValueError(f"unknown language {value!r}; expected one of en, hi, cm")


class Pooling(enum.Enum):
    CLS = "cls"
    MEAN = "mean"

    @classmethod
    def parse(cls, value: "str | Pooling") -> "Pooling":
        if isinstance(value, Pooling):
            return value
        try:
            return cls[value.upper()]
        except KeyError:
            raise ValueError(f"unknown pooling {value!r}; expected cls or mean")


class SamplerKind(enum.Enum):
    PERCENTILE = "percentile"
    SIM_WEIGHTED = "sim_weighted"


@dataclass
class LayerEmbeddings:
    """Sentence vectors for one (model, language, layer, pooling) tuple.

    ``matrix`` is n x d with float32 semantics on disk; ``sentence_ids[i]``
    names row i. Instances are validated on construction and treated as
    immutable afterwards, so they are safe to share across threads.
    """

    model_id: str
    language: Language
    layer: int
    pooling: Pooling
    matrix: np.ndarray
    sentence_ids: list[str]
    _row_of: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float32)
        if self.layer < 0:
            raise ValueError(f"layer must be non-negative, got {self.layer}")
        if self.matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-D, got shape {self.matrix.shape}")
        n, d = self.matrix.shape
        if n == 0 or not self.sentence_ids:
            raise ValueError("empty embedding set")
        if d == 0:
            raise ValueError("embedding dimension must be positive")
        if n != len(self.sentence_ids):
            raise ValueError(
                f"row count {n} does not match {len(self.sentence_ids)} sentence ids"
            )
        if len(set(self.sentence_ids)) != n:
            raise ValueError("duplicate id in sentence_ids")
        if not np.isfinite(self.matrix).all():
            raise ValueError("non-finite value in embedding matrix")
        self._row_of = {sid: i for i, sid in enumerate(self.sentence_ids)}

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def row_of(self, sentence_id: str) -> int:
        try:
            return self._row_of[sentence_id]
        except KeyError:
            raise KeyError(f"missing id {sentence_id!r} in {self.language.value} embeddings")

    def vector(self, sentence_id: str) -> np.ndarray:
        return self.matrix[self.row_of(sentence_id)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LayerEmbeddings):
            return NotImplemented
        return (
            self.model_id == other.model_id
            and self.language == other.language
            and self.layer == other.layer
            and self.pooling == other.pooling
            and self.sentence_ids == other.sentence_ids
            and self.matrix.shape == other.matrix.shape
            and np.array_equal(self.matrix, other.matrix)
        )


@dataclass
class TripleIndex:
    """Alignment of sentence ids across EN/HI/CM plus per-language token lengths."""

    triples: list[tuple[str, str, str]]
    token_lengths: dict[Language, dict[str, int]]
    _position: dict[str, tuple[Language, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.triples:
            raise ValueError("empty triple index")
        self._position = {}
        for lang_idx, lang in enumerate((Language.EN, Language.HI, Language.CM)):
            seen = set()
            lengths = self.token_lengths.get(lang)
            if lengths is None:
                raise ValueError(f"missing language column {lang.value}")
            for pos, triple in enumerate(self.triples):
                sid = triple[lang_idx]
                if sid in seen:
                    raise ValueError(f"duplicate id {sid!r} in {lang.value} column")
                seen.add(sid)
                if sid in self._position:
                    raise ValueError(f"duplicate id {sid!r} across language columns")
                self._position[sid] = (lang, pos)
                length = lengths.get(sid)
                if length is None:
                    raise ValueError(f"missing token length for id {sid!r}")
                if length < 1:
                    raise ValueError(f"invalid length {length} for id {sid!r}")

    def __len__(self) -> int:
        return len(self.triples)

    def ids(self, lang: Language) -> list[str]:
        col = (Language.EN, Language.HI, Language.CM).index(lang)
        return [t[col] for t in self.triples]

    def language_of(self, sentence_id: str) -> Language:
        return self._position[sentence_id][0]

    def ordinal_of(self, sentence_id: str) -> int:
        """Position of the triple containing this id, in manifest order."""
        return self._position[sentence_id][1]

    def parallel_id(self, sentence_id: str, target: Language) -> str:
        lang, pos = self._position[sentence_id]
        if lang == target:
            return sentence_id
        col = (Language.EN, Language.HI, Language.CM).index(target)
        return self.triples[pos][col]

    def lengths(self, lang: Language) -> np.ndarray:
        table = self.token_lengths[lang]
        return np.array([table[sid] for sid in self.ids(lang)], dtype=np.int64)


@dataclass
class RetrievalConfig:
    """Knobs for the retrieval protocol and its negative samplers."""

    num_negatives: int = 10
    percentile_window: float = 5.0
    sampler: SamplerKind = SamplerKind.PERCENTILE
    seed: int = 0
    similarity_layer: int | None = None  # SIM_WEIGHTED similarity source; None = last

    def __post_init__(self):
        if self.num_negatives < 1:
            raise ValueError("num_negatives must be >= 1")
        if not 0 < self.percentile_window <= 100:
            raise ValueError("percentile_window must be in (0, 100]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def _manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


def _ids_sha256(ids: list[str]) -> str:
    return hashlib.sha256("\n".join(ids).encode("utf-8")).hexdigest()


def write_embeddings(emb: LayerEmbeddings, path: "str | Path", corpus_sha256: str | None = None) -> None:
    """Write ``emb`` as an XEB1 file plus its JSON manifest sidecar.

    ``corpus_sha256`` is recorded verbatim in the manifest when given;
    otherwise it defaults to the sha256 of the newline-joined sentence ids.
    Round-trips bit-exactly through :func:`read_embeddings`.
    """
    path = Path(path)
    n, d = emb.matrix.shape
    payload = np.ascontiguousarray(emb.matrix, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, n, d, DTYPE_F32))
        fh.write(payload)
    manifest = {
        "model_id": emb.model_id,
        "language": emb.language.value,
        "layer": emb.layer,
        "pooling": emb.pooling.value,
        "sentence_ids": emb.sentence_ids,
        "corpus_sha256": corpus_sha256 or _ids_sha256(emb.sentence_ids),
    }
    with open(_manifest_path(path), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def read_manifest(path: "str | Path") -> dict:
    path = Path(path)
    try:
        with open(_manifest_path(path), "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise FileFormatError(f"missing manifest sidecar for {path}")
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"malformed manifest for {path}: {exc}")
    for key in ("model_id", "language", "layer", "pooling", "sentence_ids"):
        if key not in manifest:
            raise FileFormatError(f"manifest for {path} lacks field {key!r}")
    return manifest


def read_embeddings(path: "str | Path") -> LayerEmbeddings:
    """Read an XEB1 file written by :func:`write_embeddings` (or any conforming tool)."""
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(HEADER.size)
        if len(header) < HEADER.size:
            raise FileFormatError(f"{path}: truncated header ({len(header)} bytes)")
        magic, version, n, d, dtype = HEADER.unpack(header)
        if magic != MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise FileFormatError(f"{path}: version mismatch (got {version}, support {VERSION})")
        if dtype != DTYPE_F32:
            raise FileFormatError(f"{path}: unsupported dtype code {dtype}")
        payload = fh.read()
    expected = n * d * 4
    if len(payload) < expected:
        raise FileFormatError(
            f"{path}: truncated payload (size mismatch: expected {expected} bytes, got {len(payload)})"
        )
    if len(payload) > expected:
        raise FileFormatError(
            f"{path}: size mismatch (expected {expected} bytes, got {len(payload)})"
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape(n, d)
    manifest = read_manifest(path)
    ids = manifest["sentence_ids"]
    if len(ids) != n:
        raise FileFormatError(
            f"{path}: manifest lists {len(ids)} ids but header declares n={n}"
        )
    return LayerEmbeddings(
        model_id=manifest["model_id"],
        language=Language.parse(manifest["language"]),
        layer=int(manifest["layer"]),
        pooling=Pooling.parse(manifest["pooling"]),
        matrix=matrix.copy(),  # frombuffer view is read-only; downstream owns a private copy
        sentence_ids=list(ids),
    )


def load_triple_index(manifest_path: "str | Path") -> TripleIndex:
    """Load and validate a triple manifest: a JSON list of rows
    ``{id_en, id_hi, id_cm, len_en, len_hi, len_cm}``."""
    with open(manifest_path, "r", encoding="utf-8") as fh:
        try:
            rows = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{manifest_path}: malformed triple manifest: {exc}")
    if not isinstance(rows, list) or not rows:
        raise FileFormatError(f"{manifest_path}: triple manifest must be a non-empty list")
    triples = []
    lengths = {Language.EN: {}, Language.HI: {}, Language.CM: {}}
    for row in rows:
        for key in ("id_en", "id_hi", "id_cm", "len_en", "len_hi", "len_cm"):
            if key not in row:
                raise FileFormatError(f"{manifest_path}: row lacks field {key!r}")
        triples.append((row["id_en"], row["id_hi"], row["id_cm"]))
        lengths[Language.EN][row["id_en"]] = int(row["len_en"])
        lengths[Language.HI][row["id_hi"]] = int(row["len_hi"])
        lengths[Language.CM][row["id_cm"]] = int(row["len_cm"])
    return TripleIndex(triples=triples, token_lengths=lengths)


def write_triple_index(index: TripleIndex, manifest_path: "str | Path") -> None:
    rows = []
    for id_en, id_hi, id_cm in index.triples:
        rows.append(
            {
                "id_en": id_en,
                "id_hi": id_hi,
                "id_cm": id_cm,
                "len_en": int(index.token_lengths[Language.EN][id_en]),
                "len_hi": int(index.token_lengths[Language.HI][id_hi]),
                "len_cm": int(index.token_lengths[Language.CM][id_cm]),
            }
        )
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")
