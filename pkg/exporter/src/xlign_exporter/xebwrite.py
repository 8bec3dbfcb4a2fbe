"""Writers for the exchange formats the analysis toolkit consumes.

XEB1 layout: a 25-byte little-endian header (magic ``XEB1``, u32 version 1,
u64 n, u64 d, u8 dtype code 1 = float32) followed by n*d float32 values in
row-major order.  Each .xeb file has a JSON sidecar at
``<filename>.manifest.json`` recording model_id, language, layer, pooling,
sentence_ids, and corpus_sha256.  The triple manifest is a JSON list of
``{id_en, id_hi, id_cm, len_en, len_hi, len_cm}`` rows; row order is the
cross-language alignment.  Attributions are 4-column TSV rows
(sentence_id, token, score, tag) grouped by sentence in file order.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"XEB1"
VERSION = 1
DTYPE_F32 = 1
HEADER = struct.Struct("<4sIQQB")


def write_xeb(
    path: "str | Path",
    matrix: np.ndarray,
    *,
    model_id: str,
    language: str,
    layer: int,
    pooling: str,
    sentence_ids: list[str],
    corpus_sha256: str,
) -> None:
    path = Path(path)
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError("embedding matrix must be 2-D")
    n, d = matrix.shape
    if len(sentence_ids) != n:
        raise ValueError(f"{len(sentence_ids)} sentence ids for {n} rows")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, n, d, DTYPE_F32))
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    manifest = {
        "model_id": model_id,
        "language": language,
        "layer": int(layer),
        "pooling": pooling,
        "sentence_ids": list(sentence_ids),
        "corpus_sha256": corpus_sha256,
    }
    with open(path.with_name(path.name + ".manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def write_triples(path: "str | Path", rows: list[dict]) -> None:
    required = ("id_en", "id_hi", "id_cm", "len_en", "len_hi", "len_cm")
    for row in rows:
        missing = [key for key in required if key not in row]
        if missing:
            raise ValueError(f"triple row lacks {missing}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")


def write_attribution_tsv(
    path: "str | Path", rows: list[tuple[str, str, float, str]]
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for sentence_id, token, score, tag in rows:
            writer.writerow([sentence_id, token, repr(float(score)), tag])
