"""Parallel corpus loading.

A corpus file is a JSON list of sentence triples.  Row i holds the same
sentence in English, Hindi, and code-mixed form, so row order is the
alignment: every exported embedding matrix keeps this order and row i of
each matrix refers to triple i.

Row keys: id_en, text_en, id_hi, text_hi, id_cm, text_cm.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

LANGUAGES = ("en", "hi", "cm")


@dataclass(frozen=True)
class SentenceTriple:
    ids: dict[str, str]
    texts: dict[str, str]

    def __post_init__(self) -> None:
        for lang in LANGUAGES:
            if lang not in self.ids or not self.ids[lang]:
                raise ValueError(f"triple missing id for {lang!r}")
            if lang not in self.texts or not self.texts[lang].strip():
                raise ValueError(f"triple missing text for {lang!r}")


@dataclass(frozen=True)
class Corpus:
    path: Path
    triples: list[SentenceTriple]
    sha256: str

    def __len__(self) -> int:
        return len(self.triples)

    def ids(self, language: str) -> list[str]:
        return [t.ids[language] for t in self.triples]

    def texts(self, language: str) -> list[str]:
        return [t.texts[language] for t in self.triples]


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    raw = path.read_bytes()
    rows = json.loads(raw.decode("utf-8"))
    if not isinstance(rows, list) or not rows:
        raise ValueError("corpus must be a non-empty JSON list")
    triples = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise ValueError(f"corpus row {i} is not an object")
        try:
            ids = {lang: str(row[f"id_{lang}"]) for lang in LANGUAGES}
            texts = {lang: str(row[f"text_{lang}"]) for lang in LANGUAGES}
        except KeyError as exc:
            raise ValueError(f"corpus row {i} missing key {exc.args[0]!r}") from None
        triples.append(SentenceTriple(ids=ids, texts=texts))
    for lang in LANGUAGES:
        seen = [t.ids[lang] for t in triples]
        if len(set(seen)) != len(seen):
            raise ValueError(f"duplicate {lang} sentence ids in corpus")
    # digest of the file bytes, not just the ids: the hash certifies which
    # texts produced the export, so it must change when any text changes
    return Corpus(path=path, triples=triples, sha256=hashlib.sha256(raw).hexdigest())
