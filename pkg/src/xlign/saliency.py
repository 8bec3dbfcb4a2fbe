"""Rank-Inverse attribution transform and language-wise aggregation.

Raw token attributions are converted to Rank-Inverse (RI) values: tokens are
ranked by descending attribution magnitude and each receives 1/rank. RI is
scale-free, which makes saliency comparable across sentences of different
attribution magnitudes. Language-level saliency is the pooled mean RI over
all tokens carrying that language tag, corpus-wide.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path


class TokenTag(enum.Enum):
    """Word-level language label. OTHER covers special tokens, punctuation,
    and anything else excluded from language aggregation."""

    EN = "en"
    HI = "hi"
    OTHER = "other"

    @classmethod
    def parse(cls, text: str) -> "TokenTag":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown token tag: {text!r}") from None


@dataclass
class AttributionRecord:
    """Per-sentence raw attributions with aligned tokens and language tags."""

    sentence_id: str
    tokens: list = field(default_factory=list)
    scores: list = field(default_factory=list)
    tags: list = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.tokens) == len(self.scores) == len(self.tags)):
            raise ValueError(
                f"record {self.sentence_id!r}: tokens/scores/tags lengths differ"
            )
        self.scores = [float(s) for s in self.scores]
        if any(not math.isfinite(s) for s in self.scores):
            raise ValueError(f"record {self.sentence_id!r}: non-finite score")
        self.tags = [t if isinstance(t, TokenTag) else TokenTag.parse(t) for t in self.tags]

    def __len__(self) -> int:
        return len(self.tokens)


def rank_inverse(scores) -> list:
    """RI transform: rank tokens by descending |score| (ties broken by
    earlier position getting the smaller rank) and return 1/rank per token."""
    scores = [float(s) for s in scores]
    if not scores:
        raise ValueError("rank_inverse requires a non-empty score list")
    if any(not math.isfinite(s) for s in scores):
        raise ValueError("non-finite score")
    order = sorted(range(len(scores)), key=lambda i: (-abs(scores[i]), i))
    out = [0.0] * len(scores)
    for rank, i in enumerate(order, start=1):
        out[i] = 1.0 / rank
    return out


def language_saliency(records) -> dict:
    """Pooled mean RI per language tag over a corpus of attribution records.

    RI is computed within each sentence; the mean for EN (resp. HI) pools all
    tokens with that tag across all records. OTHER tokens never contribute.
    A language with no tokens anywhere is omitted from the result with a
    warning rather than reported as 0.
    """
    records = list(records)
    if not records:
        raise ValueError("no attribution records")
    totals = {TokenTag.EN: 0.0, TokenTag.HI: 0.0}
    counts = {TokenTag.EN: 0, TokenTag.HI: 0}
    for record in records:
        if len(record) == 0:
            raise ValueError(f"record {record.sentence_id!r} has no tokens")
        ri = rank_inverse(record.scores)
        for value, tag in zip(ri, record.tags):
            if tag is TokenTag.OTHER:
                continue
            totals[tag] += value
            counts[tag] += 1
    result = {}
    for tag in (TokenTag.EN, TokenTag.HI):
        if counts[tag] == 0:
            warnings.warn(
                f"no {tag.value} tokens in corpus; language omitted", stacklevel=2
            )
            continue
        result[tag] = totals[tag] / counts[tag]
    return result


def read_attributions(path) -> list:
    """Load records from a delimited text file with rows
    (sentence_id, token, score, tag). Rows sharing a sentence_id must be
    contiguous; token order inside a sentence is file order."""
    path = Path(path)
    grouped: dict[str, AttributionRecord] = {}
    order: list[str] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter="\t")
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            sid, token, score, tag = row
            if sid not in grouped:
                grouped[sid] = AttributionRecord(sid, [], [], [])
                order.append(sid)
            record = grouped[sid]
            record.tokens.append(token)
            record.scores.append(float(score))
            record.tags.append(TokenTag.parse(tag))
    records = [grouped[sid] for sid in order]
    for record in records:
        if any(not math.isfinite(s) for s in record.scores):
            raise ValueError(f"record {record.sentence_id!r}: non-finite score")
    if not records:
        raise ValueError(f"{path}: no attribution rows")
    return records


def write_attributions(path, records) -> None:
    """Inverse of read_attributions."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for record in records:
            for token, score, tag in zip(record.tokens, record.scores, record.tags):
                writer.writerow([record.sentence_id, token, repr(score), tag.value])
