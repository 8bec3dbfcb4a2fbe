"""Toy subword tokenizer.

Splits text into words (letter/digit/combining-mark runs) and punctuation
runs, then each word into fixed-width character chunks; non-initial chunks
carry the "##" continuation prefix.  Subword ids come from a salted digest
into a small hash vocabulary, so identical strings map to identical ids
across runs and machines.  Encoded sequences are [CLS] tokens... [SEP]
with whole-word truncation: a word never straddles the length limit.
"""

from __future__ import annotations

import hashlib
import logging
import unicodedata
from dataclasses import dataclass

logger = logging.getLogger(__name__)

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
SPECIAL_TOKENS = {PAD_ID: "[PAD]", CLS_ID: "[CLS]", SEP_ID: "[SEP]"}


def _is_word_char(ch: str) -> bool:
    # marks (category M) must stay inside words: Devanagari matras and the
    # virama are combining marks, and splitting on them shreds conjuncts
    return ch == "_" or unicodedata.category(ch)[0] in "LNM"


@dataclass(frozen=True)
class Encoding:
    ids: list[int]
    # word_index[t] is the word ordinal the subword at position t came from,
    # None for special tokens; used to pool subword attributions per word
    word_index: list[int | None]
    words: list[str]
    truncated: bool

    @property
    def content_length(self) -> int:
        return sum(1 for w in self.word_index if w is not None)


class ToyTokenizer:
    def __init__(self, vocab_size: int = 512, chunk: int = 4) -> None:
        if vocab_size <= len(SPECIAL_TOKENS):
            raise ValueError("vocab_size must exceed the special-token count")
        if chunk < 1:
            raise ValueError("chunk must be >= 1")
        self.vocab_size = int(vocab_size)
        self.chunk = int(chunk)

    def words(self, text: str) -> list[str]:
        out: list[str] = []
        kind = None
        for ch in text:
            if ch.isspace():
                kind = None
                continue
            k = "w" if _is_word_char(ch) else "p"
            if k == kind:
                out[-1] += ch
            else:
                out.append(ch)
                kind = k
        return out

    def subwords(self, word: str) -> list[str]:
        c = self.chunk
        pieces = [word[i : i + c] for i in range(0, len(word), c)]
        return [pieces[0]] + ["##" + p for p in pieces[1:]]

    def subword_id(self, subword: str) -> int:
        digest = hashlib.md5(subword.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:4], "little")
        n_special = len(SPECIAL_TOKENS)
        return n_special + bucket % (self.vocab_size - n_special)

    def encode(self, text: str, max_length: int) -> Encoding:
        if max_length < 3:
            raise ValueError("max_length must fit [CLS], one token, and [SEP]")
        ids = [CLS_ID]
        word_index: list[int | None] = [None]
        words = self.words(text)
        truncated = False
        for w, word in enumerate(words):
            pieces = self.subwords(word)
            if len(ids) + len(pieces) > max_length - 1:
                truncated = True
                logger.warning(
                    "truncated %r at word %d/%d (max_length=%d)",
                    text, w, len(words), max_length,
                )
                break
            ids.extend(self.subword_id(p) for p in pieces)
            word_index.extend([w] * len(pieces))
        ids.append(SEP_ID)
        word_index.append(None)
        return Encoding(ids=ids, word_index=word_index, words=words, truncated=truncated)
