"""Encoder backends.

Every backend exposes the same small surface the export routines need:

- ``encode(text, max_length)``: tokenize one sentence to an Encoding
- ``hidden_states(ids, mask)``: per-layer hidden states, a list of
  (batch, seq, dim) tensors whose entry 0 is the embedding-layer output
- ``input_embeddings(ids)``: token embeddings before any mixing, the
  surface integrated gradients interpolates on
- ``cls_from_embeddings(emb, mask)``: final-layer [CLS] vector computed
  from token embeddings, differentiable w.r.t. ``emb``

The "toy" backend is a two-block transformer with seeded weights: small
enough for tests, real enough to exercise every export path.  Any other
model id is resolved through Hugging Face transformers.
"""

from __future__ import annotations

import torch
from torch import nn

from .toytok import PAD_ID, Encoding, ToyTokenizer


class ToyEncoder(nn.Module):
    def __init__(
        self,
        d_model: int = 16,
        n_layers: int = 2,
        n_heads: int = 2,
        dim_feedforward: int = 32,
        vocab_size: int = 512,
        max_positions: int = 64,
        seed: int = 0,
    ) -> None:
        super().__init__()
        torch.manual_seed(seed)  # weights are a pure function of the seed
        self.tok = nn.Embedding(vocab_size, d_model, padding_idx=PAD_ID)
        self.pos = nn.Embedding(max_positions, d_model)
        # pre-LN blocks: a trailing LayerNorm would pin the [CLS] norm near
        # sqrt(d_model), leaving the attribution target f(x)-f(baseline)
        # at round-off scale and its relative completeness gap unbounded
        self.blocks = nn.ModuleList(
            nn.TransformerEncoderLayer(
                d_model, n_heads, dim_feedforward, dropout=0.0,
                batch_first=True, norm_first=True,
            )
            for _ in range(n_layers)
        )
        self.eval()

    @property
    def d_model(self) -> int:
        return self.tok.embedding_dim

    @property
    def n_layers(self) -> int:
        return len(self.blocks)

    def input_embeddings(self, ids: torch.Tensor) -> torch.Tensor:
        return self.tok(ids)

    def hidden_from_embeddings(
        self, emb: torch.Tensor, mask: torch.Tensor
    ) -> list[torch.Tensor]:
        if emb.shape[1] > self.pos.num_embeddings:
            raise ValueError(
                f"sequence length {emb.shape[1]} exceeds "
                f"max_positions={self.pos.num_embeddings}"
            )
        positions = torch.arange(emb.shape[1], device=emb.device)
        h = emb + self.pos(positions)
        states = [h]
        padding = mask == 0
        for block in self.blocks:
            h = block(h, src_key_padding_mask=padding)
            states.append(h)
        return states

    def hidden_states(self, ids: torch.Tensor, mask: torch.Tensor) -> list[torch.Tensor]:
        return self.hidden_from_embeddings(self.input_embeddings(ids), mask)


class ToyBackend:
    def __init__(self, model_id: str, seed: int) -> None:
        self.model_id = model_id
        self.encoder = ToyEncoder(seed=seed)
        self.tokenizer = ToyTokenizer(vocab_size=self.encoder.tok.num_embeddings)
        self.pad_id = PAD_ID

    @property
    def n_layer_outputs(self) -> int:
        # embedding layer plus each transformer block
        return self.encoder.n_layers + 1

    def encode(self, text: str, max_length: int) -> Encoding:
        return self.tokenizer.encode(text, max_length)

    def hidden_states(self, ids: torch.Tensor, mask: torch.Tensor) -> list[torch.Tensor]:
        with torch.no_grad():
            return self.encoder.hidden_states(ids, mask)

    def input_embeddings(self, ids: torch.Tensor) -> torch.Tensor:
        return self.encoder.input_embeddings(ids)

    def cls_from_embeddings(self, emb: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.encoder.hidden_from_embeddings(emb, mask)[-1][:, 0, :]


class HuggingFaceBackend:
    """Adapter for pretrained encoders; requires local model weights."""

    def __init__(self, model_id: str) -> None:
        from transformers import AutoModel, AutoTokenizer

        self.model_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id).eval()
        self.pad_id = self.tokenizer.pad_token_id

    @property
    def n_layer_outputs(self) -> int:
        return self.model.config.num_hidden_layers + 1

    def encode(self, text: str, max_length: int) -> Encoding:
        enc = self.tokenizer(text, truncation=True, max_length=max_length)
        full_len = len(self.tokenizer(text, truncation=False)["input_ids"])
        word_ids = enc.word_ids()
        tokens = self.tokenizer.convert_ids_to_tokens(enc["input_ids"])
        word_texts: dict[int, str] = {}
        for tok, w in zip(tokens, word_ids):
            if w is not None:
                word_texts[w] = word_texts.get(w, "") + tok.removeprefix("##")
        return Encoding(
            ids=list(enc["input_ids"]),
            word_index=list(word_ids),
            words=[word_texts[w] for w in sorted(word_texts)],
            truncated=full_len > len(enc["input_ids"]),
        )

    def hidden_states(self, ids: torch.Tensor, mask: torch.Tensor) -> list[torch.Tensor]:
        with torch.no_grad():
            out = self.model(input_ids=ids, attention_mask=mask, output_hidden_states=True)
        return list(out.hidden_states)

    def input_embeddings(self, ids: torch.Tensor) -> torch.Tensor:
        return self.model.get_input_embeddings()(ids)

    def cls_from_embeddings(self, emb: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        out = self.model(inputs_embeds=emb, attention_mask=mask, output_hidden_states=True)
        return out.hidden_states[-1][:, 0, :]


def resolve_backend(model_id: str):
    """"toy" or "toy:<seed>" build the seeded toy encoder; anything else is
    treated as a Hugging Face model id."""
    if model_id == "toy" or model_id.startswith("toy:"):
        seed = int(model_id.partition(":")[2]) if ":" in model_id else 0
        return ToyBackend(model_id, seed=seed)
    return HuggingFaceBackend(model_id)
