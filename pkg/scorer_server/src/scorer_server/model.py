"""Masked-LM wrapper: id conversion without re-tokenization, batched
forwards, and the vocabulary digest served at the info endpoint.

Clients send pre-tokenized frames; this side only maps pieces to ids, so
both ends of the wire agree byte-for-byte on segmentation. The digest is
sha256 over the vocabulary pieces in id order joined with newlines, the
same formula the client applies to its vocabulary file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer


class UnknownPiece(Exception):
    def __init__(self, piece: str):
        super().__init__(f"unknown piece {piece!r}")
        self.piece = piece


class BadRequest(Exception):
    """Request is structurally valid JSON but violates the protocol."""


@dataclass
class ForwardResult:
    """Per-frame forward outputs in double precision.

    ``logits`` is [positions, vocab]; ``hidden`` is [depth + 1, positions,
    dimension] with index 0 holding the embedding layer, so 1-based
    transformer layer L lives at ``hidden[L]``.
    """

    logits: np.ndarray
    hidden: np.ndarray


class MaskedLm:
    def __init__(self, model_id_or_path: str, device: str = "cpu"):
        self.tokenizer = AutoTokenizer.from_pretrained(model_id_or_path)
        self.model = AutoModelForMaskedLM.from_pretrained(model_id_or_path, output_hidden_states=True)
        self.model.to(device)
        self.model.eval()
        self.device = device

        vocab = self.tokenizer.get_vocab()
        self.pieces: list[str] = [piece for piece, _ in sorted(vocab.items(), key=lambda kv: kv[1])]
        self.ids = dict(vocab)
        self.vocab_digest = hashlib.sha256("\n".join(self.pieces).encode("utf-8")).hexdigest()
        self.depth = int(self.model.config.num_hidden_layers)
        self.dimension = int(self.model.config.hidden_size)
        self.max_positions = int(getattr(self.model.config, "max_position_embeddings", 512))
        self.mask_piece = self.tokenizer.mask_token
        pad_id = self.tokenizer.pad_token_id
        self.pad_id = int(pad_id) if pad_id is not None else 0

    def ids_for(self, tokens: Sequence[str]) -> list[int]:
        out = []
        for token in tokens:
            if token not in self.ids:
                raise UnknownPiece(token)
            out.append(self.ids[token])
        return out

    def forward_batch(self, id_lists: Sequence[Sequence[int]]) -> list[ForwardResult]:
        """One padded forward pass over several frames."""
        max_len = max(len(ids) for ids in id_lists)
        batch = torch.full((len(id_lists), max_len), self.pad_id, dtype=torch.long)
        attention = torch.zeros((len(id_lists), max_len), dtype=torch.long)
        for i, ids in enumerate(id_lists):
            batch[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            attention[i, : len(ids)] = 1
        with torch.no_grad():
            output = self.model(input_ids=batch.to(self.device), attention_mask=attention.to(self.device))
        logits = output.logits.double().cpu().numpy()
        hidden = torch.stack(output.hidden_states).double().cpu().numpy()
        results = []
        for i, ids in enumerate(id_lists):
            n = len(ids)
            results.append(ForwardResult(logits=logits[i, :n], hidden=hidden[:, i, :n]))
        return results
