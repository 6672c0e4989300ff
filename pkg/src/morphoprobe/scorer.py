"""Masked-LM scorer clients: a deterministic in-process mock and an HTTP
client for the reference scorer service.

Both expose the same three operations: score article candidates at a
masked position, fetch per-layer hidden states, and report identifying
metadata for the vocabulary handshake. Probabilities are always the
full-vocabulary softmax restricted to the candidates (never renormalized
over them), so log-odds equals the raw logit difference.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np
import requests

from .errors import (
    BadLayer,
    ScorerUnavailable,
    UnknownCandidate,
    VocabMismatch,
)
from .tokenization import Vocabulary, vocab_digest

MASK_PIECE = "[MASK]"


@dataclass(frozen=True)
class MaskQuery:
    """A full frame with one masked position and the candidate pieces to score."""

    tokens: tuple[str, ...]
    mask_index: int
    candidates: tuple[str, ...]

    def __post_init__(self):
        if not (0 <= self.mask_index < len(self.tokens)):
            raise ValueError(f"mask_index {self.mask_index} out of range")
        if self.tokens[self.mask_index] != MASK_PIECE:
            raise ValueError(f"tokens[{self.mask_index}] is not {MASK_PIECE}")
        if not self.candidates:
            raise ValueError("candidates must be non-empty")


@dataclass(frozen=True)
class MaskResponse:
    """Raw logits and full-vocabulary softmax probabilities per candidate."""

    logits: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.logits) != len(self.probabilities):
            raise ValueError("logits and probabilities length mismatch")


@dataclass(frozen=True)
class HiddenStatesResponse:
    """Hidden states indexed [layer][position][dimension]."""

    states: np.ndarray
    layers: tuple[int, ...]
    dimension: int

    def __post_init__(self):
        if self.states.shape[0] != len(self.layers):
            raise ValueError("layer count does not match states")
        if self.states.shape[2] != self.dimension:
            raise ValueError("dimension does not match states")


@dataclass(frozen=True)
class ScorerInfo:
    vocab_digest: str
    depth: int
    dimension: int


class Scorer(Protocol):
    def info(self) -> ScorerInfo: ...

    def score_masked(self, query: MaskQuery) -> MaskResponse: ...

    def fetch_hidden_states(self, tokens: Sequence[str], layers: Sequence[int]) -> HiddenStatesResponse: ...


def handshake(scorer: Scorer, vocab: Vocabulary) -> ScorerInfo:
    """Fetch scorer metadata and verify it serves the loaded vocabulary.

    Raises VocabMismatch when the digests differ.
    """
    info = scorer.info()
    local = vocab_digest(vocab)
    if info.vocab_digest != local:
        raise VocabMismatch(f"scorer vocab digest {info.vocab_digest[:12]}.. != local {local[:12]}..")
    return info


def _hash_unit(seed: int, *parts: str) -> float:
    """Stable uniform draw in [0, 1) keyed by seed and string parts."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode("ascii"))
    for part in parts:
        h.update(b"\x1f")
        h.update(part.encode("utf-8"))
    return int.from_bytes(h.digest(), "big") / 2.0**64


def _hash_seed(seed: int, *parts: str) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode("ascii"))
    for part in parts:
        h.update(b"\x1f")
        h.update(part.encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class MockScorer:
    """Pure-function scorer for hermetic tests and offline runs.

    Each (frame, piece) logit is a deterministic function of (seed, frame
    tokens, piece): a seeded hash of the token sequence, uniform in
    [-2, 2) and shared by every piece, plus the bias table's value for
    each (suffix, piece) key whose suffix ends the frame's last noun
    token (several matching suffixes sum). With no bias all candidates
    therefore tie exactly; ground truth is whatever the bias encodes.
    Probabilities are the softmax over the whole vocabulary, so the
    logit/log-odds identity holds exactly as it does for the real model.
    """

    vocab: Vocabulary
    seed: int = 0
    bias_table: dict[tuple[str, str], float] = field(default_factory=dict)
    depth: int = 12
    dimension: int = 16

    def info(self) -> ScorerInfo:
        return ScorerInfo(vocab_digest=vocab_digest(self.vocab), depth=self.depth, dimension=self.dimension)

    def _last_noun_token(self, tokens: Sequence[str]) -> str:
        for tok in reversed(tokens):
            if tok not in self.vocab.special_pieces:
                return tok
        return ""

    def score_masked(self, query: MaskQuery) -> MaskResponse:
        for candidate in query.candidates:
            if candidate not in self.vocab:
                raise UnknownCandidate(f"candidate {candidate!r} not in vocabulary")
        anchor = self._last_noun_token(query.tokens)
        base = 4.0 * _hash_unit(self.seed, "\x1e".join(query.tokens)) - 2.0
        logits = np.full(len(self.vocab), base, dtype=np.float64)
        for (suffix, piece), value in self.bias_table.items():
            if piece in self.vocab and anchor.endswith(suffix):
                logits[self.vocab.id_of(piece)] += value
        shifted = logits - logits.max()
        probs = np.exp(shifted)
        probs /= probs.sum()
        idx = [self.vocab.id_of(c) for c in query.candidates]
        return MaskResponse(
            logits=tuple(float(logits[i]) for i in idx),
            probabilities=tuple(float(probs[i]) for i in idx),
        )

    def fetch_hidden_states(self, tokens: Sequence[str], layers: Sequence[int]) -> HiddenStatesResponse:
        for layer in layers:
            if not (1 <= layer <= self.depth):
                raise BadLayer(f"layer {layer} outside [1, {self.depth}]")
        states = np.empty((len(layers), len(tokens), self.dimension), dtype=np.float64)
        for li, layer in enumerate(layers):
            for pi, token in enumerate(tokens):
                rng = np.random.default_rng(_hash_seed(self.seed, token, str(layer)))
                states[li, pi] = rng.standard_normal(self.dimension)
        return HiddenStatesResponse(states=states, layers=tuple(layers), dimension=self.dimension)


class RemoteScorer:
    """HTTP client for the scorer wire protocol.

    Transport failures and 5xx responses are retried with exponential
    backoff (3 retries by default) before raising ScorerUnavailable.
    Thread-safe: each request is independent, so calls may be issued from
    multiple threads at once.
    """

    def __init__(
        self,
        base_url: str,
        vocab: Vocabulary | None = None,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 0.5,
    ):
        self.base_url = base_url.rstrip("/")
        self.vocab = vocab
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        url = self.base_url + path
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = requests.request(method, url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
            else:
                if response.status_code < 500:
                    if response.status_code >= 400:
                        raise UnknownCandidate(f"{url} -> {response.status_code}: {response.text}")
                    return response.json()
                last_error = ScorerUnavailable(f"{url} -> {response.status_code}")
            if attempt < self.max_retries:
                time.sleep(self.backoff * 2**attempt)
        raise ScorerUnavailable(f"{url} unreachable after {self.max_retries + 1} attempts") from last_error

    def info(self) -> ScorerInfo:
        data = self._request("GET", "/v1/info")
        return ScorerInfo(
            vocab_digest=data["vocab_digest"],
            depth=int(data["depth"]),
            dimension=int(data["dimension"]),
        )

    def score_masked(self, query: MaskQuery) -> MaskResponse:
        if self.vocab is not None:
            for candidate in query.candidates:
                if candidate not in self.vocab:
                    raise UnknownCandidate(f"candidate {candidate!r} not in vocabulary")
        data = self._request(
            "POST",
            "/v1/mask_predict",
            {
                "tokens": list(query.tokens),
                "mask_index": query.mask_index,
                "candidates": list(query.candidates),
            },
        )
        return MaskResponse(
            logits=tuple(float(x) for x in data["logits"]),
            probabilities=tuple(float(x) for x in data["probabilities"]),
        )

    def fetch_hidden_states(self, tokens: Sequence[str], layers: Sequence[int]) -> HiddenStatesResponse:
        data = self._request(
            "POST",
            "/v1/hidden_states",
            {"tokens": list(tokens), "layers": list(layers)},
        )
        states = np.asarray(data["states"], dtype=np.float64)
        return HiddenStatesResponse(states=states, layers=tuple(layers), dimension=int(data["dimension"]))


def score_masked_batch(
    scorer: Scorer, queries: Sequence[MaskQuery], concurrency: int = 8
) -> list[MaskResponse]:
    """Score queries with bounded parallelism, preserving submission order."""
    if concurrency <= 1 or len(queries) <= 1:
        return [scorer.score_masked(q) for q in queries]
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        return list(pool.map(scorer.score_masked, queries))
