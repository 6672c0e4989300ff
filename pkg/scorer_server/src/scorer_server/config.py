"""Server configuration."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ServerConfig:
    """Startup settings for the scorer service.

    ``model`` is a Hugging Face model identifier or a local path holding
    both the masked LM weights and its tokenizer vocabulary.
    ``max_batch_size`` caps how many queued requests one model forward
    may coalesce.
    """

    model: str
    host: str = "127.0.0.1"
    port: int = 8000
    max_batch_size: int = 8
    device: str = "cpu"
