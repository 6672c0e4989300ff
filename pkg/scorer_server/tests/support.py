"""Shared paths and schema loading for the server tests."""

import json
from pathlib import Path

REPO_ROOT = Path(__file__).parent.parent.parent
VOCAB_FILE = REPO_ROOT / "src" / "morphoprobe" / "fixtures" / "vocab.txt"
SCHEMA_DIR = REPO_ROOT / "schemas"

TINY_LAYERS = 2
TINY_DIM = 32


def load_schema(name: str, part: str) -> dict:
    doc = json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
    return doc["properties"][part]
