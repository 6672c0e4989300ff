"""Noun embeddings: layer/position averaging and the embedding store.

A noun's embedding is the arithmetic mean of its hidden-state vectors over
the selected layers and the positions its tokens occupy in the frame. The
store is a flat binary file (or a CSV twin for interchange) of labelled
vectors, one record per (wordform, class label).
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import BadInput, EmptySelection
from ..scorer import HiddenStatesResponse

MAGIC = b"EMBSTOR1"

CLASS_SINGULAR = "singular"
CLASS_PLURAL_SINGLE = "plural-single-token"
CLASS_PLURAL_MORPHEMIC = "plural-morphemic"
CLASS_PLURAL_NON_MORPHEMIC = "plural-non-morphemic"
CLASS_PLURAL_ARTIFICIAL = "plural-artificial"

ALL_CLASSES = (
    CLASS_SINGULAR,
    CLASS_PLURAL_SINGLE,
    CLASS_PLURAL_MORPHEMIC,
    CLASS_PLURAL_NON_MORPHEMIC,
    CLASS_PLURAL_ARTIFICIAL,
)


@dataclass(frozen=True)
class EmbeddingRecord:
    wordform: str
    class_label: str
    vector: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.vector)):
            raise BadInput(f"non-finite embedding for {self.wordform!r}")


def mean_embedding(states: HiddenStatesResponse, noun_positions: Sequence[int]) -> np.ndarray:
    """Mean hidden-state vector over all (layer, noun position) pairs."""
    if len(noun_positions) == 0:
        raise EmptySelection("no noun positions selected")
    n_positions = states.states.shape[1]
    for pos in noun_positions:
        if not (0 <= pos < n_positions):
            raise BadInput(f"position {pos} outside frame of length {n_positions}")
    selected = states.states[:, list(noun_positions), :]
    return selected.reshape(-1, states.dimension).mean(axis=0)


def write_store(path: str | Path, records: Sequence[EmbeddingRecord]) -> None:
    """Binary store: MAGIC | u32 dim | u64 count, then per record
    u16 label length | label | dim float64 | u16 wordform length | wordform.
    All integers and floats little-endian."""
    if not records:
        raise ValueError("refusing to write an empty store")
    dim = len(records[0].vector)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IQ", dim, len(records)))
        for rec in records:
            if len(rec.vector) != dim:
                raise BadInput("records of mixed dimension")
            label = rec.class_label.encode("utf-8")
            wordform = rec.wordform.encode("utf-8")
            f.write(struct.pack("<H", len(label)))
            f.write(label)
            f.write(np.asarray(rec.vector, dtype="<f8").tobytes())
            f.write(struct.pack("<H", len(wordform)))
            f.write(wordform)


def read_store(path: str | Path) -> list[EmbeddingRecord]:
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"not an embedding store: bad magic {magic!r}")
        dim, count = struct.unpack("<IQ", f.read(12))
        records = []
        for _ in range(count):
            (label_len,) = struct.unpack("<H", f.read(2))
            label = f.read(label_len).decode("utf-8")
            vector = np.frombuffer(f.read(8 * dim), dtype="<f8").astype(np.float64)
            (word_len,) = struct.unpack("<H", f.read(2))
            wordform = f.read(word_len).decode("utf-8")
            records.append(EmbeddingRecord(wordform=wordform, class_label=label, vector=vector))
    return records


def write_store_csv(path: str | Path, records: Sequence[EmbeddingRecord]) -> None:
    if not records:
        raise ValueError("refusing to write an empty store")
    dim = len(records[0].vector)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["wordform", "class_label"] + [f"v{i}" for i in range(dim)])
        for rec in records:
            writer.writerow([rec.wordform, rec.class_label] + [repr(float(x)) for x in rec.vector])


def read_store_csv(path: str | Path) -> list[EmbeddingRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        rows = csv.reader(f)
        header = next(rows)
        dim = len(header) - 2
        for row in rows:
            vector = np.array([float(x) for x in row[2 : 2 + dim]], dtype=np.float64)
            records.append(EmbeddingRecord(wordform=row[0], class_label=row[1], vector=vector))
    return records


def stack_vectors(records: Iterable[EmbeddingRecord]) -> np.ndarray:
    return np.vstack([rec.vector for rec in records])
