"""Grouped sample means and standard deviations for probe results."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class SummaryStats:
    """Sample mean and SD (n − 1 denominator) for one group.

    A single-element group reports sd = 0.0; its n = 1 is the flag.
    """

    key: tuple[str, ...]
    mean: float
    sd: float
    n: int


def summarize(values: Sequence[float]) -> tuple[float, float, int]:
    """Sample mean and SD of a non-empty sequence."""
    n = len(values)
    if n == 0:
        raise ValueError("cannot summarize an empty group")
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0, 1
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var), n


def grouped_summary(results: Sequence, keys: Sequence[str], value: str = "log_odds") -> list[SummaryStats]:
    """Group records by the named attributes and summarize ``value``.

    Attribute values that are enums contribute their .value to the group
    key. Groups appear in first-occurrence order.
    """
    if not results:
        raise ValueError("grouped_summary requires at least one result")
    groups: dict[tuple[str, ...], list[float]] = {}
    for record in results:
        key = tuple(
            getattr(record, k).value if hasattr(getattr(record, k), "value") else str(getattr(record, k))
            for k in keys
        )
        groups.setdefault(key, []).append(float(getattr(record, value)))
    out = []
    for key, values in groups.items():
        mean, sd, n = summarize(values)
        out.append(SummaryStats(key=key, mean=mean, sd=sd, n=n))
    return out
