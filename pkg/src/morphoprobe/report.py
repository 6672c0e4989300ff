"""Figure rendering for the report path.

Renders the three standard views of a run to PNG files next to the
delimited outputs: log-odds distributions by number and scheme, LDA
projections, and log frequency by tokenization scheme. Everything draws
through the Agg backend so reports work headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .lexicon import NounEntry
from .probe import Number, ProbeResult
from .tokenization import Scheme, TokenizationRecord, Variant

_SCHEME_COLORS = {
    Scheme.SINGLE_TOKEN: "tab:blue",
    Scheme.MORPHEMIC: "tab:green",
    Scheme.NON_MORPHEMIC: "tab:orange",
}


def _density(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Gaussian kernel density estimate with Silverman's bandwidth."""
    n = len(values)
    sd = values.std(ddof=1) if n > 1 else 1.0
    bandwidth = max(1.06 * sd * n ** (-1 / 5), 1e-3)
    diffs = (grid[:, None] - values[None, :]) / bandwidth
    return np.exp(-0.5 * diffs**2).sum(axis=1) / (n * bandwidth * np.sqrt(2 * np.pi))


def plot_logodds_density(results: Sequence[ProbeResult], out_path: str | Path) -> Path:
    """One panel per variant: log-odds density per scheme, split by number."""
    out_path = Path(out_path)
    variants = [v for v in (Variant.ORIGINAL, Variant.ARTIFICIAL)
                if any(r.variant is v for r in results)]
    fig, axes = plt.subplots(1, max(len(variants), 1), figsize=(5.0 * max(len(variants), 1), 3.6), squeeze=False)
    lo = min(r.log_odds for r in results)
    hi = max(r.log_odds for r in results)
    pad = 0.1 * (hi - lo) or 1.0
    grid = np.linspace(lo - pad, hi + pad, 300)
    for ax, variant in zip(axes[0], variants):
        for scheme, color in _SCHEME_COLORS.items():
            for number, style in ((Number.SINGULAR, "--"), (Number.PLURAL, "-")):
                values = np.array([
                    r.log_odds for r in results
                    if r.variant is variant and r.scheme is scheme and r.number is number
                ])
                if len(values) == 0:
                    continue
                ax.plot(grid, _density(values, grid), style, color=color,
                        label=f"{scheme.value} ({number.value})")
        ax.axvline(0.0, color="gray", linewidth=0.8)
        ax.set_title(f"{variant.value} tokenization")
        ax.set_xlabel("log-odds (plural vs singular article)")
        ax.set_ylabel("density")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_projections(
    class_labels: Sequence[str],
    coordinates: np.ndarray,
    out_path: str | Path,
) -> Path:
    """Projection view: densities along one axis, or a scatter of the first two."""
    out_path = Path(out_path)
    labels = sorted(set(class_labels))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if coordinates.shape[1] == 1:
        lo = coordinates[:, 0].min()
        hi = coordinates[:, 0].max()
        pad = 0.1 * (hi - lo) or 1.0
        grid = np.linspace(lo - pad, hi + pad, 300)
        for label in labels:
            values = np.array([c[0] for lab, c in zip(class_labels, coordinates) if lab == label])
            if len(values):
                ax.plot(grid, _density(values, grid), label=label)
        ax.set_xlabel("projection on discriminant axis")
        ax.set_ylabel("density")
    else:
        for label in labels:
            points = np.array([c[:2] for lab, c in zip(class_labels, coordinates) if lab == label])
            if len(points):
                ax.scatter(points[:, 0], points[:, 1], s=12, alpha=0.7, label=label)
        ax.set_xlabel("axis 0")
        ax.set_ylabel("axis 1")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_freq_by_scheme(
    classified: Sequence[tuple[NounEntry, TokenizationRecord]],
    out_path: str | Path,
) -> Path:
    """Box plot of log frequency per original tokenization scheme."""
    out_path = Path(out_path)
    groups = []
    labels = []
    for scheme in (Scheme.MORPHEMIC, Scheme.SINGLE_TOKEN, Scheme.NON_MORPHEMIC):
        values = [
            entry.log_frequency
            for entry, record in classified
            if record.scheme is scheme and entry.log_frequency is not None and not record.contains_unk
        ]
        if values:
            groups.append(values)
            labels.append(scheme.value)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.boxplot(groups, tick_labels=labels)
    ax.set_ylabel("log10 frequency (per million)")
    ax.set_xlabel("tokenization scheme")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
