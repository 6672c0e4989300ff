"""Ordinary least squares with the regression builders used by the toolkit.

Fits go through a QR decomposition; standard errors come from
sigma^2 (X'X)^-1, and two-sided p-values use the exact Student-t tail
(continued-fraction regularized incomplete beta) for small samples and the
normal approximation above n = 200.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from ..errors import DegenerateClasses, RankDeficient
from ..lexicon import NounEntry
from ..probe import ArticleType, Number, ProbeResult
from ..tokenization import Scheme, TokenizationRecord

NORMAL_APPROX_N = 200


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularized incomplete beta (Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            break
    return h


def _betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided Student-t tail probability P(|T| >= |t|)."""
    if df <= 0:
        raise ValueError("df must be positive")
    return _betainc(df / 2.0, 0.5, df / (df + t * t))


def normal_sf_two_sided(t: float) -> float:
    return math.erfc(abs(t) / math.sqrt(2.0))


@dataclass(frozen=True)
class Coefficient:
    beta: float
    se: float
    t: float
    p: float


@dataclass(frozen=True)
class RegressionSummary:
    coefficients: dict[str, Coefficient]
    r_squared: float
    n: int

    def to_json(self) -> dict:
        return {
            "terms": {
                name: {"beta": c.beta, "se": c.se, "t": c.t, "p": c.p}
                for name, c in self.coefficients.items()
            },
            "r_squared": self.r_squared,
            "n": self.n,
        }


def ols_fit(design: np.ndarray, y: np.ndarray, terms: Sequence[str]) -> RegressionSummary:
    """Least squares via QR, with SEs, t statistics, p-values, and R^2.

    ``terms`` names the design columns (include "intercept" explicitly).
    Raises RankDeficient when the design lacks full column rank and
    ValueError when n <= number of terms.
    """
    X = np.asarray(design, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if len(terms) != p:
        raise ValueError(f"{p} columns but {len(terms)} term names")
    if n <= p:
        raise ValueError(f"need n > {p} observations, got {n}")

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    scale = np.max(np.abs(X), axis=0)
    scale[scale == 0.0] = 1.0
    if np.any(diag <= 1e-10 * np.sqrt(n) * scale):
        raise RankDeficient("design matrix is rank deficient")

    beta = scipy.linalg.solve_triangular(r, q.T @ y, lower=False)
    residuals = y - X @ beta
    rss = float(residuals @ residuals)
    centered = y - y.mean()
    tss = float(centered @ centered)
    r_squared = 0.0 if tss == 0.0 else 1.0 - rss / tss

    sigma2 = rss / (n - p)
    r_inv = scipy.linalg.solve_triangular(r, np.eye(p), lower=False)
    cov = sigma2 * (r_inv @ r_inv.T)
    se = np.sqrt(np.diag(cov))

    coefficients: dict[str, Coefficient] = {}
    for name, b, s in zip(terms, beta, se):
        if s > 0.0:
            t_stat = float(b / s)
            p_val = normal_sf_two_sided(t_stat) if n > NORMAL_APPROX_N else t_sf_two_sided(t_stat, n - p)
        else:
            t_stat = math.inf if b != 0 else 0.0
            p_val = 0.0 if b != 0 else 1.0
        coefficients[name] = Coefficient(beta=float(b), se=float(s), t=t_stat, p=p_val)
    return RegressionSummary(coefficients=coefficients, r_squared=max(0.0, min(1.0, r_squared)), n=n)


_SCHEME_DUMMIES = (Scheme.SINGLE_TOKEN, Scheme.NON_MORPHEMIC)  # morphemic is the reference


def freq_by_scheme(classified: Sequence[tuple[NounEntry, TokenizationRecord]]) -> RegressionSummary:
    """Regress log frequency on tokenization scheme, morphemic as intercept.

    Uses only entries with a frequency value and no UNK tokens. Raises
    DegenerateClasses when fewer than two schemes have frequency data.
    """
    rows = [
        (record.scheme, entry.log_frequency)
        for entry, record in classified
        if entry.log_frequency is not None and not record.contains_unk
    ]
    present = {scheme for scheme, _ in rows}
    if len(present) < 2:
        raise DegenerateClasses(f"need >= 2 schemes with frequency data, got {sorted(s.value for s in present)}")

    terms = ["intercept"] + [f"scheme[{s.value}]" for s in _SCHEME_DUMMIES]
    design = np.zeros((len(rows), len(terms)))
    y = np.empty(len(rows))
    for i, (scheme, freq) in enumerate(rows):
        design[i, 0] = 1.0
        for j, dummy in enumerate(_SCHEME_DUMMIES, start=1):
            design[i, j] = 1.0 if scheme is dummy else 0.0
        y[i] = freq
    if len(present) == 2:
        # drop the column of the absent scheme so the design keeps full rank
        keep = [0] + [j for j, dummy in enumerate(_SCHEME_DUMMIES, start=1) if dummy in present]
        design = design[:, keep]
        terms = [terms[j] for j in keep]
    return ols_fit(design, y, terms)


def logodds_regression(
    results: Sequence[ProbeResult],
    frequencies: Mapping[str, float] | None = None,
) -> RegressionSummary:
    """OLS of log-odds on article type, word number, scheme, and frequency.

    Includes number x scheme and number x frequency interactions; singular
    is the coded level of number and morphemic the scheme reference. Rows
    without a frequency are dropped; when no row has one, the frequency
    terms are dropped entirely with a warning.
    """
    freqs = dict(frequencies or {})
    have_freq = [r for r in results if freqs.get(r.lemma) is not None]
    use_freq = bool(have_freq)
    rows = have_freq if use_freq else list(results)
    if not use_freq:
        warnings.warn("no frequency data joined; frequency terms dropped", stacklevel=2)

    terms = ["intercept", "article[indefinite]", "number[singular]"]
    terms += [f"scheme[{s.value}]" for s in _SCHEME_DUMMIES]
    terms += [f"number[singular]:scheme[{s.value}]" for s in _SCHEME_DUMMIES]
    if use_freq:
        terms += ["log_frequency", "number[singular]:log_frequency"]

    design = np.zeros((len(rows), len(terms)))
    y = np.empty(len(rows))
    for i, r in enumerate(rows):
        singular = 1.0 if r.number is Number.SINGULAR else 0.0
        design[i, 0] = 1.0
        design[i, 1] = 1.0 if r.article_type is ArticleType.INDEFINITE else 0.0
        design[i, 2] = singular
        for j, dummy in enumerate(_SCHEME_DUMMIES):
            is_dummy = 1.0 if r.scheme is dummy else 0.0
            design[i, 3 + j] = is_dummy
            design[i, 5 + j] = singular * is_dummy
        if use_freq:
            freq = freqs[r.lemma]
            design[i, 7] = freq
            design[i, 8] = singular * freq
        y[i] = r.log_odds
    return ols_fit(design, y, terms)
