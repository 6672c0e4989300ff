"""Masked-article probing: frame construction, article log-odds, and
accuracy aggregation.

Each noun form is placed in the bare frame ``[CLS] [MASK] form [SEP]`` and
the scorer rates the singular and plural article of the noun's gender at
the masked position. The log-odds ln P(plural article) − ln P(singular
article) encodes the model's number prediction: positive means plural.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import BadNounTokens, DegenerateDistribution, ScorerUnavailable, UnknownCandidate
from .lexicon import Gender, Lexicon
from .scorer import MaskQuery, MaskResponse, Scorer, handshake, score_masked_batch
from .tokenization import (
    Scheme,
    TokenizationRecord,
    Variant,
    Vocabulary,
    artificial_tokenize,
    classify_scheme,
    tokenize,
)


class ArticleType(enum.Enum):
    DEFINITE = "definite"
    INDEFINITE = "indefinite"


class Number(enum.Enum):
    SINGULAR = "singular"
    PLURAL = "plural"


@dataclass(frozen=True)
class ArticleSet:
    """The singular/plural article pair for one gender and article type."""

    gender: Gender
    article_type: ArticleType
    singular: str
    plural: str


_ARTICLES = {
    (Gender.MASCULINE, ArticleType.DEFINITE): ("el", "los"),
    (Gender.FEMININE, ArticleType.DEFINITE): ("la", "las"),
    (Gender.MASCULINE, ArticleType.INDEFINITE): ("un", "unos"),
    (Gender.FEMININE, ArticleType.INDEFINITE): ("una", "unas"),
}


def article_set(gender: Gender, article_type: ArticleType) -> ArticleSet:
    singular, plural = _ARTICLES[(gender, article_type)]
    return ArticleSet(gender=gender, article_type=article_type, singular=singular, plural=plural)


MASK_INDEX = 1  # the article slot, right after [CLS]


def frame_tokens(noun_tokens: Sequence[str]) -> tuple[str, ...]:
    """The masked-article frame: ["[CLS]", "[MASK]"] + noun tokens + ["[SEP]"].

    Raises BadNounTokens if the noun tokens are empty or contain special
    pieces.
    """
    from .tokenization import SPECIAL_PIECES

    if not noun_tokens:
        raise BadNounTokens("noun tokens are empty")
    bad = [t for t in noun_tokens if t in SPECIAL_PIECES]
    if bad:
        raise BadNounTokens(f"special pieces inside noun tokens: {bad}")
    return ("[CLS]", "[MASK]", *noun_tokens, "[SEP]")


def build_frame(noun_tokens: Sequence[str], candidates: Sequence[str]) -> MaskQuery:
    """Wrap noun tokens into a masked-article query over ``candidates``."""
    return MaskQuery(tokens=frame_tokens(noun_tokens), mask_index=MASK_INDEX, candidates=tuple(candidates))


def noun_positions(noun_tokens: Sequence[str]) -> list[int]:
    """Positions the noun tokens occupy inside their frame."""
    return list(range(MASK_INDEX + 1, MASK_INDEX + 1 + len(noun_tokens)))


def log_odds(response: MaskResponse, plural_idx: int, singular_idx: int) -> float:
    """ln P(candidates[plural_idx]) − ln P(candidates[singular_idx])."""
    p_plural = response.probabilities[plural_idx]
    p_singular = response.probabilities[singular_idx]
    if p_plural <= 0.0 or p_singular <= 0.0:
        raise DegenerateDistribution(f"non-positive probability: {p_plural}, {p_singular}")
    return math.log(p_plural) - math.log(p_singular)


@dataclass(frozen=True)
class ProbeResult:
    """One scored presentation of a wordform.

    ``scheme`` is always the noun's original tokenization category, also
    on singular and artificial-variant rows, so accuracy cells are keyed
    by (original scheme, variant).
    """

    lemma: str
    wordform: str
    number: Number
    scheme: Scheme
    variant: Variant
    article_type: ArticleType
    log_odds: float
    correct: bool


def _is_correct(number: Number, value: float) -> bool:
    # zero log-odds is a tie and counts as incorrect for either number
    if number is Number.PLURAL:
        return value > 0.0
    return value < 0.0


RESULTS_HEADER = ("lemma", "wordform", "number", "scheme", "variant", "article_type", "log_odds", "correct")


def write_results_csv(out: TextIO, results: Iterable[ProbeResult], config_digest: str | None = None) -> None:
    if config_digest is not None:
        out.write(f"# config: {config_digest}\r\n")
    writer = csv.writer(out)
    writer.writerow(RESULTS_HEADER)
    for r in results:
        writer.writerow(
            (
                r.lemma,
                r.wordform,
                r.number.value,
                r.scheme.value,
                r.variant.value,
                r.article_type.value,
                repr(r.log_odds),
                "true" if r.correct else "false",
            )
        )


def read_results_csv(path: str | Path) -> list[ProbeResult]:
    results = []
    with open(path, encoding="utf-8", newline="") as f:
        rows = csv.reader(line for line in f if not line.startswith("#"))
        header = tuple(next(rows))
        if header != RESULTS_HEADER:
            raise ValueError(f"unexpected results header: {header}")
        for row in rows:
            results.append(
                ProbeResult(
                    lemma=row[0],
                    wordform=row[1],
                    number=Number(row[2]),
                    scheme=Scheme(row[3]),
                    variant=Variant(row[4]),
                    article_type=ArticleType(row[5]),
                    log_odds=float(row[6]),
                    correct=row[7] == "true",
                )
            )
    return results


@dataclass(frozen=True)
class _ProbeItem:
    lemma: str
    wordform: str
    number: Number
    scheme: Scheme
    variant: Variant
    article_type: ArticleType
    query: MaskQuery
    plural_idx: int
    singular_idx: int


def _entry_items(entry, vocab: Vocabulary, variants, article_types) -> list[_ProbeItem] | None:
    """Probe items for one entry, or None when UNK excludes it entirely."""
    record = classify_scheme(entry, vocab)
    if record.contains_unk:
        return None
    lemma_tokens = tokenize(entry.lemma, vocab)
    if vocab.unk_piece in lemma_tokens:
        return None

    forms: list[tuple[Number, str, tuple[str, ...], Variant]] = [
        (Number.SINGULAR, entry.lemma, tuple(lemma_tokens), Variant.ORIGINAL)
    ]
    if Variant.ORIGINAL in variants:
        forms.append((Number.PLURAL, entry.plural, record.tokens, Variant.ORIGINAL))
    if Variant.ARTIFICIAL in variants and record.scheme in (Scheme.SINGLE_TOKEN, Scheme.NON_MORPHEMIC):
        artificial = artificial_tokenize(entry, vocab)
        forms.append((Number.PLURAL, entry.plural, artificial.tokens, Variant.ARTIFICIAL))

    items = []
    for number, wordform, tokens, variant in forms:
        for article_type in (ArticleType.DEFINITE, ArticleType.INDEFINITE):
            if article_type not in article_types:
                continue
            articles = article_set(entry.gender, article_type)
            query = build_frame(tokens, (articles.singular, articles.plural))
            items.append(
                _ProbeItem(
                    lemma=entry.lemma,
                    wordform=wordform,
                    number=number,
                    scheme=record.scheme,
                    variant=variant,
                    article_type=article_type,
                    query=query,
                    plural_idx=1,
                    singular_idx=0,
                )
            )
    return items


def run_probe(
    lexicon: Lexicon,
    vocab: Vocabulary,
    scorer: Scorer,
    variants: Sequence[Variant] = (Variant.ORIGINAL, Variant.ARTIFICIAL),
    article_types: Sequence[ArticleType] = (ArticleType.DEFINITE, ArticleType.INDEFINITE),
    concurrency: int = 8,
    flush_path: str | Path | None = None,
    flush_every: int = 500,
    config_digest: str | None = None,
) -> list[ProbeResult]:
    """Probe every lexicon entry and return results in deterministic order.

    Order is lexicon order, then singular / plural-original /
    plural-artificial, then definite / indefinite. Entries whose plural or
    lemma tokenization contains UNK are skipped. If ``flush_path`` is set,
    partial results are flushed there every ``flush_every`` probes so a
    scorer failure loses bounded work; the partial file is retained when
    ScorerUnavailable aborts the run.
    """
    handshake(scorer, vocab)
    for gender in (Gender.MASCULINE, Gender.FEMININE):
        for article_type in ArticleType:
            articles = article_set(gender, article_type)
            for piece in (articles.singular, articles.plural):
                if piece not in vocab:
                    raise UnknownCandidate(f"article {piece!r} not in vocabulary")

    variants = set(variants)
    article_types = set(article_types)
    items: list[_ProbeItem] = []
    for entry in lexicon:
        entry_items = _entry_items(entry, vocab, variants, article_types)
        if entry_items:
            items.extend(entry_items)

    results: list[ProbeResult] = []

    def flush() -> None:
        if flush_path is None:
            return
        with open(flush_path, "w", encoding="utf-8", newline="") as f:
            write_results_csv(f, results, config_digest)

    try:
        for start in range(0, len(items), flush_every):
            chunk = items[start : start + flush_every]
            responses = score_masked_batch(scorer, [it.query for it in chunk], concurrency)
            for item, response in zip(chunk, responses):
                value = log_odds(response, item.plural_idx, item.singular_idx)
                results.append(
                    ProbeResult(
                        lemma=item.lemma,
                        wordform=item.wordform,
                        number=item.number,
                        scheme=item.scheme,
                        variant=item.variant,
                        article_type=item.article_type,
                        log_odds=value,
                        correct=_is_correct(item.number, value),
                    )
                )
            flush()
    except ScorerUnavailable:
        flush()
        raise
    return results


@dataclass(frozen=True)
class CellStats:
    """Accuracy and log-odds location/spread for one (scheme, variant) cell."""

    accuracy: float | None
    n: int
    log_odds_mean: float | None
    log_odds_sd: float | None


def accuracy_table(results: Sequence[ProbeResult]) -> dict[tuple[Scheme, Variant], CellStats]:
    """Per-(scheme, variant) accuracy over plural rows, with log-odds M and SD.

    All six cells are present; a cell with no plural rows reports None
    (the morphemic/artificial cell is structurally empty). SD uses the
    n − 1 denominator, 0.0 for a single row.
    """
    if not results:
        raise ValueError("accuracy_table requires at least one result")
    table: dict[tuple[Scheme, Variant], CellStats] = {}
    for scheme in Scheme:
        for variant in Variant:
            values = [r.log_odds for r in results
                      if r.number is Number.PLURAL and r.scheme is scheme and r.variant is variant]
            hits = sum(1 for r in results
                       if r.number is Number.PLURAL and r.scheme is scheme and r.variant is variant and r.correct)
            n = len(values)
            if n == 0:
                table[(scheme, variant)] = CellStats(None, 0, None, None)
                continue
            mean = sum(values) / n
            sd = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
            table[(scheme, variant)] = CellStats(hits / n, n, mean, sd)
    return table


def accuracy_table_json(table: dict[tuple[Scheme, Variant], CellStats]) -> dict:
    """JSON-ready view of an accuracy table, keyed "scheme/variant"."""
    return {
        f"{scheme.value}/{variant.value}": {
            "accuracy": stats.accuracy,
            "n": stats.n,
            "log_odds_mean": stats.log_odds_mean,
            "log_odds_sd": stats.log_odds_sd,
        }
        for (scheme, variant), stats in table.items()
    }
