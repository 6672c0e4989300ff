"""Annotated noun lexicon: ingestion, validation, and the plural affix rule.

The lexicon is a user-supplied TSV with header
``lemma\tplural\tgender\taffix\tlog_frequency``. Regular Spanish plurals
attach -s to vowel-final lemmas and -es to consonant-final ones; rows that
break that rule (stem alternations like luz/luces, misspellings) are
reported on a rejects channel instead of entering the lexicon.
"""

from __future__ import annotations

import enum
import hashlib
import math
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateEntry, FormatError, InvalidLemma

VOWELS = frozenset("aeiouáéíóúü")  # a e i o u á é í ó ú ü

HEADER = ("lemma", "plural", "gender", "affix", "log_frequency")

_GENDER_ALIASES = {
    "m": "masculine", "masc": "masculine", "masculine": "masculine",
    "f": "feminine", "fem": "feminine", "feminine": "feminine",
}


class Gender(enum.Enum):
    MASCULINE = "masculine"
    FEMININE = "feminine"


class Affix(enum.Enum):
    """Plural suffix class; the enum value is the affix surface string."""

    S = "s"
    ES = "es"


class ValidationResult(enum.Enum):
    OK = "ok"
    IRREGULAR = "irregular"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class NounEntry:
    """One lemma/plural pair with gender, affix class, and optional frequency.

    ``log_frequency`` is log10 occurrences-per-million; None means the
    source had no frequency for this word, which excludes the entry from
    frequency analyses only.
    """

    lemma: str
    plural: str
    gender: Gender
    affix: Affix
    log_frequency: float | None = None


@dataclass(frozen=True)
class RejectedRow:
    """A lexicon row that failed validation, with its 1-based file line."""

    row: int
    lemma: str
    plural: str
    reason: ValidationResult


@dataclass(frozen=True)
class Lexicon:
    """Validated noun entries in input order, plus a content hash."""

    entries: tuple[NounEntry, ...]
    source_digest: str

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def affix_surface(affix: Affix) -> str:
    return affix.value


def expected_affix(lemma: str) -> Affix:
    """Affix class the regular pluralization rule predicts for ``lemma``.

    Vowel-final lemmas (including accented vowels and u-with-diaeresis)
    take -s; consonant-final lemmas take -es.

    Raises InvalidLemma if the lemma is empty or its final character is
    not a letter.
    """
    if not lemma:
        raise InvalidLemma("empty lemma")
    final = lemma[-1]
    if not final.isalpha():
        raise InvalidLemma(f"lemma {lemma!r} ends in non-letter {final!r}")
    return Affix.S if final in VOWELS else Affix.ES


def validate_entry(entry: NounEntry) -> ValidationResult:
    """Classify an entry as ok, irregular, or malformed.

    malformed: empty fields or embedded whitespace.
    irregular: the plural is not lemma + affix surface (stem alternation,
    misspelling), or the annotated affix contradicts the affix rule.
    ok: everything else.
    """
    for field in (entry.lemma, entry.plural):
        if not field or any(ch.isspace() for ch in field):
            return ValidationResult.MALFORMED
    try:
        expected = expected_affix(entry.lemma)
    except InvalidLemma:
        return ValidationResult.MALFORMED
    if entry.plural != entry.lemma + affix_surface(entry.affix):
        return ValidationResult.IRREGULAR
    if entry.affix is not expected:
        return ValidationResult.IRREGULAR
    return ValidationResult.OK


def parse_lexicon(text: str, log_base: float = 10.0) -> tuple[Lexicon, list[RejectedRow]]:
    """Parse TSV ``text`` into a Lexicon plus the rejected rows.

    Surface forms are NFC-normalized and lowercased on ingest. Frequency
    values are interpreted as logs in ``log_base`` and converted to log10.
    Rows that fail validation go to the rejects list with their physical
    line number (the header is line 1); order is preserved on both
    channels.

    Raises FormatError on a missing or misnamed header, DuplicateEntry if
    the same (lemma, plural) pair validates ok twice.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty lexicon file")
    header = tuple(lines[0].rstrip("\r").split("\t"))
    if header != HEADER:
        raise FormatError(f"expected header {list(HEADER)}, got {list(header)}")

    scale = math.log10(log_base)
    entries: list[NounEntry] = []
    rejects: list[RejectedRow] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split("\t")
        if len(fields) == len(HEADER) - 1:
            fields.append("")  # trailing empty log_frequency column, tab dropped
        if len(fields) != len(HEADER):
            raise FormatError(f"line {lineno}: expected {len(HEADER)} columns, got {len(fields)}")
        raw_lemma, raw_plural, raw_gender, raw_affix, raw_freq = fields
        lemma = unicodedata.normalize("NFC", raw_lemma).lower()
        plural = unicodedata.normalize("NFC", raw_plural).lower()
        gender_name = _GENDER_ALIASES.get(raw_gender.strip().lower())
        affix_name = raw_affix.strip().lower()
        log_frequency: float | None = None
        bad_freq = False
        if raw_freq.strip():
            try:
                log_frequency = float(raw_freq) * scale
            except ValueError:
                bad_freq = True
        if bad_freq or gender_name is None or affix_name not in ("s", "es"):
            rejects.append(RejectedRow(lineno, lemma, plural, ValidationResult.MALFORMED))
            continue
        entry = NounEntry(
            lemma=lemma,
            plural=plural,
            gender=Gender(gender_name),
            affix=Affix(affix_name),
            log_frequency=log_frequency,
        )
        result = validate_entry(entry)
        if result is not ValidationResult.OK:
            rejects.append(RejectedRow(lineno, lemma, plural, result))
            continue
        key = (lemma, plural)
        if key in seen:
            raise DuplicateEntry(f"line {lineno}: duplicate pair {key}")
        seen.add(key)
        entries.append(entry)

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Lexicon(entries=tuple(entries), source_digest=digest), rejects


def load_lexicon(path: str | Path, log_base: float = 10.0) -> tuple[Lexicon, list[RejectedRow]]:
    """Read and parse a lexicon TSV file."""
    return parse_lexicon(Path(path).read_text(encoding="utf-8"), log_base=log_base)


def write_rejects_csv(out, rejects: list[RejectedRow]) -> None:
    """Rejects channel as CSV: row,lemma,plural,reason."""
    import csv

    writer = csv.writer(out)
    writer.writerow(("row", "lemma", "plural", "reason"))
    for reject in rejects:
        writer.writerow((reject.row, reject.lemma, reject.plural, reject.reason.value))
