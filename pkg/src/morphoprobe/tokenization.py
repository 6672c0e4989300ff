"""WordPiece-style vocabulary, greedy subword segmentation, and the
classification of plural tokenizations against the morpheme boundary.

A plural noun falls into one of three schemes: stored whole in the
vocabulary (single-token), split exactly at the lemma/affix boundary with
the affix as one continuation piece (morphemic), or split anywhere else
(non-morphemic). Artificial retokenization coerces the morphemic shape for
words the tokenizer would not segment that way: the lemma's own tokens
followed by the affix continuation piece.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicatePiece, MissingAffixPiece, MissingSpecial, UnkLemma
from .lexicon import NounEntry, affix_surface

SPECIAL_PIECES = frozenset({"[CLS]", "[SEP]", "[MASK]", "[PAD]", "[UNK]"})


@dataclass(frozen=True)
class Vocabulary:
    """Subword inventory; piece index is the token id."""

    pieces: tuple[str, ...]
    continuation_prefix: str = "##"
    unk_piece: str = "[UNK]"
    special_pieces: frozenset[str] = SPECIAL_PIECES
    max_word_chars: int = 100
    _ids: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = {piece: i for i, piece in enumerate(self.pieces)}
        if len(ids) != len(self.pieces):
            raise DuplicatePiece("vocabulary pieces are not unique")
        missing = self.special_pieces - ids.keys()
        if missing:
            raise MissingSpecial(f"vocabulary lacks special pieces: {sorted(missing)}")
        object.__setattr__(self, "_ids", ids)

    def __len__(self) -> int:
        return len(self.pieces)

    def __contains__(self, piece: str) -> bool:
        return piece in self._ids

    def id_of(self, piece: str) -> int:
        return self._ids[piece]

    def ids_of(self, pieces) -> list[int]:
        return [self._ids[p] for p in pieces]


def load_vocab(text: str, **kwargs) -> Vocabulary:
    """Build a Vocabulary from one-piece-per-line text, line order = id order.

    Blank lines are skipped. Raises DuplicatePiece on a repeated piece and
    MissingSpecial if any required special piece is absent.
    """
    pieces = tuple(line for line in (ln.rstrip("\r") for ln in text.split("\n")) if line)
    return Vocabulary(pieces=pieces, **kwargs)


def read_vocab(path: str | Path, **kwargs) -> Vocabulary:
    return load_vocab(Path(path).read_text(encoding="utf-8"), **kwargs)


def vocab_digest(vocab: Vocabulary) -> str:
    """sha256 over the pieces joined by newlines; the handshake identity."""
    return hashlib.sha256("\n".join(vocab.pieces).encode("utf-8")).hexdigest()


def tokenize(word: str, vocab: Vocabulary) -> list[str]:
    """Greedy longest-match-first segmentation of a single word.

    Pieces after position 0 must carry the continuation prefix. If no
    piece matches at some cursor, or the word exceeds max_word_chars, the
    whole word maps to [unk_piece].
    """
    if len(word) > vocab.max_word_chars:
        return [vocab.unk_piece]
    tokens: list[str] = []
    start = 0
    n = len(word)
    while start < n:
        end = n
        match = None
        while end > start:
            piece = word[start:end]
            if start > 0:
                piece = vocab.continuation_prefix + piece
            if piece in vocab:
                match = piece
                break
            end -= 1
        if match is None:
            return [vocab.unk_piece]
        tokens.append(match)
        start = end
    return tokens


def surfaces(tokens, continuation_prefix: str = "##") -> str:
    """Concatenate tokens back into a word, stripping continuation prefixes
    from non-initial pieces."""
    out = []
    for i, tok in enumerate(tokens):
        if i > 0 and tok.startswith(continuation_prefix):
            tok = tok[len(continuation_prefix):]
        out.append(tok)
    return "".join(out)


class Scheme(enum.Enum):
    SINGLE_TOKEN = "single-token"
    MORPHEMIC = "morphemic"
    NON_MORPHEMIC = "non-morphemic"


class Variant(enum.Enum):
    ORIGINAL = "original"
    ARTIFICIAL = "artificial"


@dataclass(frozen=True)
class TokenizationRecord:
    """A word's token sequence with its scheme label and variant."""

    word: str
    tokens: tuple[str, ...]
    token_ids: tuple[int, ...]
    scheme: Scheme
    variant: Variant
    contains_unk: bool


def classify_scheme(entry: NounEntry, vocab: Vocabulary) -> TokenizationRecord:
    """Tokenize the plural and label its scheme.

    Single-token: exactly one non-UNK token. Morphemic: the final token is
    the affix as one continuation piece and the preceding tokens spell the
    lemma. Non-morphemic: any other split. UNK tokenizations keep
    contains_unk=True and are excluded downstream.
    """
    tokens = tokenize(entry.plural, vocab)
    contains_unk = vocab.unk_piece in tokens
    affix_piece = vocab.continuation_prefix + affix_surface(entry.affix)
    if contains_unk:
        scheme = Scheme.NON_MORPHEMIC
    elif len(tokens) == 1:
        scheme = Scheme.SINGLE_TOKEN
    elif tokens[-1] == affix_piece and surfaces(tokens[:-1], vocab.continuation_prefix) == entry.lemma:
        scheme = Scheme.MORPHEMIC
    else:
        scheme = Scheme.NON_MORPHEMIC
    return TokenizationRecord(
        word=entry.plural,
        tokens=tuple(tokens),
        token_ids=tuple(vocab.ids_of(tokens)),
        scheme=scheme,
        variant=Variant.ORIGINAL,
        contains_unk=contains_unk,
    )


def write_classification_csv(out, pairs, config_digest: str | None = None) -> None:
    """Classification CSV: one row per (entry, record) pair, tokens |-joined."""
    import csv

    if config_digest is not None:
        out.write(f"# config: {config_digest}\r\n")
    writer = csv.writer(out)
    writer.writerow(("lemma", "plural", "gender", "affix", "variant", "scheme", "tokens", "contains_unk"))
    for entry, record in pairs:
        writer.writerow(
            (
                entry.lemma,
                entry.plural,
                entry.gender.value,
                entry.affix.value,
                record.variant.value,
                record.scheme.value,
                "|".join(record.tokens),
                "true" if record.contains_unk else "false",
            )
        )


def artificial_tokenize(entry: NounEntry, vocab: Vocabulary) -> TokenizationRecord:
    """Build the morpheme-aligned token sequence: lemma tokens + affix piece.

    Raises MissingAffixPiece if the affix continuation piece is not in the
    vocabulary and UnkLemma if the lemma itself cannot be tokenized.
    """
    affix_piece = vocab.continuation_prefix + affix_surface(entry.affix)
    if affix_piece not in vocab:
        raise MissingAffixPiece(f"vocabulary lacks {affix_piece!r}")
    lemma_tokens = tokenize(entry.lemma, vocab)
    if vocab.unk_piece in lemma_tokens:
        raise UnkLemma(f"lemma {entry.lemma!r} tokenizes to UNK")
    tokens = tuple(lemma_tokens) + (affix_piece,)
    return TokenizationRecord(
        word=entry.plural,
        tokens=tokens,
        token_ids=tuple(vocab.ids_of(tokens)),
        scheme=Scheme.MORPHEMIC,
        variant=Variant.ARTIFICIAL,
        contains_unk=False,
    )
