"""Exception types raised across the toolkit.

Validation outcomes that are part of normal operation (irregular or
malformed lexicon rows, UNK tokenizations) are result values, not
exceptions; the classes here mark contract violations and I/O failures.
"""


class MorphoprobeError(Exception):
    """Base class for all toolkit errors."""


# --- lexicon ---

class InvalidLemma(MorphoprobeError):
    """Lemma is empty or its final character is not a letter."""


class FormatError(MorphoprobeError):
    """Input file header or structure does not match the expected format."""


class DuplicateEntry(MorphoprobeError):
    """The same (lemma, plural) pair appears twice in a lexicon."""


# --- tokenization ---

class DuplicatePiece(MorphoprobeError):
    """A vocabulary file lists the same piece twice."""


class MissingSpecial(MorphoprobeError):
    """A vocabulary is missing one of the required special pieces."""


class MissingAffixPiece(MorphoprobeError):
    """The continuation piece for a plural affix is not in the vocabulary."""


class UnkLemma(MorphoprobeError):
    """A lemma tokenizes to UNK and cannot be retokenized artificially."""


# --- scorer ---

class ScorerUnavailable(MorphoprobeError):
    """The scorer could not be reached after the configured retries."""


class VocabMismatch(MorphoprobeError):
    """The scorer's vocabulary digest differs from the loaded vocabulary."""


class UnknownCandidate(MorphoprobeError):
    """A candidate or frame piece is not in the scorer vocabulary."""


class BadLayer(MorphoprobeError):
    """A requested hidden-state layer index is out of range."""


# --- probe ---

class BadNounTokens(MorphoprobeError):
    """Noun tokens contain special pieces and cannot form a frame."""


class DegenerateDistribution(MorphoprobeError):
    """A probability needed for log-odds is zero or negative."""


# --- analysis ---

class EmptySelection(MorphoprobeError):
    """An embedding average was requested over no positions."""


class DegenerateClasses(MorphoprobeError):
    """Too few classes, or too few members per class, for the analysis."""


class BadInput(MorphoprobeError):
    """Analysis input contains non-finite values or mismatched dimensions."""


class SingularScatter(MorphoprobeError):
    """Unregularized within-class scatter is singular."""


class RankDeficient(MorphoprobeError):
    """Regression design matrix does not have full column rank."""
