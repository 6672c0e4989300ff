"""morphoprobe: measure how subword tokenization schemes affect grammatical
number agreement in a masked language model."""

from . import analysis, errors
from .lexicon import (
    Affix,
    Gender,
    Lexicon,
    NounEntry,
    RejectedRow,
    ValidationResult,
    expected_affix,
    load_lexicon,
    parse_lexicon,
    validate_entry,
)
from .probe import (
    ArticleSet,
    ArticleType,
    Number,
    ProbeResult,
    accuracy_table,
    article_set,
    build_frame,
    frame_tokens,
    log_odds,
    noun_positions,
    run_probe,
)
from .scorer import (
    HiddenStatesResponse,
    MaskQuery,
    MaskResponse,
    MockScorer,
    RemoteScorer,
    ScorerInfo,
    handshake,
    score_masked_batch,
)
from .tokenization import (
    Scheme,
    TokenizationRecord,
    Variant,
    Vocabulary,
    artificial_tokenize,
    classify_scheme,
    load_vocab,
    read_vocab,
    surfaces,
    tokenize,
    vocab_digest,
)

__version__ = "0.1.0"
