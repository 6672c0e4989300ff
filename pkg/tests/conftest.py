from pathlib import Path

import pytest

from morphoprobe import load_lexicon, read_vocab

FIXTURES = Path(__file__).parent.parent / "src" / "morphoprobe" / "fixtures"
REPO_ROOT = Path(__file__).parent.parent


@pytest.fixture(scope="session")
def vocab_path() -> Path:
    return FIXTURES / "vocab.txt"


@pytest.fixture(scope="session")
def lexicon5_path() -> Path:
    return FIXTURES / "lexicon5.tsv"


@pytest.fixture(scope="session")
def lexicon10_path() -> Path:
    return FIXTURES / "lexicon10.tsv"


@pytest.fixture(scope="session")
def vocab(vocab_path):
    return read_vocab(vocab_path)


@pytest.fixture(scope="session")
def lexicon5(lexicon5_path):
    lexicon, rejects = load_lexicon(lexicon5_path)
    assert not rejects
    return lexicon


@pytest.fixture(scope="session")
def lexicon10(lexicon10_path):
    lexicon, rejects = load_lexicon(lexicon10_path)
    assert not rejects
    return lexicon
