import io
import string

import numpy as np
import pytest

from morphoprobe import (
    Affix,
    Gender,
    NounEntry,
    Scheme,
    Variant,
    artificial_tokenize,
    classify_scheme,
    load_vocab,
    surfaces,
    tokenize,
    vocab_digest,
)
from morphoprobe.errors import DuplicatePiece, MissingAffixPiece, MissingSpecial, UnkLemma
from morphoprobe.tokenization import SPECIAL_PIECES, write_classification_csv
from oracles import assert_greedy_maximal

SPECIALS = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n"


class TestLoadVocab:
    def test_line_order_is_id_order(self):
        vocab = load_vocab(SPECIALS + "mujer\n")
        assert len(vocab) == 6
        assert vocab.id_of("mujer") == 5

    def test_duplicate_piece(self):
        with pytest.raises(DuplicatePiece):
            load_vocab(SPECIALS + "mujer\nmujer\n")

    def test_empty_file_lacks_specials(self):
        with pytest.raises(MissingSpecial):
            load_vocab("")

    def test_digest_tracks_content(self):
        a = load_vocab(SPECIALS + "mujer\n")
        b = load_vocab(SPECIALS + "mujer\n")
        c = load_vocab(SPECIALS + "flor\n")
        assert vocab_digest(a) == vocab_digest(b)
        assert vocab_digest(a) != vocab_digest(c)


class TestTokenize:
    @pytest.mark.parametrize(
        "word,expected",
        [
            ("naranjas", ["naranja", "##s"]),
            ("neuronas", ["neuro", "##nas"]),
            ("comanas", ["coman", "##as"]),
            ("patronos", ["patr", "##onos"]),
            ("mujeres", ["mujeres"]),
        ],
    )
    def test_fixture_words(self, vocab, word, expected):
        assert tokenize(word, vocab) == expected

    def test_no_match_maps_whole_word_to_unk(self, vocab):
        assert tokenize("xyzzy", vocab) == ["[UNK]"]

    def test_mid_word_dead_end_is_unk(self, vocab):
        # "naranj" matches nothing at the cursor after "naranja" fails
        assert tokenize("naranjaq", vocab) == ["[UNK]"]

    def test_overlong_word_is_unk(self, vocab):
        assert tokenize("a" * (vocab.max_word_chars + 1), vocab) == ["[UNK]"]

    def test_deterministic(self, vocab):
        assert tokenize("patronos", vocab) == tokenize("patronos", vocab)

    def test_roundtrip_fixture_words(self, vocab, lexicon10):
        for noun in lexicon10:
            tokens = tokenize(noun.plural, vocab)
            assert surfaces(tokens) == noun.plural

    def test_greedy_maximality_fixture_words(self, vocab, lexicon10):
        for noun in lexicon10:
            tokens = tokenize(noun.plural, vocab)
            assert_greedy_maximal(noun.plural, tokens, vocab)


def random_vocab(rng: np.random.Generator, n_pieces: int):
    alphabet = string.ascii_lowercase[:10]
    pieces = set(SPECIAL_PIECES)
    while len(pieces) < n_pieces:
        length = int(rng.integers(1, 7))
        body = "".join(rng.choice(list(alphabet), size=length))
        pieces.add(body if rng.random() < 0.5 else "##" + body)
    return load_vocab("\n".join(sorted(pieces)) + "\n")


def random_word(rng: np.random.Generator, vocab, alphabet="abcdefghij") -> str:
    if rng.random() < 0.5:
        # stitch piece surfaces together so many words tokenize cleanly
        initials = [p for p in vocab.pieces if not p.startswith("##") and p not in SPECIAL_PIECES]
        continuations = [p[2:] for p in vocab.pieces if p.startswith("##")]
        word = str(rng.choice(initials))
        for _ in range(int(rng.integers(0, 3))):
            word += str(rng.choice(continuations))
        return word
    return "".join(rng.choice(list(alphabet), size=int(rng.integers(1, 12))))


class TestRoundTripProperty:
    def test_random_words_roundtrip_and_are_maximal(self):
        rng = np.random.default_rng(7)
        vocab = random_vocab(rng, 300)
        non_unk = 0
        for _ in range(2000):
            word = random_word(rng, vocab)
            tokens = tokenize(word, vocab)
            if tokens == ["[UNK]"]:
                continue
            non_unk += 1
            assert surfaces(tokens) == word
            assert_greedy_maximal(word, tokens, vocab)
        assert non_unk > 500  # the property must not pass vacuously


def noun(lemma, plural, gender=Gender.FEMININE, affix=Affix.S):
    return NounEntry(lemma=lemma, plural=plural, gender=gender, affix=affix)


class TestClassifyScheme:
    def test_morphemic(self, vocab):
        record = classify_scheme(noun("naranja", "naranjas"), vocab)
        assert record.tokens == ("naranja", "##s")
        assert record.scheme is Scheme.MORPHEMIC
        assert record.variant is Variant.ORIGINAL
        assert not record.contains_unk

    def test_non_morphemic(self, vocab):
        record = classify_scheme(noun("neurona", "neuronas"), vocab)
        assert record.tokens == ("neuro", "##nas")
        assert record.scheme is Scheme.NON_MORPHEMIC

    def test_single_token(self, vocab):
        record = classify_scheme(noun("mujer", "mujeres", affix=Affix.ES), vocab)
        assert record.tokens == ("mujeres",)
        assert record.scheme is Scheme.SINGLE_TOKEN

    def test_multi_piece_lemma_still_morphemic(self):
        vocab = load_vocab(SPECIALS + "patr\n##ono\n##s\n")
        record = classify_scheme(noun("patrono", "patronos", Gender.MASCULINE), vocab)
        assert record.tokens == ("patr", "##ono", "##s")
        assert record.scheme is Scheme.MORPHEMIC

    def test_split_affix_is_not_morphemic(self):
        # boundary aligns but the -es affix arrives as ##e ##s, not ##es
        vocab = load_vocab(SPECIALS + "mujer\n##e\n##s\n")
        record = classify_scheme(noun("mujer", "mujeres", affix=Affix.ES), vocab)
        assert record.tokens == ("mujer", "##e", "##s")
        assert record.scheme is Scheme.NON_MORPHEMIC

    def test_unk_is_flagged(self):
        vocab = load_vocab(SPECIALS + "##s\n")
        record = classify_scheme(noun("naranja", "naranjas"), vocab)
        assert record.contains_unk
        assert record.token_ids == (vocab.id_of("[UNK]"),)

    def test_trichotomy_partitions_lexicon(self, vocab, lexicon10):
        counts = {scheme: 0 for scheme in Scheme}
        for entry in lexicon10:
            record = classify_scheme(entry, vocab)
            assert not record.contains_unk
            counts[record.scheme] += 1
        assert counts == {
            Scheme.SINGLE_TOKEN: 3,
            Scheme.MORPHEMIC: 3,
            Scheme.NON_MORPHEMIC: 4,
        }


class TestArtificialTokenize:
    def test_single_token_original(self, vocab):
        record = artificial_tokenize(noun("mujer", "mujeres", affix=Affix.ES), vocab)
        assert record.tokens == ("mujer", "##es")
        assert record.scheme is Scheme.MORPHEMIC
        assert record.variant is Variant.ARTIFICIAL

    def test_multi_piece_lemma(self, vocab):
        record = artificial_tokenize(noun("patrono", "patronos", Gender.MASCULINE), vocab)
        assert record.tokens == ("patr", "##ono", "##s")

    def test_coincides_with_original_when_already_morphemic(self, vocab):
        original = classify_scheme(noun("naranja", "naranjas"), vocab)
        artificial = artificial_tokenize(noun("naranja", "naranjas"), vocab)
        assert artificial.tokens == original.tokens == ("naranja", "##s")

    def test_surface_equals_plural_and_affix_final(self, vocab, lexicon10):
        for entry in lexicon10:
            record = artificial_tokenize(entry, vocab)
            assert record.tokens[-1] in ("##s", "##es")
            assert surfaces(record.tokens) == entry.plural

    def test_missing_affix_piece(self):
        vocab = load_vocab(SPECIALS + "mujer\n")
        with pytest.raises(MissingAffixPiece):
            artificial_tokenize(noun("mujer", "mujeres", affix=Affix.ES), vocab)

    def test_unk_lemma(self):
        vocab = load_vocab(SPECIALS + "##es\n")
        with pytest.raises(UnkLemma):
            artificial_tokenize(noun("mujer", "mujeres", affix=Affix.ES), vocab)


class TestClassificationCsv:
    def test_columns_and_token_join(self, vocab, lexicon5):
        out = io.StringIO()
        pairs = [(entry, classify_scheme(entry, vocab)) for entry in lexicon5]
        write_classification_csv(out, pairs, config_digest="deadbeef")
        lines = out.getvalue().splitlines()
        assert lines[0] == "# config: deadbeef"
        assert lines[1] == "lemma,plural,gender,affix,variant,scheme,tokens,contains_unk"
        assert lines[3] == "naranja,naranjas,feminine,s,original,morphemic,naranja|##s,false"
