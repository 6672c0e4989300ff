import io

import pytest

from morphoprobe import (
    Affix,
    Gender,
    NounEntry,
    ValidationResult,
    expected_affix,
    parse_lexicon,
    validate_entry,
)
from morphoprobe.errors import DuplicateEntry, FormatError, InvalidLemma
from morphoprobe.lexicon import affix_surface, write_rejects_csv

HEADER = "lemma\tplural\tgender\taffix\tlog_frequency\n"


def entry(lemma, plural, gender=Gender.FEMININE, affix=Affix.S, freq=None):
    return NounEntry(lemma=lemma, plural=plural, gender=gender, affix=affix, log_frequency=freq)


class TestExpectedAffix:
    @pytest.mark.parametrize(
        "lemma,affix",
        [
            ("naranja", Affix.S),
            ("mujer", Affix.ES),
            ("a", Affix.S),
            ("café", Affix.S),      # accented vowel counts as a vowel
            ("espíritu", Affix.S),
            ("reloj", Affix.ES),
            ("pared", Affix.ES),
        ],
    )
    def test_rule(self, lemma, affix):
        assert expected_affix(lemma) is affix

    def test_u_diaeresis_is_vowel(self):
        assert expected_affix("ngü") is Affix.S

    def test_empty_lemma(self):
        with pytest.raises(InvalidLemma):
            expected_affix("")

    def test_non_letter_final(self):
        with pytest.raises(InvalidLemma):
            expected_affix("casa1")


class TestValidateEntry:
    def test_ok(self):
        assert validate_entry(entry("mujer", "mujeres", affix=Affix.ES)) is ValidationResult.OK

    def test_stem_alternation_is_irregular(self):
        # luz + es != luces
        assert validate_entry(entry("luz", "luces", affix=Affix.ES)) is ValidationResult.IRREGULAR

    def test_trailing_whitespace_is_malformed(self):
        assert validate_entry(entry("mujer", "mujeres ", affix=Affix.ES)) is ValidationResult.MALFORMED

    def test_empty_lemma_is_malformed(self):
        assert validate_entry(entry("", "es", affix=Affix.ES)) is ValidationResult.MALFORMED

    def test_wrong_affix_annotation_is_irregular(self):
        # concatenation holds but the vowel/consonant rule says -es
        assert validate_entry(entry("mujer", "mujers", affix=Affix.S)) is ValidationResult.IRREGULAR

    def test_ok_implies_expected_affix(self, lexicon10):
        for noun in lexicon10:
            assert validate_entry(noun) is ValidationResult.OK
            assert noun.affix is expected_affix(noun.lemma)

    def test_ok_implies_suffix_strips_back(self, lexicon10):
        for noun in lexicon10:
            surface = affix_surface(noun.affix)
            assert noun.plural.endswith(surface)
            assert noun.plural[: -len(surface)] == noun.lemma


class TestParseLexicon:
    def test_single_row(self):
        lexicon, rejects = parse_lexicon(HEADER + "mujer\tmujeres\tf\tes\t1.2\n")
        assert len(lexicon) == 1
        assert not rejects
        noun = lexicon.entries[0]
        assert noun.lemma == "mujer"
        assert noun.gender is Gender.FEMININE
        assert noun.affix is Affix.ES
        assert noun.log_frequency == pytest.approx(1.2)

    def test_irregular_row_goes_to_rejects(self):
        lexicon, rejects = parse_lexicon(HEADER + "luz\tluces\tf\tes\t\n")
        assert len(lexicon) == 0
        assert [r.reason for r in rejects] == [ValidationResult.IRREGULAR]
        assert rejects[0].row == 2
        assert rejects[0].lemma == "luz"

    def test_header_only(self):
        lexicon, rejects = parse_lexicon(HEADER)
        assert len(lexicon) == 0
        assert rejects == []

    def test_bad_header(self):
        with pytest.raises(FormatError):
            parse_lexicon("lemma\tplural\tgender\n")

    def test_duplicate_pair_is_fatal(self):
        text = HEADER + "mujer\tmujeres\tf\tes\t1.0\nmujer\tmujeres\tf\tes\t2.0\n"
        with pytest.raises(DuplicateEntry):
            parse_lexicon(text)

    def test_deterministic(self):
        text = HEADER + "mujer\tmujeres\tf\tes\t1.2\nflor\tflores\tf\tes\t\n"
        first, _ = parse_lexicon(text)
        second, _ = parse_lexicon(text)
        assert first == second
        assert first.source_digest == second.source_digest

    def test_normalizes_case_and_nfc(self):
        # decomposed e + combining acute, upper case
        decomposed = "CAFÉ"
        lexicon, rejects = parse_lexicon(HEADER + f"{decomposed}\tcafés\tm\ts\t\n")
        assert not rejects
        assert lexicon.entries[0].lemma == "café"

    def test_log_base_conversion(self):
        # ln-based input: ln(100) should become log10(100) = 2
        import math

        text = HEADER + f"mujer\tmujeres\tf\tes\t{math.log(100)}\n"
        lexicon, _ = parse_lexicon(text, log_base=math.e)
        assert lexicon.entries[0].log_frequency == pytest.approx(2.0)

    def test_missing_frequency_is_none(self):
        lexicon, _ = parse_lexicon(HEADER + "mujer\tmujeres\tf\tes\t\n")
        assert lexicon.entries[0].log_frequency is None

    def test_garbled_numeric_field_rejected(self):
        lexicon, rejects = parse_lexicon(HEADER + "mujer\tmujeres\tf\tes\tnot-a-number\n")
        assert len(lexicon) == 0
        assert [r.reason for r in rejects] == [ValidationResult.MALFORMED]

    def test_rejects_csv(self):
        _, rejects = parse_lexicon(HEADER + "luz\tluces\tf\tes\t\n")
        out = io.StringIO()
        write_rejects_csv(out, rejects)
        lines = out.getvalue().splitlines()
        assert lines[0] == "row,lemma,plural,reason"
        assert lines[1] == "2,luz,luces,irregular"
