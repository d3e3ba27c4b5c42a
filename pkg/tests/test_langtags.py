import pytest
from hypothesis import given
from hypothesis import strategies as st

from partext.langtags import (
    MULTILINGUAL_CODE,
    NO_CONTENT_CODE,
    UNDETERMINED_CODE,
    FileLanguageMetadata,
    LanguageTag,
    MalformedTag,
    TagKind,
    UnknownCode,
    check_labelling,
    format_language_list,
    parse_language_list,
    parse_tag,
)


class TestParseTag:
    def test_known_codes(self):
        assert parse_tag("en").code == "en"
        assert parse_tag("ES").code == "es"

    def test_kinds(self):
        assert parse_tag("fr").kind is TagKind.STANDARD
        assert parse_tag(MULTILINGUAL_CODE).kind is TagKind.MULTILINGUAL
        assert parse_tag(UNDETERMINED_CODE).kind is TagKind.UNDETERMINED
        assert parse_tag(NO_CONTENT_CODE).kind is TagKind.NO_LINGUISTIC_CONTENT

    @pytest.mark.parametrize("bad", ["", "e", "eng", "e1", "-n", "en-GB", "e n"])
    def test_malformed_shapes(self, bad):
        with pytest.raises(MalformedTag):
            parse_tag(bad)

    def test_unknown_two_letter_code(self):
        with pytest.raises(UnknownCode):
            parse_tag("qq")

    def test_malayalam_is_not_multilingual(self):
        # ml is a real language; the multilingual marker is mm
        assert parse_tag("ml").kind is TagKind.STANDARD

    def test_m1_typo_gets_a_hint(self):
        with pytest.raises(MalformedTag, match="mm"):
            parse_tag("m1")

    def test_tags_are_values(self):
        assert parse_tag("en") == parse_tag("EN")
        assert len({parse_tag("en"), parse_tag("en"), parse_tag("fr")}) == 2

    @given(st.text(min_size=2, max_size=2, alphabet=st.characters(min_codepoint=97, max_codepoint=122)))
    def test_two_letter_inputs_never_crash_unexpectedly(self, code):
        try:
            tag = parse_tag(code)
        except UnknownCode:
            return
        assert tag.code == code


class TestLanguageLists:
    def test_round_trip(self):
        tags = parse_language_list("en, fr ,de")
        assert [t.code for t in tags] == ["en", "fr", "de"]
        assert format_language_list(tags) == "en,fr,de"

    def test_empty_entries_are_skipped(self):
        assert parse_language_list(",en,,") == (parse_tag("en"),)


class TestMetadata:
    def test_declarations_must_be_unique(self):
        with pytest.raises(ValueError):
            FileLanguageMetadata(declared=(parse_tag("en"), parse_tag("en")))

    def test_empty_declaration_rejected(self):
        with pytest.raises(ValueError):
            FileLanguageMetadata(declared=())


class TestCheckLabelling:
    def metadata(self, *codes, default=None):
        return FileLanguageMetadata(
            declared=tuple(parse_tag(c) for c in codes),
            default_processing_language=parse_tag(default) if default else None,
        )

    def test_clean_file(self):
        assert check_labelling(self.metadata("en", "fr"), [parse_tag("en"), parse_tag("fr")]) == []

    def test_undeclared_language_found(self):
        out = check_labelling(self.metadata("en"), [parse_tag("en"), parse_tag("de")])
        assert [d.kind for d in out] == ["undeclared-language"]
        assert out[0].language == parse_tag("de")

    def test_declared_language_absent(self):
        out = check_labelling(self.metadata("en", "fr"), [parse_tag("en")])
        assert [d.kind for d in out] == ["absent-language"]
        assert out[0].language == parse_tag("fr")

    def test_undetermined_waives_checking(self):
        assert check_labelling(self.metadata("un"), [parse_tag("en"), parse_tag("de")]) == []

    def test_multilingual_covers_any_mix(self):
        out = check_labelling(self.metadata("mm"), [parse_tag("en"), parse_tag("de")])
        assert out == []

    def test_ml_misuse_reported_once(self):
        # declaring Malayalam for a file that is actually a language mix is
        # one mistake, not a cascade of per-language mismatches
        out = check_labelling(
            self.metadata("ml"), [parse_tag("en"), parse_tag("de"), parse_tag("fr")]
        )
        assert len(out) == 1
        assert out[0].kind == "ml-misuse"
        assert out[0].suggestion is not None and "mm" in out[0].suggestion

    def test_actual_malayalam_not_flagged(self):
        assert check_labelling(self.metadata("ml"), [parse_tag("ml")]) == []
