import pytest

from helpers import DE, EN, ES
from partext.align import Entirety, EntiretySet
from partext.gentext import (
    GenerationError,
    LangLiteral,
    Literal,
    MalformedTemplate,
    MissingLanguage,
    Placeholder,
    UnknownRecord,
    generate,
    generate_all,
    parse_template,
)
from partext.langtags import parse_tag
from partext.lingstore import LinguisticTable, harvest
from partext.segcore import SegmentKind


class TestParse:
    def test_literals_and_placeholders(self):
        tpl = parse_template("Say {r1} twice: {r1}.", name="greet")
        assert tpl.name == "greet"
        assert tpl.parts == (
            Literal("Say "),
            Placeholder(1),
            Literal(" twice: "),
            Placeholder(1),
            Literal("."),
        )
        assert tpl.placeholders() == [Placeholder(1), Placeholder(1)]

    def test_table_qualified_placeholder(self):
        tpl = parse_template("{glossary#r7}")
        assert tpl.parts == (Placeholder(7, table="glossary"),)

    def test_brace_escapes(self):
        tpl = parse_template("a {{json}} b")
        assert tpl.parts == (Literal("a {json} b"),)

    def test_lone_closing_brace(self):
        with pytest.raises(MalformedTemplate) as err:
            parse_template("oops } here")
        assert err.value.position == 5

    def test_unclosed_directive(self):
        with pytest.raises(MalformedTemplate, match="unclosed"):
            parse_template("before {r1")

    def test_unknown_directive(self):
        with pytest.raises(MalformedTemplate, match="unknown directive"):
            parse_template("{shrug}")

    def test_adjacent_lang_blocks_merge(self):
        tpl = parse_template("{lang:en}Hello{/lang}{lang:es}Hola{/lang}")
        assert len(tpl.parts) == 1
        block = tpl.parts[0]
        assert isinstance(block, LangLiteral)
        assert block.text_for(EN) == "Hello"
        assert block.text_for(ES) == "Hola"
        assert block.text_for(DE) == ""

    def test_literal_separates_lang_blocks(self):
        tpl = parse_template("{lang:en}A{/lang}-{lang:es}B{/lang}")
        assert [type(p).__name__ for p in tpl.parts] == [
            "LangLiteral",
            "Literal",
            "LangLiteral",
        ]

    def test_escapes_inside_lang_block(self):
        tpl = parse_template("{lang:en}a {{b}} c{/lang}")
        assert tpl.parts[0].text_for(EN) == "a {b} c"

    def test_directive_inside_lang_block(self):
        with pytest.raises(MalformedTemplate, match="nest"):
            parse_template("{lang:en}see {r1}{/lang}")

    def test_unclosed_lang_block(self):
        with pytest.raises(MalformedTemplate, match="unclosed"):
            parse_template("{lang:en}dangling")

    def test_unknown_language_in_block(self):
        with pytest.raises(MalformedTemplate):
            parse_template("{lang:zz}x{/lang}")


class TestGenerate:
    def test_single_expansion(self, reference_table):
        st = generate(parse_template("{r1}"), reference_table, ES)
        assert st.source == "Hola mundo"
        assert st.language == ES

    def test_expansions_are_linked_sentences(self, reference_table):
        st = generate(parse_template("{r1}"), reference_table, ES)
        (leaf,) = st.segments_of_kind(SegmentKind.SENTENCE)
        assert leaf.record_uri == "table:db/r1"

    def test_literals_woven_between_expansions(self, reference_table):
        st = generate(parse_template("Vi: {r2}!"), reference_table, ES)
        assert st.source == "Vi: gato blanco!"

    def test_lang_blocks_pick_the_right_text(self, reference_table):
        tpl = parse_template("{lang:en}Cat: {/lang}{lang:es}Gato: {/lang}{r2}")
        assert generate(tpl, reference_table, EN).source == "Cat: white cat"
        assert generate(tpl, reference_table, ES).source == "Gato: gato blanco"

    def test_expansion_counts_as_use(self, reference_table):
        generate(parse_template("{r1} and {r2}"), reference_table, ES)
        assert reference_table.require(1).value.uses == 1
        assert reference_table.require(2).value.uses == 1
        assert reference_table.require(3).value.uses == 0

    def test_all_failures_reported_together(self, reference_table):
        reference_table.insert({EN: "english only"})  # id 4
        with pytest.raises(GenerationError) as err:
            generate(parse_template("{r9} {r4} {r8}"), reference_table, ES)
        assert set(err.value.failures) == {
            UnknownRecord("db", 9),
            UnknownRecord("db", 8),
            MissingLanguage("db", 4, ES),
        }

    def test_failure_skips_use_bumps(self, reference_table):
        with pytest.raises(GenerationError):
            generate(parse_template("{r1} {r9}"), reference_table, ES)
        assert reference_table.require(1).value.uses == 0

    def test_special_tags_rejected(self, reference_table):
        for code in ("mm", "xx", "un"):
            with pytest.raises(ValueError):
                generate(parse_template("{r1}"), reference_table, parse_tag(code))

    def test_auxiliary_tables(self, reference_table):
        aux = LinguisticTable(name="aux")
        aux.insert({ES: "extra"})
        tpl = parse_template("{r1} {aux#r1}")
        st = generate(tpl, reference_table, ES, tables={"aux": aux})
        assert st.source == "Hola mundo extra"
        assert aux.require(1).value.uses == 1

    def test_default_table_addressable_by_name(self, reference_table):
        st = generate(parse_template("{db#r1}"), reference_table, ES)
        assert st.source == "Hola mundo"

    def test_unknown_table_name(self, reference_table):
        with pytest.raises(ValueError, match="aux"):
            generate(parse_template("{aux#r1}"), reference_table, ES)


class TestGenerateAll:
    def test_versions_share_alignment(self, reference_table):
        pt = generate_all(parse_template("{r1} {r2}"), reference_table, [EN, ES])
        assert pt.versions[EN].source == "hello world white cat"
        assert pt.versions[ES].source == "Hola mundo gato blanco"
        assert len(pt.groups) == 2
        for group in pt.groups:
            assert group.kind is SegmentKind.SENTENCE
            assert set(group.member_map) == {EN, ES}

    def test_groups_point_at_matching_text(self, reference_table):
        pt = generate_all(parse_template("{r2}"), reference_table, [EN, ES])
        (group,) = pt.groups
        en_leaf = pt.versions[EN].resolve(group.member_map[EN])
        es_leaf = pt.versions[ES].resolve(group.member_map[ES])
        assert pt.versions[EN].text_of(en_leaf) == "white cat"
        assert pt.versions[ES].text_of(es_leaf) == "gato blanco"

    def test_provenance_names_the_template(self, reference_table):
        pt = generate_all(parse_template("{r1}", name="hi"), reference_table, [ES])
        assert pt.provenance == "template:hi"

    def test_complete_entirety_when_everything_expands(self, reference_table):
        pt = generate_all(parse_template("{r1}"), reference_table, [EN, ES])
        assert pt.entirety[EN] == EntiretySet.of(Entirety.COMPLETE)
        assert pt.entirety[ES] == EntiretySet.of(Entirety.COMPLETE)

    def test_missing_language_leaves_a_gap(self, reference_table):
        reference_table.insert({EN: "english only"})  # id 4
        pt = generate_all(parse_template("{r1} {r4}"), reference_table, [EN, ES])
        assert pt.entirety[EN] == EntiretySet.of(Entirety.COMPLETE)
        assert pt.entirety[ES] == EntiretySet.of(Entirety.PARTIAL)
        assert set(pt.groups[0].member_map) == {EN, ES}
        assert set(pt.groups[1].member_map) == {EN}

    def test_unknown_record_fails_every_version(self, reference_table):
        with pytest.raises(GenerationError):
            generate_all(parse_template("{r1} {r9}"), reference_table, [EN, ES])
        assert reference_table.require(1).value.uses == 0

    def test_uses_bump_once_per_language(self, reference_table):
        generate_all(parse_template("{r1}"), reference_table, [EN, ES])
        assert reference_table.require(1).value.uses == 2

    def test_no_languages(self, reference_table):
        with pytest.raises(ValueError):
            generate_all(parse_template("{r1}"), reference_table, [])

    def test_special_tags_rejected(self, reference_table):
        with pytest.raises(ValueError):
            generate_all(parse_template("{r1}"), reference_table, [ES, parse_tag("xx")])

    def test_generated_output_harvests_back(self, reference_table):
        pt = generate_all(parse_template("{r1}. {r2}."), reference_table, [EN, ES])
        recovered = LinguisticTable(name="back")
        assert harvest(pt, recovered) == 2
        assert recovered.lookup_exact(EN, "hello world")[0].segments[ES] == "Hola mundo"
        assert recovered.lookup_exact(EN, "white cat")[0].segments[ES] == "gato blanco"
