import io
import zipfile

import pytest

from helpers import DE, EN, ES
from partext.align import Entirety, EntiretySet, align, set_entirety
from partext.lingstore import export_tmx
from partext.medbox import (
    Artefact,
    LintDiagnostic,
    MedDossier,
    MissingHeader,
    NotAZip,
    generate_index,
    pack,
    unpack,
    validate,
)
from partext.segcore import segment_text

VALID_TMX = (
    '<?xml version="1.0"?><tmx version="1.4"><header/><body><tu tuid="1">'
    '<tuv xml:lang="en"><seg>hello</seg></tuv>'
    '<tuv xml:lang="es"><seg>hola</seg></tuv>'
    "</tu></body></tmx>"
)


def clean_dossier():
    pt = align(
        {
            EN: segment_text("Hello world. White cat.", EN),
            ES: segment_text("Hola mundo. Gato blanco.", ES),
        }
    )
    return MedDossier(
        header={"id": "demo-7", "languages": "en, es", "title": "Demo dossier"},
        parallel=pt,
        artefacts=(
            Artefact(
                role="translation-memory",
                name="memory.tmx",
                data=VALID_TMX.encode("utf-8"),
            ),
            Artefact(role="background-document", uri="https://example.org/brief.pdf"),
        ),
    )


def members_of(data: bytes) -> dict[str, bytes]:
    with zipfile.ZipFile(io.BytesIO(data)) as archive:
        return {
            info.filename: archive.read(info.filename)
            for info in archive.infolist()
            if not info.is_dir()
        }


def zip_of(members: dict[str, bytes]) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        for name, data in members.items():
            archive.writestr(name, data)
    return buffer.getvalue()


def rebuilt(**changes) -> bytes:
    """The clean archive with members replaced, added (bytes) or removed (None)."""
    members = members_of(pack(clean_dossier()))
    for name, data in changes.items():
        if data is None:
            members.pop(name, None)
        else:
            members[name] = data
    return zip_of(members)


def codes(diagnostics: list[LintDiagnostic]) -> set[str]:
    return {d.code for d in diagnostics}


class TestArtefact:
    def test_unknown_role(self):
        with pytest.raises(ValueError, match="role"):
            Artefact(role="appendix", uri="https://example.org/x")

    def test_embedded_or_external_not_both(self):
        with pytest.raises(ValueError):
            Artefact(
                role="other", name="a.txt", data=b"x", uri="https://example.org/x"
            )
        with pytest.raises(ValueError):
            Artefact(role="other")

    def test_unsafe_names(self):
        for name in ("/absolute.txt", "../escape.txt", "a\\b.txt"):
            with pytest.raises(ValueError, match="unsafe"):
                Artefact(role="other", name=name, data=b"x")

    def test_embedded_flag(self):
        assert Artefact(role="other", name="a", data=b"x").embedded
        assert not Artefact(role="other", uri="https://example.org/x").embedded


class TestDossier:
    def test_header_key_charset(self):
        with pytest.raises(ValueError, match="header key"):
            MedDossier(header={"id": "x", "languages": "en", "bad key": "v"})

    def test_header_values_single_line(self):
        with pytest.raises(ValueError, match="single line"):
            MedDossier(header={"id": "x", "languages": "en", "note": "a\nb"})

    def test_id_required(self):
        with pytest.raises(ValueError, match="id"):
            MedDossier(header={"id": "  ", "languages": "en"})

    def test_languages_required_and_checked(self):
        with pytest.raises(ValueError):
            MedDossier(header={"id": "x"})
        with pytest.raises(ValueError):
            MedDossier(header={"id": "x", "languages": "en, zz"})

    def test_entirety_headers_checked(self):
        MedDossier(header={"id": "x", "languages": "en, es", "entirety.es": "undefined"})
        with pytest.raises(ValueError):
            MedDossier(header={"id": "x", "languages": "en", "entirety.es": "done"})
        with pytest.raises(ValueError):
            MedDossier(
                header={"id": "x", "languages": "en", "entirety.es": "complete, partial"}
            )

    def test_artefacts_sorted_canonically(self):
        a = Artefact(role="other", name="zz.txt", data=b"1")
        b = Artefact(role="background-document", uri="https://example.org/x")
        c = Artefact(role="other", name="aa.txt", data=b"2")
        med = MedDossier(header={"id": "x", "languages": "en"}, artefacts=(a, b, c))
        assert med.artefacts == (b, c, a)

    def test_form(self):
        header = {"id": "x", "languages": "en"}
        external = Artefact(role="other", uri="https://example.org/x")
        embedded = Artefact(role="other", name="a", data=b"x")
        assert MedDossier(header=header, artefacts=(embedded,)).form == "self-contained"
        assert MedDossier(header=header, artefacts=(external,)).form == "external-only"
        assert (
            MedDossier(header=header, artefacts=(external, embedded)).form == "mix"
        )
        assert clean_dossier().form == "mix"

    def test_entirety_of_prefers_alignment(self):
        med = clean_dossier()
        pt = set_entirety(med.parallel, ES, EntiretySet.of(Entirety.TRANSLATING))
        med = MedDossier(
            header={**med.header, "entirety.es": "complete"},
            parallel=pt,
            artefacts=med.artefacts,
        )
        assert med.entirety_of(ES) == EntiretySet.of(Entirety.TRANSLATING)

    def test_entirety_of_falls_back_to_header(self):
        med = MedDossier(
            header={"id": "x", "languages": "en, es", "entirety.es": "suspended"}
        )
        assert med.entirety_of(ES) == EntiretySet.of(Entirety.SUSPENDED)
        assert med.entirety_of(EN) is None


class TestPackUnpack:
    def test_round_trip(self):
        med = clean_dossier()
        back = unpack(pack(med))
        assert back.header == med.header
        assert back.artefacts == med.artefacts
        assert set(back.parallel.versions) == set(med.parallel.versions)
        for lang in med.parallel.versions:
            assert back.parallel.versions[lang].source == med.parallel.versions[lang].source
        assert back.parallel.groups == med.parallel.groups

    def test_pack_is_deterministic(self):
        assert pack(clean_dossier()) == pack(clean_dossier())

    def test_pack_unpack_pack_is_identity(self):
        first = pack(clean_dossier())
        assert pack(unpack(first)) == first

    def test_unpack_from_file_and_directory(self, tmp_path):
        data = pack(clean_dossier())
        archive = tmp_path / "demo.med"
        archive.write_bytes(data)
        assert unpack(archive).header == clean_dossier().header

        tree = tmp_path / "unpacked"
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            zf.extractall(tree)
        by_dir = unpack(tree)
        assert by_dir.header == clean_dossier().header
        assert pack(by_dir) == data

    def test_unknown_members_survive_as_artefacts(self):
        data = rebuilt(**{"notes.txt": b"keep me"})
        med = unpack(data)
        kept = [a for a in med.artefacts if a.name == "notes.txt"]
        assert kept and kept[0].role == "other" and kept[0].data == b"keep me"
        again = unpack(pack(med))
        assert any(a.name == "notes.txt" and a.data == b"keep me" for a in again.artefacts)

    def test_not_a_zip(self):
        with pytest.raises(NotAZip):
            unpack(b"PK is just a prefix")

    def test_missing_header_member(self):
        with pytest.raises(MissingHeader):
            unpack(rebuilt(**{"header/med.meta": None}))

    def test_alignment_without_text_member(self):
        with pytest.raises(ValueError, match="parallel/es/text.txt"):
            unpack(rebuilt(**{"parallel/es/text.txt": None}))


class TestIndex:
    def test_deterministic(self):
        assert generate_index(clean_dossier()) == generate_index(clean_dossier())

    def test_links_versions_and_artefacts(self):
        text = generate_index(clean_dossier())
        assert '<a href="parallel/en/text.txt">' in text
        assert '<a href="parallel/es/text.txt">' in text
        assert '<a href="artefacts/translation-memory/memory.tmx">' in text
        assert '<a href="https://example.org/brief.pdf">' in text

    def test_escapes_html(self):
        med = MedDossier(
            header={"id": "x", "languages": "en", "title": "<script>alert(1)</script>"}
        )
        text = generate_index(med)
        assert "<script>" not in text
        assert "&lt;script&gt;" in text

    def test_absent_language_row(self):
        med = MedDossier(
            header={"id": "x", "languages": "en, es", "entirety.es": "suspended"}
        )
        text = generate_index(med)
        assert "<td>es</td><td>suspended</td><td>absent</td>" in text


class TestValidate:
    def test_clean_dossier(self):
        assert validate(pack(clean_dossier())) == []

    def test_clean_directory(self, tmp_path):
        with zipfile.ZipFile(io.BytesIO(pack(clean_dossier()))) as zf:
            zf.extractall(tmp_path / "med")
        assert validate(tmp_path / "med") == []

    def test_not_a_zip(self):
        assert codes(validate(b"junk")) == {"not-a-zip"}

    def test_missing_header(self):
        assert "missing-header" in codes(validate(rebuilt(**{"header/med.meta": None})))

    def test_malformed_header_line(self):
        data = rebuilt(**{"header/med.meta": b"id x\nlanguages: en\n"})
        found = codes(validate(data))
        assert "malformed-header-line" in found
        assert "missing-dossier-id" in found

    def test_missing_languages(self):
        data = rebuilt(**{"header/med.meta": b"id: x\n"})
        assert "missing-languages" in codes(validate(data))

    def test_malayalam_misuse(self):
        data = rebuilt(**{"header/med.meta": b"id: x\nlanguages: en, ml\n"})
        result = validate(data)
        assert "malayalam-misuse" in codes(result)
        assert any("mm" in d.message for d in result if d.code == "malayalam-misuse")

    def test_invalid_language_tag(self):
        data = rebuilt(**{"header/med.meta": b"id: x\nlanguages: en, qq\n"})
        assert "invalid-language-tag" in codes(validate(data))

    def test_invalid_entirety(self):
        data = rebuilt(
            **{"header/med.meta": b"id: x\nlanguages: en, es\nentirety.es: polished\n"}
        )
        assert "invalid-entirety" in codes(validate(data))

    def test_missing_version(self):
        data = rebuilt(**{"header/med.meta": b"id: x\nlanguages: en, es, de\n"})
        result = validate(data)
        assert "missing-version" in codes(result)
        assert any("de" in d.message for d in result if d.code == "missing-version")

    def test_undeclared_version(self):
        data = rebuilt(**{"parallel/de/text.txt": b"Hallo Welt."})
        assert "undeclared-version" in codes(validate(data))

    def test_empty_version_warning(self):
        data = rebuilt(
            **{
                "header/med.meta": b"id: x\nlanguages: en, es, de\nentirety.de: undefined\n",
                "parallel/de/text.txt": b"  ",
            }
        )
        result = validate(data)
        assert any(
            d.code == "empty-version" and d.severity == "warning" for d in result
        )

    def test_invalid_parallel_structure(self):
        data = rebuilt(**{"parallel/parallel.json": b"{not json"})
        assert "invalid-parallel-structure" in codes(validate(data))

    def test_missing_alignment_warning(self):
        data = rebuilt(**{"parallel/parallel.json": None})
        result = validate(data)
        assert any(
            d.code == "missing-alignment" and d.severity == "warning" for d in result
        )

    def test_unknown_link_role(self):
        data = rebuilt(**{"external.links": b"appendix https://example.org/x\n"})
        assert "unknown-link-role" in codes(validate(data))

    def test_malformed_external_uri(self):
        data = rebuilt(**{"external.links": b"other not-a-uri\n"})
        assert "malformed-external-uri" in codes(validate(data))

    def test_invalid_tmx_artefact(self):
        data = rebuilt(**{"artefacts/translation-memory/memory.tmx": b"<broken"})
        assert "invalid-tmx-artefact" in codes(validate(data))

    def test_missing_index_warning(self):
        data = rebuilt(**{"index.html": None})
        result = validate(data)
        assert any(
            d.code == "missing-index" and d.severity == "warning" for d in result
        )

    def test_dangling_index_link(self):
        data = rebuilt(
            **{"index.html": b'<html><body><a href="artefacts/other/gone.txt">x</a></body></html>'}
        )
        assert "dangling-index-link" in codes(validate(data))

    def test_stray_member(self):
        data = rebuilt(**{"misc/stray.bin": b"??"})
        result = validate(data)
        assert any(
            d.code == "stray-member" and d.severity == "warning" for d in result
        )

    def test_unsafe_member_path(self):
        members = members_of(pack(clean_dossier()))
        members["../escape.txt"] = b"evil"
        assert "unsafe-member-path" in codes(validate(zip_of(members)))

    def test_errors_sort_before_warnings(self):
        data = rebuilt(
            **{
                "misc/stray.bin": b"??",
                "parallel/de/text.txt": b"Hallo.",
            }
        )
        result = validate(data)
        severities = [d.severity for d in result]
        assert severities == sorted(severities, key=lambda s: s != "error")

    def test_diagnostic_rendering(self):
        d = LintDiagnostic("error", "missing-header", "no header/med.meta member")
        assert str(d) == "error: missing-header: no header/med.meta member"
        d = LintDiagnostic("warning", "empty-version", "version de is empty", "parallel/de/text.txt")
        assert str(d).endswith("[parallel/de/text.txt]")
