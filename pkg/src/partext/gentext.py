"""Document generation from templates over linguistic tables.

A template is plain text with placeholders.  ``{r7}`` expands to record
7 of the default table, ``{glossary#r7}`` to record 7 of a named table,
and ``{lang:en}...{/lang}`` blocks carry per-language literal text
(adjacent blocks for different languages merge into one alternative).
Braces are escaped by doubling.

Generation produces a segmented text whose expanded spans are sentence
segments linked back to their records, so every generated document can
be traced, harvested, or regenerated.  Generating all languages at once
yields parallel texts with the expansions pre-aligned; a record that
lacks some language leaves a broken line there and marks that version's
entirety as partial instead of failing the whole run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .align import (
    AlignmentGroup,
    Entirety,
    EntiretySet,
    ParallelTexts,
    parallel_granularity,
)
from .langtags import LanguageTag, TagKind
from .lingstore import LinguisticRecord, LinguisticTable, base_uri, bump_value, record_uri
from .segcore import Piece, SegmentedText, SegmentKind, assemble_pieces

__all__ = [
    "Literal",
    "Placeholder",
    "LangLiteral",
    "DocumentTemplate",
    "MalformedTemplate",
    "UnknownRecord",
    "MissingLanguage",
    "GenerationError",
    "parse_template",
    "generate",
    "generate_all",
]


class MalformedTemplate(ValueError):
    """The template text breaks the placeholder syntax."""

    def __init__(self, message: str, position: int | None = None):
        where = f" at character {position}" if position is not None else ""
        super().__init__(message + where)
        self.position = position


@dataclass(frozen=True)
class UnknownRecord:
    """A placeholder names a record the table does not hold."""

    table: str
    record_id: int

    def __str__(self) -> str:
        return f"table {self.table!r} has no record r{self.record_id}"


@dataclass(frozen=True)
class MissingLanguage:
    """A record exists but lacks the requested language."""

    table: str
    record_id: int
    language: LanguageTag

    def __str__(self) -> str:
        return f"record r{self.record_id} of {self.table!r} has no {self.language.code} segment"


class GenerationError(Exception):
    """Generation could not complete; carries every failure, not just the first."""

    def __init__(self, failures: list):
        self.failures = list(failures)
        super().__init__("; ".join(str(f) for f in self.failures))


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Placeholder:
    record_id: int
    table: str | None = None  # None addresses the default table


@dataclass(frozen=True)
class LangLiteral:
    texts: tuple[tuple[LanguageTag, str], ...]

    def text_for(self, lang: LanguageTag) -> str:
        for candidate, text in self.texts:
            if candidate == lang:
                return text
        return ""


TemplatePart = Literal | Placeholder | LangLiteral


@dataclass(frozen=True)
class DocumentTemplate:
    name: str
    parts: tuple[TemplatePart, ...]

    def placeholders(self) -> list[Placeholder]:
        return [p for p in self.parts if isinstance(p, Placeholder)]


def _scan_literal(text: str, start: int) -> tuple[str, int]:
    """Consume literal text handling brace escapes; stops before '{'."""
    out: list[str] = []
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "{":
            if text[i : i + 2] == "{{":
                out.append("{")
                i += 2
                continue
            break
        if ch == "}":
            if text[i : i + 2] == "}}":
                out.append("}")
                i += 2
                continue
            raise MalformedTemplate("single '}' outside a directive; write '}}'", i)
        out.append(ch)
        i += 1
    return "".join(out), i


def _parse_directive(text: str, i: int) -> tuple[str, int]:
    end = text.find("}", i)
    if end < 0:
        raise MalformedTemplate("unclosed '{'", i - 1)
    return text[i:end], end + 1


def _scan_lang_block(text: str, start: int) -> tuple[str, int]:
    """Consume a {lang:..} block body up to its {/lang}, unescaping braces."""
    out: list[str] = []
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "{":
            if text[i : i + 2] == "{{":
                out.append("{")
                i += 2
                continue
            if text[i : i + 7] == "{/lang}":
                return "".join(out), i + 7
            raise MalformedTemplate("directives cannot nest inside a language block", i)
        if ch == "}":
            if text[i : i + 2] == "}}":
                out.append("}")
                i += 2
                continue
            raise MalformedTemplate("single '}' inside a language block; write '}}'", i)
        out.append(ch)
        i += 1
    raise MalformedTemplate("unclosed {lang:..} block", start)


_PLACEHOLDER_RE = re.compile(r"(?:([A-Za-z0-9._:/-]+)#)?r([0-9]+)\Z")
_LANG_OPEN_RE = re.compile(r"lang:([A-Za-z]{2})\Z")


def parse_template(text: str, name: str = "template") -> DocumentTemplate:
    """Parse template text; see the module docstring for the syntax."""
    parts: list[TemplatePart] = []
    pending_langs: list[tuple[LanguageTag, str]] = []

    def flush_langs() -> None:
        if pending_langs:
            parts.append(LangLiteral(tuple(pending_langs)))
            pending_langs.clear()

    i = 0
    n = len(text)
    while i < n:
        literal, i = _scan_literal(text, i)
        if literal:
            flush_langs()
            parts.append(Literal(literal))
        if i >= n:
            break
        # at an undoubled '{'
        directive, j = _parse_directive(text, i + 1)
        lang_open = _LANG_OPEN_RE.fullmatch(directive)
        if lang_open:
            try:
                lang = LanguageTag(lang_open.group(1).lower())
            except ValueError as exc:
                raise MalformedTemplate(str(exc), i) from exc
            block, i = _scan_lang_block(text, j)
            pending_langs.append((lang, block))
            continue
        placeholder = _PLACEHOLDER_RE.fullmatch(directive)
        if placeholder:
            flush_langs()
            table = placeholder.group(1)
            parts.append(Placeholder(record_id=int(placeholder.group(2)), table=table))
            i = j
            continue
        raise MalformedTemplate(f"unknown directive {{{directive}}}", i)
    flush_langs()
    return DocumentTemplate(name=name, parts=tuple(parts))


def _table_for(
    part: Placeholder,
    default: LinguisticTable,
    tables: Mapping[str, LinguisticTable] | None,
) -> LinguisticTable:
    if part.table is None:
        return default
    if tables and part.table in tables:
        return tables[part.table]
    if part.table == default.name:
        return default
    raise ValueError(f"no table named {part.table!r} available to the template")


def _resolve(
    template: DocumentTemplate,
    default: LinguisticTable,
    tables: Mapping[str, LinguisticTable] | None,
) -> tuple[list[tuple[Placeholder, LinguisticTable, LinguisticRecord | None]], list[UnknownRecord]]:
    resolved = []
    unknown: list[UnknownRecord] = []
    for part in template.parts:
        if isinstance(part, Placeholder):
            table = _table_for(part, default, tables)
            record = table.get(part.record_id)
            if record is None:
                unknown.append(UnknownRecord(table.name, part.record_id))
            resolved.append((part, table, record))
    return resolved, unknown


def generate(
    template: DocumentTemplate,
    table: LinguisticTable,
    lang: LanguageTag,
    tables: Mapping[str, LinguisticTable] | None = None,
) -> SegmentedText:
    """Expand a template into one language.

    Every expanded span becomes a sentence segment linked to its record,
    and each expansion counts as one use of the record.  All failures are
    collected before raising, so a template with three bad placeholders
    reports all three.
    """
    if lang.kind is not TagKind.STANDARD:
        raise ValueError(f"generation targets a real language, not {lang.code!r}")
    resolved, failures = _resolve(template, table, tables)
    failures = list(failures)

    by_part = {id(part): (tbl, rec) for part, tbl, rec in resolved}
    pieces: list[Piece] = []
    expansions: list[tuple[LinguisticTable, int]] = []
    for part in template.parts:
        if isinstance(part, Literal):
            pieces.append(Piece(part.text))
        elif isinstance(part, LangLiteral):
            pieces.append(Piece(part.text_for(lang)))
        else:
            tbl, rec = by_part[id(part)]
            if rec is None:
                continue  # already reported as UnknownRecord
            segment = rec.segments.get(lang)
            if segment is None:
                failures.append(MissingLanguage(tbl.name, rec.id, lang))
                continue
            pieces.append(
                Piece(segment, record_uri=record_uri(base_uri(tbl), rec.id), marked=True)
            )
            expansions.append((tbl, rec.id))
    if failures:
        raise GenerationError(failures)
    st, _ = assemble_pieces(pieces, lang)
    for tbl, rid in expansions:
        bump_value(tbl, rid, "use")
    return st


def generate_all(
    template: DocumentTemplate,
    table: LinguisticTable,
    langs: Iterable[LanguageTag],
    tables: Mapping[str, LinguisticTable] | None = None,
) -> ParallelTexts:
    """Expand a template into every requested language, pre-aligned.

    Placeholder expansions are aligned across versions by construction:
    the n-th expansion of each version joins one group.  A record with
    no segment for some language simply leaves that version out of the
    group (a broken line) and marks the version's entirety ``partial``;
    versions with every expansion present are ``complete``.  Unknown
    records fail the whole call since no version could be faithful.
    """
    lang_list = sorted(set(langs), key=lambda l: l.code)
    if not lang_list:
        raise ValueError("at least one language is required")
    for lang in lang_list:
        if lang.kind is not TagKind.STANDARD:
            raise ValueError(f"generation targets real languages, not {lang.code!r}")

    resolved, unknown = _resolve(template, table, tables)
    if unknown:
        raise GenerationError(unknown)
    by_part = {id(part): (tbl, rec) for part, tbl, rec in resolved}
    occurrence_count = len(resolved)

    versions: dict[LanguageTag, SegmentedText] = {}
    # per language, the path of each expansion occurrence (None if absent)
    occurrence_paths: dict[LanguageTag, list[tuple[int, ...] | None]] = {}
    incomplete: set[LanguageTag] = set()
    expansions: list[tuple[LinguisticTable, int]] = []

    for lang in lang_list:
        pieces: list[Piece] = []
        present: list[bool] = []
        for part in template.parts:
            if isinstance(part, Literal):
                pieces.append(Piece(part.text))
            elif isinstance(part, LangLiteral):
                pieces.append(Piece(part.text_for(lang)))
            else:
                tbl, rec = by_part[id(part)]
                segment = rec.segments.get(lang)
                if segment is None:
                    incomplete.add(lang)
                    present.append(False)
                    continue
                pieces.append(
                    Piece(segment, record_uri=record_uri(base_uri(tbl), rec.id), marked=True)
                )
                expansions.append((tbl, rec.id))
                present.append(True)
        st, marked_paths = assemble_pieces(pieces, lang)
        versions[lang] = st
        paths: list[tuple[int, ...] | None] = []
        cursor = 0
        for ok in present:
            if ok:
                paths.append(marked_paths[cursor])
                cursor += 1
            else:
                paths.append(None)
        occurrence_paths[lang] = paths

    groups: list[AlignmentGroup] = []
    for occurrence in range(occurrence_count):
        members = {
            lang: occurrence_paths[lang][occurrence]
            for lang in lang_list
            if occurrence_paths[lang][occurrence] is not None
        }
        if members:
            groups.append(AlignmentGroup.of(SegmentKind.SENTENCE, members))

    for tbl, rid in expansions:
        bump_value(tbl, rid, "use")

    entirety = {
        lang: EntiretySet.of(Entirety.PARTIAL if lang in incomplete else Entirety.COMPLETE)
        for lang in lang_list
    }
    return ParallelTexts(
        versions=versions,
        groups=tuple(groups),
        granularity=parallel_granularity(versions.values()),
        entirety=entirety,
        provenance=f"template:{template.name}",
    )
