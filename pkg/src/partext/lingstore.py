"""Linguistic tables: multilingual records with lookup and interchange.

A linguistic table holds records; a record holds one text segment per
language plus light metadata.  Tables double as translation memories
(lookup by exact or fuzzy match), as the backing store for document
generation (records addressed by URI), and as the unit of interchange
(TMX, CSV, marked text).

Fuzzy lookup scores by normalized Levenshtein similarity over
whitespace-collapsed text.  A trigram index narrows the candidate set;
the narrowing is provably lossless for the requested threshold, falling
back to a full scan whenever the bound gives no guarantee.
"""

from __future__ import annotations

import csv
import io
import json
import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .align import ParallelTexts
from .langtags import LanguageTag, TagKind, parse_tag
from .segcore import (
    Piece,
    SegmentedText,
    SegmentKind,
    assemble_pieces,
    collapse_ws,
)

__all__ = [
    "RecordValue",
    "LinguisticRecord",
    "LinguisticTable",
    "ScoredMatch",
    "NoSuchRecord",
    "MalformedTmx",
    "MalformedCsv",
    "MalformedRecordUri",
    "UnknownBase",
    "MixedBases",
    "MalformedMarkedText",
    "levenshtein",
    "extract_tm",
    "harvest",
    "bump_value",
    "override_value",
    "export_tmx",
    "import_tmx",
    "export_csv",
    "import_csv",
    "export_table",
    "base_uri",
    "record_uri",
    "uri_registry",
    "resolve_record_uri",
    "emit_marked_text",
    "parse_marked_text",
    "save_table",
    "load_table",
]


class NoSuchRecord(LookupError):
    """No record with the given identifier exists in the table."""


class MalformedTmx(ValueError):
    """The input is not the supported TMX subset."""


class MalformedCsv(ValueError):
    """The input is not the supported CSV shape."""


class MalformedRecordUri(ValueError):
    """The string is not a record URI of the form <base>/rN."""


class UnknownBase(LookupError):
    """The record URI's base names no registered table."""


class MixedBases(ValueError):
    """A document links records from more than one base URI."""


class MalformedMarkedText(ValueError):
    """Marked text with broken or unescaped marker syntax."""

    def __init__(self, message: str, position: int | None = None):
        where = f" at character {position}" if position is not None else ""
        super().__init__(message + where)
        self.position = position


@dataclass
class RecordValue:
    """Usage counters for one record, with an optional manual override.

    Reads count retrievals, uses count expansions into documents.  The
    effective value weights uses ten times as heavily as reads; a manual
    override, when set, wins outright.  Counters never decrease.
    """

    reads: int = 0
    uses: int = 0
    manual_override: int | None = None

    def effective(self) -> int:
        if self.manual_override is not None:
            return self.manual_override
        return 10 * self.uses + self.reads


@dataclass
class LinguisticRecord:
    """One multilingual record: the same text in one or more languages."""

    id: int
    segments: dict[LanguageTag, str]
    domain: str | None = None
    source_link: str | None = None
    value: RecordValue = field(default_factory=RecordValue)
    source_table: str | None = None

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError("record ids start at 1")
        if not self.segments:
            raise ValueError("a record holds at least one segment")
        for lang in self.segments:
            if lang.kind is not TagKind.STANDARD:
                raise ValueError(
                    f"record segments are keyed by real languages, not {lang.code!r}"
                )


@dataclass(frozen=True)
class ScoredMatch:
    """One fuzzy lookup hit."""

    record_id: int
    score: float


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert, delete, substitute) between two strings."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def _trigram_set(text: str) -> frozenset[str]:
    if not text:
        return frozenset()
    padded = f"\x00\x00{text}\x00\x00"
    return frozenset(padded[i : i + 3] for i in range(len(padded) - 2))


_NAME_RE = re.compile(r"\S+")


class LinguisticTable:
    """An ordered collection of multilingual records.

    Records are identified by small integers assigned on insertion.
    Inserting a record whose whitespace-normalized segment map already
    exists returns the existing identifier instead of duplicating, so a
    table never holds two linguistically identical records.
    """

    def __init__(self, name: str = "table"):
        if not _NAME_RE.fullmatch(name):
            raise ValueError("table name must be non-empty without whitespace")
        self.name = name
        self._records: dict[int, LinguisticRecord] = {}
        self._next_id = 1
        # lang code -> normalized text -> record ids, in insertion order
        self._exact: dict[str, dict[str, list[int]]] = {}
        # lang code -> trigram -> record ids
        self._trigrams: dict[str, dict[str, set[int]]] = {}
        # lang code -> record id -> normalized text
        self._norms: dict[str, dict[int, str]] = {}
        self._dedup: dict[frozenset, int] = {}

    # -- basic access -------------------------------------------------

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: int) -> bool:
        return record_id in self._records

    def get(self, record_id: int) -> LinguisticRecord | None:
        return self._records.get(record_id)

    def require(self, record_id: int) -> LinguisticRecord:
        record = self._records.get(record_id)
        if record is None:
            raise NoSuchRecord(f"table {self.name!r} has no record r{record_id}")
        return record

    def records(self) -> list[LinguisticRecord]:
        return [self._records[i] for i in sorted(self._records)]

    def languages(self) -> list[LanguageTag]:
        seen: set[LanguageTag] = set()
        for record in self._records.values():
            seen.update(record.segments)
        return sorted(seen, key=lambda l: l.code)

    # -- insertion ----------------------------------------------------

    @staticmethod
    def _dedup_key(segments: Mapping[LanguageTag, str]) -> frozenset:
        return frozenset((lang.code, collapse_ws(text)) for lang, text in segments.items())

    def insert(
        self,
        segments: Mapping[LanguageTag, str],
        domain: str | None = None,
        source_link: str | None = None,
    ) -> int:
        """Add a record, returning its id (or the existing duplicate's)."""
        key = self._dedup_key(segments)
        existing = self._dedup.get(key)
        if existing is not None:
            return existing
        record = LinguisticRecord(
            id=self._next_id,
            segments=dict(segments),
            domain=domain,
            source_link=source_link,
        )
        self._store(record)
        return record.id

    def adopt(self, record: LinguisticRecord, source_table: str | None = None) -> None:
        """Take over a record from another table, id included."""
        if record.id in self._records:
            return
        copied = LinguisticRecord(
            id=record.id,
            segments=dict(record.segments),
            domain=record.domain,
            source_link=record.source_link,
            value=RecordValue(
                reads=record.value.reads,
                uses=record.value.uses,
                manual_override=record.value.manual_override,
            ),
            source_table=source_table if source_table is not None else record.source_table,
        )
        self._store(copied)

    def insert_with_id(self, record: LinguisticRecord) -> None:
        """Insert preserving the record's id; duplicates of either kind fail."""
        if record.id in self._records:
            raise ValueError(f"record id {record.id} already present")
        self._store(record)

    def _store(self, record: LinguisticRecord) -> None:
        key = self._dedup_key(record.segments)
        if key in self._dedup:
            return
        self._records[record.id] = record
        self._dedup[key] = record.id
        self._next_id = max(self._next_id, record.id + 1)
        for lang, text in record.segments.items():
            norm = collapse_ws(text)
            self._exact.setdefault(lang.code, {}).setdefault(norm, []).append(record.id)
            self._norms.setdefault(lang.code, {})[record.id] = norm
            grams = self._trigrams.setdefault(lang.code, {})
            for gram in _trigram_set(norm):
                grams.setdefault(gram, set()).add(record.id)

    # -- lookup -------------------------------------------------------

    def _ranked(self, ids: Iterable[int]) -> list[LinguisticRecord]:
        return sorted(
            (self._records[i] for i in ids),
            key=lambda r: (-r.value.effective(), r.id),
        )

    def lookup_exact(self, lang: LanguageTag, text: str) -> list[LinguisticRecord]:
        """Records whose segment in ``lang`` matches after normalization.

        Results are ordered by descending effective value, then id, so the
        best-established translation comes first.
        """
        ids = self._exact.get(lang.code, {}).get(collapse_ws(text), [])
        return self._ranked(ids)

    def lookup_fuzzy(
        self, lang: LanguageTag, text: str, threshold: float
    ) -> list[ScoredMatch]:
        """Records scoring at least ``threshold`` similarity in ``lang``.

        Similarity is 1 - d/max(len) over whitespace-normalized texts,
        where d is the Levenshtein distance; two empty texts score 1.
        The trigram prefilter only discards candidates the bound proves
        cannot reach the threshold, so results equal a full scan.
        """
        if not 0.0 < threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")
        query = collapse_ws(text)
        norms = self._norms.get(lang.code, {})
        matches: list[ScoredMatch] = []

        if threshold >= 1.0:
            for record_id in self._exact.get(lang.code, {}).get(query, []):
                matches.append(ScoredMatch(record_id, 1.0))
        else:
            candidate_ids: Iterable[int]
            query_grams = _trigram_set(query)
            max_edits = int((1.0 - threshold) * len(query) / threshold + 1e-9)
            required = len(query_grams) - 3 * max_edits
            if required >= 1:
                counts: Counter[int] = Counter()
                index = self._trigrams.get(lang.code, {})
                for gram in query_grams:
                    for record_id in index.get(gram, ()):
                        counts[record_id] += 1
                candidate_ids = [i for i, c in counts.items() if c >= required]
            else:
                candidate_ids = norms.keys()
            qlen = len(query)
            for record_id in candidate_ids:
                stored = norms[record_id]
                longest = max(qlen, len(stored))
                if longest == 0:
                    score = 1.0
                else:
                    if 1.0 - abs(qlen - len(stored)) / longest < threshold:
                        continue  # even the length difference alone disqualifies
                    score = 1.0 - levenshtein(query, stored) / longest
                if score >= threshold:
                    matches.append(ScoredMatch(record_id, score))

        matches.sort(
            key=lambda m: (-m.score, -self._records[m.record_id].value.effective(), m.record_id)
        )
        return matches


# ---------------------------------------------------------------------------
# Value accounting


def bump_value(table: LinguisticTable, record_id: int, event: str) -> RecordValue:
    """Count one read or use of a record; returns the updated value."""
    if event not in ("read", "use"):
        raise ValueError(f"unknown value event {event!r}")
    record = table.require(record_id)
    if event == "read":
        record.value.reads += 1
    else:
        record.value.uses += 1
    return record.value


def override_value(table: LinguisticTable, record_id: int, value: int | None) -> RecordValue:
    """Set or clear the manual value override of a record."""
    record = table.require(record_id)
    record.value.manual_override = value
    return record.value


# ---------------------------------------------------------------------------
# Translation memory extraction and harvesting


def extract_tm(
    database: LinguisticTable,
    document: SegmentedText,
    target_langs: Iterable[LanguageTag],
    threshold: float = 1.0,
) -> LinguisticTable:
    """Records relevant to translating a document, as a fresh table.

    A record is relevant when some leaf segment of the document matches
    its text in the document's language at ``threshold`` or better, and
    it carries at least one of the requested target languages.  Records
    keep their identifiers; the source table's name travels along as
    provenance.
    """
    targets = set(target_langs)
    memory = LinguisticTable(name=f"{database.name}.tm")
    for leaf in document.root.leaves():
        text = document.text_of(leaf)
        if not collapse_ws(text):
            continue
        for match in database.lookup_fuzzy(document.language, text, threshold):
            record = database.require(match.record_id)
            if any(lang in record.segments for lang in targets):
                memory.adopt(record, source_table=database.name)
    return memory


def harvest(pt: ParallelTexts, table: LinguisticTable) -> int:
    """Turn alignment groups into records; returns how many were new.

    Groups must be at sentence kind or coarser.  A group contributes one
    record holding its member texts; groups with fewer than two non-empty
    members are broken lines and are skipped.  Existing identical records
    are reused, not duplicated.
    """
    for group in pt.groups:
        if group.kind is SegmentKind.SUB_SENTENCE:
            raise ValueError("harvesting expects sentence kind or coarser")
    before = len(table)
    for group in pt.groups:
        texts = pt.group_texts(group)
        cleaned = {
            lang: text
            for lang, text in texts.items()
            if lang.kind is TagKind.STANDARD and collapse_ws(text)
        }
        if len(cleaned) >= 2:
            table.insert(cleaned, source_link=pt.provenance)
    return len(table) - before


# ---------------------------------------------------------------------------
# Record URIs


def base_uri(table: LinguisticTable) -> str:
    """The base under which a table's records are addressed.

    Table names that already look like URIs are used as-is; plain names
    get a ``table:`` scheme.
    """
    return table.name if "://" in table.name else f"table:{table.name}"


def record_uri(base: str, record_id: int) -> str:
    return f"{base}/r{record_id}"


def uri_registry(tables: Iterable[LinguisticTable]) -> dict[str, LinguisticTable]:
    return {base_uri(table): table for table in tables}


_RECORD_URI_RE = re.compile(r"(.+)/r([0-9]+)\Z")


def resolve_record_uri(
    uri: str, registry: Mapping[str, LinguisticTable]
) -> LinguisticRecord:
    """Find the record a URI points at.

    Raises :exc:`MalformedRecordUri` when the string does not end in
    ``/rN``, :exc:`UnknownBase` when no table is registered under the
    base, and :exc:`NoSuchRecord` when the table lacks the record.
    """
    match = _RECORD_URI_RE.match(uri)
    if not match:
        raise MalformedRecordUri(f"{uri!r} is not of the form <base>/rN")
    base, number = match.group(1), int(match.group(2))
    table = registry.get(base)
    if table is None:
        raise UnknownBase(f"no table registered for base {base!r}")
    return table.require(number)


# ---------------------------------------------------------------------------
# TMX interchange


def export_tmx(table: LinguisticTable, langs: Sequence[LanguageTag]) -> str:
    """Serialize records as TMX 1.4, one translation unit per record.

    Only the requested languages are emitted; records carrying none of
    them are left out.  Output is deterministic for a given table.
    """
    _check_export_langs(table, langs)
    root = ET.Element("tmx", version="1.4")
    ET.SubElement(
        root,
        "header",
        {
            "creationtool": "partext",
            "creationtoolversion": "0.1.0",
            "segtype": "sentence",
            "o-tmf": "plain",
            "adminlang": "en",
            "srclang": langs[0].code,
            "datatype": "plaintext",
        },
    )
    body = ET.SubElement(root, "body")
    for record in table.records():
        present = [lang for lang in langs if lang in record.segments]
        if not present:
            continue
        tu = ET.SubElement(body, "tu", {"tuid": str(record.id)})
        for lang in present:
            tuv = ET.SubElement(tu, "tuv", {"xml:lang": lang.code})
            seg = ET.SubElement(tuv, "seg")
            seg.text = record.segments[lang]
    return '<?xml version="1.0" encoding="utf-8"?>\n' + ET.tostring(root, encoding="unicode")


_XML_LANG = "{http://www.w3.org/XML/1998/namespace}lang"
_TMX_INLINE = {"bpt", "ept", "ph", "it", "hi", "sub", "ut"}


def import_tmx(text: str) -> LinguisticTable:
    """Parse the supported TMX subset into a fresh table.

    Record ids are assigned in document order.  Translation units using
    inline markup are rejected outright: silently flattening them would
    corrupt the segments, so the error names the offending elements.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedTmx(f"not well-formed XML (line {line}, column {column})") from exc
    if root.tag != "tmx":
        raise MalformedTmx(f"root element must be <tmx>, got <{root.tag}>")
    body = root.find("body")
    if body is None:
        raise MalformedTmx("missing <body>")
    table = LinguisticTable(name="tmx-import")
    for tu in body.findall("tu"):
        segments: dict[LanguageTag, str] = {}
        for tuv in tu.findall("tuv"):
            code = tuv.get(_XML_LANG) or tuv.get("xml:lang") or tuv.get("lang")
            if not code:
                raise MalformedTmx("<tuv> without a language attribute")
            try:
                lang = parse_tag(code.split("-")[0])
            except ValueError as exc:
                raise MalformedTmx(f"unsupported language code {code!r}") from exc
            seg = tuv.find("seg")
            if seg is None:
                raise MalformedTmx("<tuv> without a <seg>")
            inline = sorted({child.tag for child in seg.iter() if child is not seg})
            if inline:
                raise MalformedTmx(
                    "inline markup is not supported: " + ", ".join(f"<{t}>" for t in inline)
                )
            segments[lang] = seg.text or ""
        if segments:
            table.insert(segments)
    return table


# ---------------------------------------------------------------------------
# CSV interchange


def _check_export_langs(table: LinguisticTable, langs: Sequence[LanguageTag]) -> None:
    if not langs:
        raise ValueError("at least one language is required")
    if len({l.code for l in langs}) != len(langs):
        raise ValueError("duplicate language in export request")
    if not len(table):
        return  # an empty table exports an empty body for any languages
    available = set(table.languages())
    missing = [l.code for l in langs if l not in available]
    if missing:
        raise ValueError(f"table has no records in: {', '.join(missing)}")


def export_table(
    table: LinguisticTable, langs: Sequence[LanguageTag], fmt: str = "tmx"
) -> str:
    """Export in the requested format, dropping languages the table lacks.

    This is the forgiving front door used when the language list comes
    from a caller who knows the database, not this particular table (a
    freshly extracted memory may simply have nothing in some of them).
    """
    available = set(table.languages())
    present = [lang for lang in langs if lang in available] or list(langs)
    if fmt == "tmx":
        return export_tmx(table, present)
    if fmt == "csv":
        return export_csv(table, present)
    raise ValueError(f"unknown format {fmt!r}")


def export_csv(table: LinguisticTable, langs: Sequence[LanguageTag]) -> str:
    """Serialize records as CSV with an ``id`` column plus one per language."""
    _check_export_langs(table, langs)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(["id"] + [lang.code for lang in langs])
    for record in table.records():
        if not any(lang in record.segments for lang in langs):
            continue
        writer.writerow([str(record.id)] + [record.segments.get(lang, "") for lang in langs])
    return buffer.getvalue()


def import_csv(text: str, header: Sequence[str] | None = None) -> LinguisticTable:
    """Parse CSV into a fresh table, preserving the file's record ids.

    Files normally start with their own ``id,<lang>,...`` header row;
    for headerless files, pass the language codes of the columns after
    the leading id column.
    """
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if header is None:
        if not rows:
            raise MalformedCsv("empty input")
        head, rows = rows[0], rows[1:]
        if not head or head[0].strip().lower() != "id":
            raise MalformedCsv("the first column must be 'id'")
        lang_cells = head[1:]
    else:
        lang_cells = list(header)
    try:
        langs = [parse_tag(cell) for cell in lang_cells]
    except ValueError as exc:
        raise MalformedCsv(f"bad language column: {exc}") from exc
    if not langs:
        raise MalformedCsv("no language columns")
    if len(set(langs)) != len(langs):
        raise MalformedCsv("duplicate language column")

    table = LinguisticTable(name="csv-import")
    width = 1 + len(langs)
    for index, row in enumerate(rows, start=2 if header is None else 1):
        if len(row) != width:
            raise MalformedCsv(f"row {index}: expected {width} columns, got {len(row)}")
        try:
            record_id = int(row[0])
        except ValueError:
            raise MalformedCsv(f"row {index}: id {row[0]!r} is not an integer") from None
        segments = {lang: cell for lang, cell in zip(langs, row[1:]) if cell != ""}
        if not segments:
            raise MalformedCsv(f"row {index}: record r{record_id} has no segments")
        try:
            table.insert_with_id(
                LinguisticRecord(id=record_id, segments=segments)
            )
        except ValueError as exc:
            raise MalformedCsv(f"row {index}: {exc}") from None
    return table


# ---------------------------------------------------------------------------
# Marked text


def emit_marked_text(document: SegmentedText, base: str) -> str:
    """Serialize a document with its record links as marked text.

    The output starts with ``#base`` and ``#lang`` header lines, then the
    document text with each record-linked span written as an inline
    marker ``<<rN|text>>``.  Marker characters occurring literally are
    escaped by doubling.  All record URIs must live under ``base``;
    anything else raises :exc:`MixedBases`.
    """
    marked: list = []

    def collect(seg) -> None:
        if seg.record_uri is not None and seg is not document.root:
            marked.append(seg)
            return
        for child in seg.children:
            collect(child)

    collect(document.root)

    data = document.encoded
    parts = [f"#base {base}\n#lang {document.language.code}\n"]
    pos = 0
    prefix = base + "/r"
    for seg in marked:
        if not seg.record_uri.startswith(prefix) or not seg.record_uri[len(prefix):].isdigit():
            raise MixedBases(
                f"record URI {seg.record_uri!r} is not under base {base!r}"
            )
        number = seg.record_uri[len(prefix):]
        parts.append(_escape_marked(data[pos : seg.start].decode("utf-8")))
        parts.append(f"<<r{number}|{_escape_marked(document.text_of(seg))}>>")
        pos = seg.end
    parts.append(_escape_marked(data[pos:].decode("utf-8")))
    return "".join(parts)


def _escape_marked(text: str) -> str:
    return text.replace("<<", "<<<<").replace(">>", ">>>>").replace("|", "||")


_RID_RE = re.compile(r"r[0-9]+\Z")


def parse_marked_text(text: str) -> SegmentedText:
    """Parse marked text back into a segmented document.

    Paragraphs are recovered from blank lines; each ``<<rN|...>>`` marker
    becomes a sentence segment whose record URI joins the header base
    with rN.  Undoubled marker characters outside a well-formed marker
    are an error, as is a marker that never closes.
    """
    base: str | None = None
    lang = LanguageTag("un")
    rest = text
    while rest.startswith("#"):
        line, _, remainder = rest.partition("\n")
        if line.startswith("#base "):
            base = line[len("#base "):].strip()
        elif line.startswith("#lang "):
            lang = parse_tag(line[len("#lang "):].strip())
        else:
            break
        rest = remainder
    if base is None:
        raise MalformedMarkedText("missing '#base <uri>' header line")

    pieces: list[Piece] = []
    literal: list[str] = []
    i = 0
    n = len(rest)
    offset = len(text) - n  # for error positions in the original string

    def flush() -> None:
        if literal:
            pieces.append(Piece("".join(literal)))
            literal.clear()

    while i < n:
        two = rest[i : i + 2]
        four = rest[i : i + 4]
        if four in ("<<<<", ">>>>"):
            literal.append(four[:2])
            i += 4
        elif two == "||":
            literal.append("|")
            i += 2
        elif two == "<<":
            start = i
            i += 2
            bar = rest.find("|", i)
            if bar < 0:
                raise MalformedMarkedText("marker never reaches its '|'", offset + start)
            rid = rest[i:bar]
            if not _RID_RE.fullmatch(rid):
                raise MalformedMarkedText(f"bad record id {rid!r} in marker", offset + start)
            i = bar + 1
            content: list[str] = []
            while True:
                if i >= n:
                    raise MalformedMarkedText("marker never closes", offset + start)
                two = rest[i : i + 2]
                four = rest[i : i + 4]
                if four in ("<<<<", ">>>>"):
                    content.append(four[:2])
                    i += 4
                elif two == "||":
                    content.append("|")
                    i += 2
                elif two == ">>":
                    i += 2
                    break
                elif two == "<<":
                    raise MalformedMarkedText("markers do not nest", offset + i)
                elif rest[i] == "|":
                    raise MalformedMarkedText("single '|' inside a marker; write '||'", offset + i)
                else:
                    content.append(rest[i])
                    i += 1
            flush()
            pieces.append(
                Piece("".join(content), record_uri=f"{base}/{rid}", marked=True)
            )
        elif two == ">>":
            raise MalformedMarkedText("unmatched '>>' outside a marker", offset + i)
        elif rest[i] == "|":
            raise MalformedMarkedText("single '|' outside a marker; write '||'", offset + i)
        else:
            literal.append(rest[i])
            i += 1
    flush()

    st, _ = assemble_pieces(pieces, lang)
    return st


# ---------------------------------------------------------------------------
# Persistence

_STORE_FORMAT = 1
_META_COLUMNS = ["domain", "source_link", "reads", "uses", "manual_override", "source_table"]


def save_table(table: LinguisticTable, directory: str | Path) -> None:
    """Write a table to a directory: a manifest plus one records file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    langs = table.languages()
    manifest = {
        "format": _STORE_FORMAT,
        "name": table.name,
        "languages": [lang.code for lang in langs],
        "next_id": table._next_id,
        "records": "records.csv",
    }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(["id"] + [lang.code for lang in langs] + _META_COLUMNS)
    for record in table.records():
        row = [str(record.id)]
        row += [record.segments.get(lang, "") for lang in langs]
        row += [
            record.domain or "",
            record.source_link or "",
            str(record.value.reads),
            str(record.value.uses),
            "" if record.value.manual_override is None else str(record.value.manual_override),
            record.source_table or "",
        ]
        writer.writerow(row)
    (directory / "records.csv").write_text(buffer.getvalue(), encoding="utf-8")


def load_table(directory: str | Path) -> LinguisticTable:
    """Read back a table written by :func:`save_table`."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"{directory} holds no table manifest")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("format") != _STORE_FORMAT:
        raise ValueError(f"unsupported table format {manifest.get('format')!r}")
    langs = [parse_tag(code) for code in manifest["languages"]]
    table = LinguisticTable(name=manifest["name"])
    records_path = directory / manifest.get("records", "records.csv")
    reader = csv.reader(io.StringIO(records_path.read_text(encoding="utf-8")))
    rows = [row for row in reader if row]
    if rows:
        expected = ["id"] + [lang.code for lang in langs] + _META_COLUMNS
        if rows[0] != expected:
            raise ValueError(f"records file columns {rows[0]} do not match the manifest")
        for row in rows[1:]:
            record_id = int(row[0])
            segments = {
                lang: cell for lang, cell in zip(langs, row[1 : 1 + len(langs)]) if cell != ""
            }
            domain, source_link, reads, uses, override, source_table = row[1 + len(langs):]
            table.insert_with_id(
                LinguisticRecord(
                    id=record_id,
                    segments=segments,
                    domain=domain or None,
                    source_link=source_link or None,
                    value=RecordValue(
                        reads=int(reads),
                        uses=int(uses),
                        manual_override=None if override == "" else int(override),
                    ),
                    source_table=source_table or None,
                )
            )
    table._next_id = max(table._next_id, int(manifest.get("next_id", 1)))
    return table
