"""Multilingual Electronic Dossiers: one zip per document, all languages.

A dossier bundles a header, the parallel linguistic versions with their
alignment, and auxiliary artefacts (translation memories, background
material), plus a generated index page so the archive is browsable as-is.
Artefacts may be embedded or referenced by URI; the mixture determines
the dossier's form: self-contained, mix, or external-only.

Layout inside the archive::

    index.html                 generated overview page
    header/med.meta            key: value metadata, one per line
    parallel/parallel.json     alignment structure (no text duplication)
    parallel/<lang>/text.txt   one source text per linguistic version
    artefacts/<role>/<name>    embedded artefacts
    external.links             "<role> <uri>" lines for external artefacts

Packing is canonical: member order, timestamps and compression are fixed,
so equal dossiers produce byte-identical archives.
"""

from __future__ import annotations

import html
import io
import json
import posixpath
import zipfile
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Mapping
from urllib.parse import urlsplit

from .align import Entirety, EntiretySet, IllegalCombination, ParallelTexts
from .jsonio import pt_from_dict, pt_to_dict
from .langtags import LanguageTag, parse_language_list, parse_tag
from .lingstore import MalformedTmx, import_tmx

__all__ = [
    "Artefact",
    "MedDossier",
    "LintDiagnostic",
    "NotAZip",
    "MissingHeader",
    "ARTEFACT_ROLES",
    "pack",
    "unpack",
    "validate",
    "generate_index",
]


class NotAZip(ValueError):
    """The input is not a zip archive."""


class MissingHeader(ValueError):
    """The archive has no header/med.meta member."""


ARTEFACT_ROLES = frozenset({"translation-memory", "background-document", "other"})

_HEADER_MEMBER = "header/med.meta"
_PARALLEL_JSON = "parallel/parallel.json"
_LINKS_MEMBER = "external.links"
_INDEX_MEMBER = "index.html"


@dataclass(frozen=True)
class Artefact:
    """An auxiliary document, either embedded or referenced by URI."""

    role: str
    name: str | None = None
    data: bytes | None = None
    uri: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ARTEFACT_ROLES:
            raise ValueError(f"unknown artefact role {self.role!r}")
        embedded = self.name is not None and self.data is not None
        external = self.uri is not None
        if embedded == external:
            raise ValueError("an artefact is either embedded (name+data) or external (uri)")
        if self.name is not None:
            probe = posixpath.normpath(self.name)
            if self.name.startswith("/") or probe.startswith("..") or "\\" in self.name:
                raise ValueError(f"unsafe artefact name {self.name!r}")

    @property
    def embedded(self) -> bool:
        return self.uri is None


_META_KEY_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-")


@dataclass(frozen=True)
class MedDossier:
    """A complete multilingual dossier, ready to pack.

    The header always carries ``id`` and ``languages``.  A language that
    is declared but has no version explains its absence through an
    ``entirety.<lang>`` header key (``suspended``, ``translating``, ...).
    Artefacts are kept in a canonical order so equal dossiers compare
    and pack identically.
    """

    header: dict[str, str]
    parallel: ParallelTexts | None = None
    artefacts: tuple[Artefact, ...] = ()

    def __post_init__(self) -> None:
        for key, value in self.header.items():
            if not key or not set(key) <= _META_KEY_CHARS:
                raise ValueError(f"bad header key {key!r}")
            if "\n" in value or "\r" in value:
                raise ValueError(f"header value for {key!r} must be a single line")
        if not self.header.get("id", "").strip():
            raise ValueError("the header must carry a dossier id")
        if "languages" not in self.header:
            raise ValueError("the header must declare languages")
        parse_language_list(self.header["languages"])  # raises on bad tags
        for key, value in self.header.items():
            if key.startswith("entirety."):
                parse_tag(key[len("entirety."):])
                _parse_entirety(value)
        object.__setattr__(
            self,
            "artefacts",
            tuple(sorted(self.artefacts, key=lambda a: (a.role, a.name or "", a.uri or ""))),
        )

    @property
    def dossier_id(self) -> str:
        return self.header["id"]

    @property
    def languages(self) -> tuple[LanguageTag, ...]:
        return parse_language_list(self.header["languages"])

    @property
    def form(self) -> str:
        has_external = any(not a.embedded for a in self.artefacts)
        has_embedded = self.parallel is not None or any(a.embedded for a in self.artefacts)
        if has_external and has_embedded:
            return "mix"
        if has_external:
            return "external-only"
        return "self-contained"

    def entirety_of(self, lang: LanguageTag) -> EntiretySet | None:
        """Entirety for a language, from the alignment or the header."""
        if self.parallel is not None and lang in self.parallel.entirety:
            return self.parallel.entirety[lang]
        raw = self.header.get(f"entirety.{lang.code}")
        return _parse_entirety(raw) if raw else None


def _parse_entirety(value: str) -> EntiretySet:
    attrs = [part.strip() for part in value.split(",") if part.strip()]
    try:
        return EntiretySet(frozenset(Entirety(a) for a in attrs))
    except ValueError as exc:
        if isinstance(exc, IllegalCombination):
            raise
        raise ValueError(f"unknown entirety attribute in {value!r}") from exc


def _format_header(header: Mapping[str, str]) -> str:
    return "".join(f"{key}: {value}\n" for key, value in header.items())


def _parse_header(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"header line without ':': {line!r}")
        out[key.strip()] = value.strip()
    return out


def _members(med: MedDossier) -> dict[str, bytes]:
    members: dict[str, bytes] = {}
    members[_HEADER_MEMBER] = _format_header(med.header).encode("utf-8")
    if med.parallel is not None:
        structure = pt_to_dict(med.parallel, include_sources=False)
        members[_PARALLEL_JSON] = (
            json.dumps(structure, sort_keys=True, ensure_ascii=False, indent=1) + "\n"
        ).encode("utf-8")
        for lang, st in med.parallel.versions.items():
            members[f"parallel/{lang.code}/text.txt"] = st.source.encode("utf-8")
    links: list[str] = []
    for artefact in med.artefacts:
        if artefact.embedded:
            members[f"artefacts/{artefact.role}/{artefact.name}"] = artefact.data
        else:
            links.append(f"{artefact.role} {artefact.uri}\n")
    if links:
        members[_LINKS_MEMBER] = "".join(links).encode("utf-8")
    members[_INDEX_MEMBER] = generate_index(med).encode("utf-8")
    return members


def pack(med: MedDossier) -> bytes:
    """Serialize a dossier as a canonical zip archive."""
    members = _members(med)
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        for name in sorted(members):
            info = zipfile.ZipInfo(filename=name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            archive.writestr(info, members[name], compresslevel=6)
    return buffer.getvalue()


def _read_zip(data: bytes) -> dict[str, bytes]:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            return {
                info.filename: archive.read(info.filename)
                for info in archive.infolist()
                if not info.is_dir()
            }
    except zipfile.BadZipFile as exc:
        raise NotAZip(f"not a zip archive: {exc}") from exc


def unpack(data: bytes | str | Path) -> MedDossier:
    """Rebuild a dossier from its archive, archive path, or directory.

    Raises :exc:`NotAZip` and :exc:`MissingHeader` for the two ways an
    archive can be hopeless; anything structurally invalid inside raises
    ``ValueError`` from the dossier's own validation.  Unknown members
    are kept as artefacts of role ``other`` rather than dropped.
    """
    if isinstance(data, bytes):
        members = _read_zip(data)
    else:
        path = Path(data)
        if path.is_dir():
            members = {
                str(member.relative_to(path)).replace("\\", "/"): member.read_bytes()
                for member in sorted(path.rglob("*"))
                if member.is_file()
            }
        else:
            members = _read_zip(path.read_bytes())
    if _HEADER_MEMBER not in members:
        raise MissingHeader(f"archive has no {_HEADER_MEMBER}")
    header = _parse_header(members[_HEADER_MEMBER].decode("utf-8"))

    parallel: ParallelTexts | None = None
    consumed = {_HEADER_MEMBER, _INDEX_MEMBER}
    if _PARALLEL_JSON in members:
        structure = json.loads(members[_PARALLEL_JSON].decode("utf-8"))
        consumed.add(_PARALLEL_JSON)
        sources: dict[str, str] = {}
        for code in structure.get("versions", {}):
            member = f"parallel/{code}/text.txt"
            if member not in members:
                raise ValueError(f"alignment mentions {code} but {member} is missing")
            sources[code] = members[member].decode("utf-8")
            consumed.add(member)
        parallel = pt_from_dict(structure, sources)

    artefacts: list[Artefact] = []
    if _LINKS_MEMBER in members:
        consumed.add(_LINKS_MEMBER)
        for line in members[_LINKS_MEMBER].decode("utf-8").splitlines():
            if not line.strip():
                continue
            role, _, uri = line.partition(" ")
            if role not in ARTEFACT_ROLES or not uri.strip():
                role, uri = "other", line.strip()
            artefacts.append(Artefact(role=role, uri=uri.strip()))
    for name in members:
        if name in consumed:
            continue
        if name.startswith("artefacts/"):
            remainder = name[len("artefacts/"):]
            role, sep, artefact_name = remainder.partition("/")
            if sep and role in ARTEFACT_ROLES and artefact_name:
                artefacts.append(Artefact(role=role, name=artefact_name, data=members[name]))
                continue
            artefacts.append(Artefact(role="other", name=remainder, data=members[name]))
        elif name.startswith("parallel/"):
            # a stray file in the parallel section, not referenced by the
            # alignment; keep it rather than lose content
            artefacts.append(Artefact(role="other", name=name, data=members[name]))
        else:
            artefacts.append(Artefact(role="other", name=name, data=members[name]))

    return MedDossier(header=header, parallel=parallel, artefacts=tuple(artefacts))


# ---------------------------------------------------------------------------
# Index generation


def generate_index(med: MedDossier) -> str:
    """Deterministic overview page linking every part of the dossier."""
    e = html.escape
    lines: list[str] = []
    title = med.header.get("title") or med.dossier_id
    lines.append("<!DOCTYPE html>")
    lines.append('<html><head><meta charset="utf-8"/>')
    lines.append(f"<title>{e(title)}</title></head><body>")
    lines.append(f"<h1>{e(title)}</h1>")
    lines.append('<table class="header">')
    for key, value in med.header.items():
        lines.append(f"<tr><th>{e(key)}</th><td>{e(value)}</td></tr>")
    lines.append("</table>")

    lines.append("<h2>Linguistic versions</h2>")
    lines.append('<table class="versions"><tr><th>language</th><th>entirety</th><th>content</th></tr>')
    present = set(med.parallel.versions) if med.parallel is not None else set()
    for lang in med.languages:
        entirety = med.entirety_of(lang)
        shown = str(entirety) if entirety is not None else "undefined"
        if lang in present:
            cell = f'<a href="parallel/{e(lang.code)}/text.txt">text</a>'
        else:
            cell = "absent"
        lines.append(
            f"<tr><td>{e(lang.code)}</td><td>{e(shown)}</td><td>{cell}</td></tr>"
        )
    lines.append("</table>")

    if med.artefacts:
        lines.append("<h2>Artefacts</h2><ul>")
        for artefact in med.artefacts:
            if artefact.embedded:
                href = f"artefacts/{artefact.role}/{artefact.name}"
                label = artefact.name
            else:
                href = artefact.uri
                label = artefact.uri
            lines.append(
                f'<li><a href="{e(href)}">{e(label)}</a> ({e(artefact.role)})</li>'
            )
        lines.append("</ul>")
    lines.append("</body></html>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Lint


@dataclass(frozen=True)
class LintDiagnostic:
    """One problem found while checking a dossier."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    member: str | None = None

    def __str__(self) -> str:
        where = f" [{self.member}]" if self.member else ""
        return f"{self.severity}: {self.code}: {self.message}{where}"


class _LinkCollector(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.links: list[str] = []

    def handle_starttag(self, tag: str, attrs) -> None:
        for key, value in attrs:
            if key in ("href", "src") and value:
                self.links.append(value)


def _load_members(source: bytes | str | Path) -> tuple[dict[str, bytes] | None, list[LintDiagnostic]]:
    if isinstance(source, bytes):
        try:
            return _read_zip(source), []
        except NotAZip as exc:
            return None, [LintDiagnostic("error", "not-a-zip", str(exc))]
    path = Path(source)
    if path.is_dir():
        members = {
            str(member.relative_to(path)).replace("\\", "/"): member.read_bytes()
            for member in sorted(path.rglob("*"))
            if member.is_file()
        }
        return members, []
    try:
        return _read_zip(path.read_bytes()), []
    except NotAZip as exc:
        return None, [LintDiagnostic("error", "not-a-zip", str(exc), member=str(path))]


def validate(source: bytes | str | Path) -> list[LintDiagnostic]:
    """Check a dossier (archive bytes, archive path, or unpacked directory).

    Returns diagnostics ordered by severity, errors first.  An empty list
    means the dossier is clean.  Validation never raises on bad content;
    every defect becomes a diagnostic.
    """
    members, diagnostics = _load_members(source)
    if members is None:
        return diagnostics

    for name in members:
        normalized = posixpath.normpath(name)
        if name.startswith("/") or normalized.startswith("..") or "\\" in name:
            diagnostics.append(
                LintDiagnostic(
                    "error", "unsafe-member-path",
                    f"member path {name!r} escapes the archive", member=name,
                )
            )

    if _HEADER_MEMBER not in members:
        diagnostics.append(
            LintDiagnostic("error", "missing-header", f"no {_HEADER_MEMBER} member")
        )
        return _ordered(diagnostics)

    header: dict[str, str] = {}
    for line in members[_HEADER_MEMBER].decode("utf-8", errors="replace").splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition(":")
        if not sep:
            diagnostics.append(
                LintDiagnostic(
                    "error", "malformed-header-line",
                    f"header line without ':': {line!r}", member=_HEADER_MEMBER,
                )
            )
            continue
        header[key.strip()] = value.strip()

    if not header.get("id", "").strip():
        diagnostics.append(
            LintDiagnostic("error", "missing-dossier-id", "header carries no id", member=_HEADER_MEMBER)
        )

    declared: list[LanguageTag] = []
    if "languages" not in header:
        diagnostics.append(
            LintDiagnostic("error", "missing-languages", "header declares no languages", member=_HEADER_MEMBER)
        )
    else:
        for label in (part.strip() for part in header["languages"].split(",")):
            if not label:
                continue
            if label.lower() in ("ml", "m1"):
                diagnostics.append(
                    LintDiagnostic(
                        "error", "malayalam-misuse",
                        f"language label {label!r}: 'ml' is reserved for Malayalam; "
                        "multilingual dossiers declare 'mm'",
                        member=_HEADER_MEMBER,
                    )
                )
                if label.lower() == "ml":
                    declared.append(LanguageTag("ml"))
                continue
            try:
                declared.append(parse_tag(label))
            except ValueError as exc:
                diagnostics.append(
                    LintDiagnostic(
                        "error", "invalid-language-tag", str(exc), member=_HEADER_MEMBER
                    )
                )

    for key, value in header.items():
        if key.startswith("entirety."):
            code = key[len("entirety."):]
            try:
                parse_tag(code)
                _parse_entirety(value)
            except ValueError as exc:
                diagnostics.append(
                    LintDiagnostic("error", "invalid-entirety", str(exc), member=_HEADER_MEMBER)
                )

    version_members = {
        name: name.split("/")[1]
        for name in members
        if name.startswith("parallel/") and name.endswith("/text.txt") and name.count("/") == 2
    }
    version_codes = set(version_members.values())
    declared_codes = {lang.code for lang in declared}
    for lang in declared:
        if lang.code not in version_codes and f"entirety.{lang.code}" not in header:
            diagnostics.append(
                LintDiagnostic(
                    "error", "missing-version",
                    f"declared language {lang.code} has neither a text nor an "
                    f"entirety.{lang.code} header entry",
                )
            )
    for name, code in sorted(version_members.items()):
        try:
            parse_tag(code)
        except ValueError as exc:
            diagnostics.append(
                LintDiagnostic("error", "invalid-language-tag", str(exc), member=name)
            )
            continue
        if code not in declared_codes:
            diagnostics.append(
                LintDiagnostic(
                    "error", "undeclared-version",
                    f"version {code} is present but not declared", member=name,
                )
            )
        if not members[name].strip():
            diagnostics.append(
                LintDiagnostic("warning", "empty-version", f"version {code} is empty", member=name)
            )

    if _PARALLEL_JSON in members:
        try:
            structure = json.loads(members[_PARALLEL_JSON].decode("utf-8"))
            sources = {}
            for code in structure.get("versions", {}):
                member = f"parallel/{code}/text.txt"
                if member not in members:
                    raise ValueError(f"alignment mentions {code} but {member} is missing")
                sources[code] = members[member].decode("utf-8")
            pt_from_dict(structure, sources)
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            diagnostics.append(
                LintDiagnostic(
                    "error", "invalid-parallel-structure", str(exc), member=_PARALLEL_JSON
                )
            )
    elif version_members:
        diagnostics.append(
            LintDiagnostic(
                "warning", "missing-alignment",
                "linguistic versions are present but there is no alignment structure",
            )
        )

    if _LINKS_MEMBER in members:
        for line in members[_LINKS_MEMBER].decode("utf-8", errors="replace").splitlines():
            if not line.strip():
                continue
            role, _, uri = line.partition(" ")
            uri = uri.strip()
            if role not in ARTEFACT_ROLES:
                diagnostics.append(
                    LintDiagnostic(
                        "warning", "unknown-link-role",
                        f"unknown artefact role {role!r}", member=_LINKS_MEMBER,
                    )
                )
            target = uri or role
            split = urlsplit(target)
            if not split.scheme or not (split.netloc or split.path):
                diagnostics.append(
                    LintDiagnostic(
                        "error", "malformed-external-uri",
                        f"not an absolute URI: {target!r}", member=_LINKS_MEMBER,
                    )
                )

    for name in sorted(members):
        if name.startswith("artefacts/") and name.lower().endswith(".tmx"):
            try:
                import_tmx(members[name].decode("utf-8", errors="replace"))
            except MalformedTmx as exc:
                diagnostics.append(
                    LintDiagnostic("error", "invalid-tmx-artefact", str(exc), member=name)
                )

    if _INDEX_MEMBER not in members:
        diagnostics.append(
            LintDiagnostic("warning", "missing-index", "archive has no index.html")
        )
    else:
        collector = _LinkCollector()
        collector.feed(members[_INDEX_MEMBER].decode("utf-8", errors="replace"))
        for link in collector.links:
            if urlsplit(link).scheme:
                continue
            normalized = posixpath.normpath(link.split("#")[0])
            if normalized and normalized not in members:
                diagnostics.append(
                    LintDiagnostic(
                        "error", "dangling-index-link",
                        f"index links to missing member {link!r}", member=_INDEX_MEMBER,
                    )
                )

    known_prefixes = ("header/", "parallel/", "artefacts/")
    for name in sorted(members):
        if name in (_INDEX_MEMBER, _LINKS_MEMBER):
            continue
        if not name.startswith(known_prefixes):
            diagnostics.append(
                LintDiagnostic(
                    "warning", "stray-member",
                    f"member {name!r} belongs to no dossier section", member=name,
                )
            )

    return _ordered(diagnostics)


def _ordered(diagnostics: list[LintDiagnostic]) -> list[LintDiagnostic]:
    return sorted(diagnostics, key=lambda d: (d.severity != "error", d.code, d.member or ""))
