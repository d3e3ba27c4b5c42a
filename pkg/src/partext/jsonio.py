"""JSON-friendly dict conversion for trees, texts and parallel texts.

Dossier archives and the service keep segmentation structure as JSON
next to the raw text, never instead of it: sources stay byte-exact in
their own files and the structure here only points into them.
"""

from __future__ import annotations

from typing import Any, Mapping

from .align import (
    AlignmentGroup,
    EntiretySet,
    Entirety,
    ParallelTexts,
)
from .langtags import LanguageTag, parse_tag
from .segcore import (
    Coverage,
    Origin,
    Segment,
    SegmentKind,
    SegmentedText,
    TextGranularity,
)

__all__ = [
    "segment_to_dict",
    "segment_from_dict",
    "st_to_dict",
    "st_from_dict",
    "pt_to_dict",
    "pt_from_dict",
]


def segment_to_dict(seg: Segment) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": seg.kind.label, "span": [seg.start, seg.end]}
    if seg.children:
        out["children"] = [segment_to_dict(c) for c in seg.children]
    if seg.record_uri is not None:
        out["record_uri"] = seg.record_uri
    if seg.origin is Origin.MANUAL:
        out["origin"] = "manual"
    if seg.lang is not None:
        out["lang"] = seg.lang.code
    return out


def segment_from_dict(data: Mapping[str, Any]) -> Segment:
    return Segment(
        kind=SegmentKind.from_label(data["kind"]),
        start=int(data["span"][0]),
        end=int(data["span"][1]),
        children=tuple(segment_from_dict(c) for c in data.get("children", ())),
        record_uri=data.get("record_uri"),
        origin=Origin.MANUAL if data.get("origin") == "manual" else Origin.PROGRAMMATIC,
        lang=parse_tag(data["lang"]) if "lang" in data else None,
    )


def _granularity_to_dict(g: TextGranularity) -> dict[str, str]:
    return {"level": g.level.label, "coverage": g.coverage.label}


def _granularity_from_dict(data: Mapping[str, str]) -> TextGranularity:
    return TextGranularity(
        SegmentKind.from_label(data["level"]), Coverage.from_label(data["coverage"])
    )


def st_to_dict(st: SegmentedText, include_source: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {
        "language": st.language.code,
        "granularity": _granularity_to_dict(st.granularity),
        "root": segment_to_dict(st.root),
    }
    if include_source:
        out["source"] = st.source
    return out


def st_from_dict(data: Mapping[str, Any], source: str | None = None) -> SegmentedText:
    if source is None:
        source = data["source"]
    return SegmentedText(
        language=parse_tag(data["language"]),
        source=source,
        root=segment_from_dict(data["root"]),
        granularity=_granularity_from_dict(data["granularity"]),
    )


def pt_to_dict(pt: ParallelTexts, include_sources: bool = False) -> dict[str, Any]:
    return {
        "versions": {
            lang.code: st_to_dict(st, include_source=include_sources)
            for lang, st in sorted(pt.versions.items(), key=lambda kv: kv[0].code)
        },
        "groups": [
            {
                "kind": g.kind.label,
                "members": {lang.code: list(path) for lang, path in g.members},
            }
            for g in pt.groups
        ],
        "granularity": _granularity_to_dict(pt.granularity),
        "entirety": {
            lang.code: [a.value for a in attrs]
            for lang, attrs in sorted(pt.entirety.items(), key=lambda kv: kv[0].code)
        },
        "provenance": pt.provenance,
    }


def pt_from_dict(
    data: Mapping[str, Any], sources: Mapping[str, str] | None = None
) -> ParallelTexts:
    versions: dict[LanguageTag, SegmentedText] = {}
    for code, st_data in data["versions"].items():
        lang = parse_tag(code)
        source = None if "source" in st_data else (sources or {})[code]
        versions[lang] = st_from_dict(st_data, source=source)
    groups = tuple(
        AlignmentGroup.of(
            SegmentKind.from_label(g["kind"]),
            {parse_tag(code): tuple(path) for code, path in g["members"].items()},
        )
        for g in data["groups"]
    )
    entirety = {
        parse_tag(code): EntiretySet(frozenset(Entirety(a) for a in attrs))
        for code, attrs in data.get("entirety", {}).items()
    }
    return ParallelTexts(
        versions=versions,
        groups=groups,
        granularity=_granularity_from_dict(data["granularity"]),
        entirety=entirety,
        provenance=data.get("provenance"),
    )
