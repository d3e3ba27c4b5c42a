"""Parallel texts: aligned linguistic versions of the same content.

Versions are segmented texts keyed by language.  Alignment groups tie
corresponding segments together by path, one member per language; a
version missing from a group is a broken line, visible rather than
papered over.

Granularities of segmented texts form a small lattice ordered first by
level (file < paragraph < sentence < sub-sentence) and then by coverage
(partial < full).  The granularity of parallel texts can never be finer
than that of any version, so combining versions takes the meet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .langtags import LanguageTag, TagKind
from .segcore import (
    Coverage,
    Segment,
    SegmentKind,
    SegmentedText,
    TextGranularity,
    collapse_ws,
    compute_granularity_raw,
    coverage_at,
)

__all__ = [
    "Entirety",
    "EntiretySet",
    "IllegalCombination",
    "AlignmentGroup",
    "ParallelTexts",
    "KindTooFine",
    "GranularityUnachievable",
    "VeryMixedUnsupported",
    "granularity_meet",
    "parallel_granularity",
    "align",
    "set_entirety",
    "split_multilingual",
    "check_multilingual_consistency",
    "ConsistencyDiagnostic",
]


class IllegalCombination(ValueError):
    """The entirety attributes contradict each other."""


class KindTooFine(ValueError):
    """No version is segmented at the requested kind or finer."""


class GranularityUnachievable(ValueError):
    """No alignment is possible, not even at file level."""


class VeryMixedUnsupported(ValueError):
    """Language switches below paragraph level cannot be split apart."""


class Entirety(enum.Enum):
    """How complete a linguistic version is, and why.

    Attributes combine where that makes sense: a machine-translated
    summary is ``{summary, machine}``.  ``undefined`` stands alone, and
    ``complete`` cannot be claimed together with ``partial`` or
    ``summary``.
    """

    COMPLETE = "complete"
    PARTIAL = "partial"
    SUMMARY = "summary"
    TRANSLATING = "translating"
    MACHINE = "machine"
    SUSPENDED = "suspended"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class EntiretySet:
    """A validated, non-empty combination of entirety attributes."""

    attributes: frozenset[Entirety]

    def __post_init__(self) -> None:
        attrs = frozenset(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        if not attrs:
            raise IllegalCombination("entirety must carry at least one attribute")
        if Entirety.UNDEFINED in attrs and len(attrs) > 1:
            raise IllegalCombination("'undefined' cannot combine with other attributes")
        if Entirety.COMPLETE in attrs and attrs & {Entirety.PARTIAL, Entirety.SUMMARY}:
            raise IllegalCombination("'complete' contradicts 'partial' and 'summary'")

    @classmethod
    def of(cls, *attrs: Entirety | str) -> "EntiretySet":
        resolved = frozenset(a if isinstance(a, Entirety) else Entirety(a) for a in attrs)
        return cls(resolved)

    def __contains__(self, attr: Entirety) -> bool:
        return attr in self.attributes

    def __iter__(self):
        return iter(sorted(self.attributes, key=lambda a: a.value))

    def __str__(self) -> str:
        return ",".join(a.value for a in self)


SegmentPath = tuple[int, ...]


@dataclass(frozen=True)
class AlignmentGroup:
    """Corresponding segments across versions, one path per language."""

    kind: SegmentKind
    members: tuple[tuple[LanguageTag, SegmentPath], ...]

    def __post_init__(self) -> None:
        codes = [lang.code for lang, _ in self.members]
        if len(set(codes)) != len(codes):
            raise ValueError("a group may hold at most one member per language")
        ordered = tuple(sorted(self.members, key=lambda m: m[0].code))
        object.__setattr__(self, "members", ordered)

    @classmethod
    def of(cls, kind: SegmentKind, members: Mapping[LanguageTag, SegmentPath]) -> "AlignmentGroup":
        return cls(kind=kind, members=tuple((lang, tuple(path)) for lang, path in members.items()))

    @property
    def member_map(self) -> dict[LanguageTag, SegmentPath]:
        return dict(self.members)

    def languages(self) -> list[LanguageTag]:
        return [lang for lang, _ in self.members]


@dataclass(frozen=True)
class ParallelTexts:
    """Aligned linguistic versions plus per-version entirety metadata.

    Instances are immutable; operations that change metadata hand back a
    new value.  ``provenance`` records where the parallel content came
    from (a template, a dossier) and travels into harvested records.
    """

    versions: dict[LanguageTag, SegmentedText]
    groups: tuple[AlignmentGroup, ...]
    granularity: TextGranularity
    entirety: dict[LanguageTag, EntiretySet] = field(default_factory=dict)
    provenance: str | None = None

    def __post_init__(self) -> None:
        for lang, st in self.versions.items():
            if st.language != lang:
                raise ValueError(
                    f"version keyed {lang.code} is a {st.language.code} text"
                )
        for group in self.groups:
            for lang, path in group.members:
                if lang not in self.versions:
                    raise ValueError(f"group member {lang.code} has no version")
                try:
                    self.versions[lang].resolve(path)
                except IndexError:
                    raise ValueError(
                        f"group member path {path} dangles in the {lang.code} version"
                    ) from None

    def group_texts(self, group: AlignmentGroup) -> dict[LanguageTag, str]:
        out: dict[LanguageTag, str] = {}
        for lang, path in group.members:
            st = self.versions[lang]
            out[lang] = st.text_of(st.resolve(path))
        return out


def granularity_meet(a: TextGranularity, b: TextGranularity) -> TextGranularity:
    """The finest granularity no finer than either argument.

    Granularities form the product of two chains: segment kinds ordered
    by fineness, and partial below full.  The meet is componentwise: the
    coarser level, and full coverage only when both sides have it.
    """
    return TextGranularity(
        SegmentKind(min(a.level, b.level)),
        Coverage(min(a.coverage, b.coverage)),
    )


def parallel_granularity(versions: Iterable[SegmentedText]) -> TextGranularity:
    """Meet of the versions' granularities; needs at least one version."""
    result: TextGranularity | None = None
    for st in versions:
        result = st.granularity if result is None else granularity_meet(result, st.granularity)
    if result is None:
        raise ValueError("at least one version is required")
    return result


def align(
    versions: Mapping[LanguageTag, SegmentedText],
    kind: SegmentKind = SegmentKind.SENTENCE,
) -> ParallelTexts:
    """Positionally align versions at ``kind``, coarsening on mismatch.

    When the versions disagree on the number of segments at the requested
    kind, alignment retries one level coarser rather than fabricating
    pairings.  At file level every non-empty version joins a single group
    and empty versions are left out as broken lines.

    Raises :exc:`KindTooFine` when no version reaches the requested kind
    at all, and :exc:`GranularityUnachievable` when there is nothing to
    align even at file level.
    """
    if len(versions) < 2:
        raise ValueError("alignment needs at least two versions")
    for lang, st in versions.items():
        if st.language != lang:
            raise ValueError(f"version keyed {lang.code} is a {st.language.code} text")
    if not any(st.source.strip() for st in versions.values()):
        raise GranularityUnachievable("every version is empty")

    finest_available = max(st.granularity.level for st in versions.values())
    if kind > finest_available:
        raise KindTooFine(
            f"no version is segmented at {kind.label}; finest available is "
            f"{finest_available.label}"
        )

    pg = parallel_granularity(versions.values())
    start = min(kind, pg.level)

    for level_value in range(int(start), -1, -1):
        level = SegmentKind(level_value)
        if level is SegmentKind.FILE:
            non_empty = {
                lang: st for lang, st in versions.items() if st.source.strip()
            }
            if not non_empty:
                raise GranularityUnachievable("every version is empty")
            groups = (
                AlignmentGroup.of(SegmentKind.FILE, {lang: () for lang in non_empty}),
            )
            achieved = SegmentKind.FILE
            break
        paths = {lang: st.paths_of_kind(level) for lang, st in versions.items()}
        counts = {len(p) for p in paths.values()}
        if len(counts) == 1 and counts != {0}:
            groups = tuple(
                AlignmentGroup.of(level, {lang: paths[lang][i] for lang in versions})
                for i in range(counts.pop())
            )
            achieved = level
            break

    coverage = Coverage.FULL
    for st in versions.values():
        if coverage_at(st.source, st.root, achieved) is Coverage.PARTIAL:
            coverage = Coverage.PARTIAL
            break

    return ParallelTexts(
        versions=dict(versions),
        groups=groups,
        granularity=TextGranularity(achieved, coverage),
    )


def set_entirety(
    pt: ParallelTexts, lang: LanguageTag, attrs: EntiretySet | Iterable[Entirety]
) -> ParallelTexts:
    """Record entirety attributes for one version, returning new texts.

    The attributes are validated as a combination; entirety may also be
    recorded for a declared language whose version is absent (suspended
    translations are the usual case).
    """
    if not isinstance(attrs, EntiretySet):
        attrs = EntiretySet(frozenset(attrs))
    entirety = dict(pt.entirety)
    entirety[lang] = attrs
    return replace(pt, entirety=entirety)


# ---------------------------------------------------------------------------
# Multilingual files


def split_multilingual(st: SegmentedText) -> dict[LanguageTag, SegmentedText]:
    """Split a multilingual file into monolingual projections.

    Top-level regions carry language switches; each projection collects
    the regions of one language, in order, joined as paragraphs.  Regions
    labelled ``xx`` (no linguistic content) are copied into every
    projection.  Regions with no switch fall back to the file's language,
    or to ``un`` when the file itself is labelled multilingual.

    Raises :exc:`VeryMixedUnsupported` when switches occur below
    paragraph level; such panache mixing has no clean projection.
    """
    for seg in st.root.walk():
        if seg.lang is not None and seg.kind > SegmentKind.PARAGRAPH:
            raise VeryMixedUnsupported(
                f"language switch on a {seg.kind.label} segment; switches are "
                "supported down to paragraph level only"
            )

    if st.language.kind is TagKind.MULTILINGUAL:
        default = LanguageTag("un")
    else:
        default = st.language

    regions: list[tuple[LanguageTag, Segment]] = []
    if st.root.children:
        for child in st.root.children:
            regions.append((child.lang or default, child))
    elif st.source:
        regions.append((default, st.root))

    real_langs: list[LanguageTag] = []
    for lang, _ in regions:
        if lang.kind is not TagKind.NO_LINGUISTIC_CONTENT and lang not in real_langs:
            real_langs.append(lang)
    if not real_langs:
        real_langs = [LanguageTag("un")] if regions else []

    projections: dict[LanguageTag, SegmentedText] = {}
    for lang in real_langs:
        selected = [
            region
            for region_lang, region in regions
            if region_lang == lang or region_lang.kind is TagKind.NO_LINGUISTIC_CONTENT
        ]
        projections[lang] = _project(st, lang, selected)
    return projections


def _project(st: SegmentedText, lang: LanguageTag, regions: Sequence[Segment]) -> SegmentedText:
    texts = [st.text_of(region) for region in regions]
    source = "\n\n".join(texts)

    new_children: list[Segment] = []
    byte_pos = 0
    sep_bytes = len("\n\n".encode("utf-8"))
    for i, region in enumerate(regions):
        shift = byte_pos - region.start
        shifted = _shift(region, shift)
        # Projection regions lose their switch if it matches the
        # projection language; xx regions keep their label.
        if shifted.lang == lang:
            shifted = replace(shifted, lang=None)
        if shifted.kind is SegmentKind.FILE:
            # A childless multilingual root projected whole: re-kind the
            # region as a paragraph so the projection root stays a file.
            shifted = replace(shifted, kind=SegmentKind.PARAGRAPH)
        new_children.append(shifted)
        byte_pos += len(texts[i].encode("utf-8"))
        if i + 1 < len(regions):
            byte_pos += sep_bytes

    root = Segment(
        kind=SegmentKind.FILE,
        start=0,
        end=len(source.encode("utf-8")),
        children=tuple(new_children),
    )
    return SegmentedText(
        language=lang,
        source=source,
        root=root,
        granularity=compute_granularity_raw(source, root),
    )


def _shift(seg: Segment, delta: int) -> Segment:
    return replace(
        seg,
        start=seg.start + delta,
        end=seg.end + delta,
        children=tuple(_shift(c, delta) for c in seg.children),
    )


@dataclass(frozen=True)
class ConsistencyDiagnostic:
    """One disagreement between aligned content and a projection."""

    kind: str  # "mismatch" | "uncovered"
    group_index: int
    language: LanguageTag
    message: str


def check_multilingual_consistency(
    pt: ParallelTexts, projection: SegmentedText, lang: LanguageTag
) -> list[ConsistencyDiagnostic]:
    """Compare one language's aligned segments against a projection.

    Texts are compared after whitespace normalization, positionally:
    the i-th group holding ``lang`` against the i-th projection segment
    of the group's kind.  Groups with no counterpart in the projection
    are reported as uncovered.
    """
    if lang not in pt.versions:
        raise ValueError(f"parallel texts hold no version for {lang.code}")
    version = pt.versions[lang]

    position = 0
    diagnostics: list[ConsistencyDiagnostic] = []
    proj_cache: dict[SegmentKind, list[Segment]] = {}
    for g_idx, group in enumerate(pt.groups):
        member = group.member_map.get(lang)
        if member is None:
            continue
        expected = collapse_ws(version.text_of(version.resolve(member)))
        candidates = proj_cache.setdefault(group.kind, projection.segments_of_kind(group.kind))
        if position >= len(candidates):
            diagnostics.append(
                ConsistencyDiagnostic(
                    kind="uncovered",
                    group_index=g_idx,
                    language=lang,
                    message=f"group {g_idx} has no counterpart in the projection",
                )
            )
            position += 1
            continue
        actual = collapse_ws(projection.text_of(candidates[position]))
        if expected != actual:
            diagnostics.append(
                ConsistencyDiagnostic(
                    kind="mismatch",
                    group_index=g_idx,
                    language=lang,
                    message=(
                        f"group {g_idx} differs from the projection: "
                        f"{expected[:40]!r} vs {actual[:40]!r}"
                    ),
                )
            )
        position += 1
    return diagnostics
