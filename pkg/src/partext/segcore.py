"""Segmentation of plain text into a lossless tree of spans.

A segmented text never copies or rewrites its source: segments are byte
spans into the UTF-8 form of the original string, arranged in a tree whose
kinds go from coarse to fine (file, paragraph, sentence, sub-sentence).
Whatever the segmenter does not claim stays in place as residue, so the
source is always reconstructible byte for byte.

Segmentation is plain string analysis.  Paragraphs end at blank lines,
sentences end at an indicator character followed by whitespace and an
upper-case letter or digit (or end of text), sub-sentences are delimited
by a reserved separator character.  No abbreviation lists, no trained
models: when the cues are absent the text simply stays coarser, and the
computed granularity reports that honestly.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Iterator, Sequence

from .langtags import LanguageTag, TagKind

__all__ = [
    "SegmentKind",
    "Coverage",
    "Origin",
    "Segment",
    "SegmentedText",
    "TextGranularity",
    "SegmentationPolicy",
    "SplitSegment",
    "MergeWithNext",
    "MoveBoundary",
    "SeparatorCollision",
    "InvalidEdit",
    "segment_text",
    "compute_granularity",
    "coverage_at",
    "reconstruct",
    "apply_manual_edit",
    "collapse_ws",
    "assemble_pieces",
]


class SeparatorCollision(ValueError):
    """The reserved separator character occurs as ordinary content."""


class InvalidEdit(ValueError):
    """A manual edit does not apply to the tree it was aimed at."""


class SegmentKind(enum.IntEnum):
    """Segment kinds from coarsest to finest.

    Comparison follows fineness: ``SENTENCE > PARAGRAPH`` means sentences
    are finer.  Levels may be skipped in a tree (a file of verse might go
    straight from file to sub-sentence), but a child is always strictly
    finer than its parent.
    """

    FILE = 0
    PARAGRAPH = 1
    SENTENCE = 2
    SUB_SENTENCE = 3

    @property
    def label(self) -> str:
        return _KIND_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "SegmentKind":
        try:
            return _LABEL_KINDS[label]
        except KeyError:
            raise ValueError(f"unknown segment kind {label!r}") from None


_KIND_LABELS = {
    SegmentKind.FILE: "file",
    SegmentKind.PARAGRAPH: "paragraph",
    SegmentKind.SENTENCE: "sentence",
    SegmentKind.SUB_SENTENCE: "sub-sentence",
}
_LABEL_KINDS = {v: k for k, v in _KIND_LABELS.items()}


class Coverage(enum.IntEnum):
    """Whether segmentation at the reported level covers all content."""

    PARTIAL = 0
    FULL = 1

    @property
    def label(self) -> str:
        return "partial" if self is Coverage.PARTIAL else "full"

    @classmethod
    def from_label(cls, label: str) -> "Coverage":
        if label == "full":
            return Coverage.FULL
        if label == "partial":
            return Coverage.PARTIAL
        raise ValueError(f"unknown coverage {label!r}")


class Origin(enum.Enum):
    PROGRAMMATIC = "programmatic"
    MANUAL = "manual"


@dataclass(frozen=True)
class TextGranularity:
    """Finest segmentation level present, and whether it covers everything."""

    level: SegmentKind
    coverage: Coverage

    def key(self) -> tuple[int, int]:
        return (int(self.level), int(self.coverage))

    def __str__(self) -> str:
        return f"({self.level.label}, {self.coverage.label})"


@dataclass(frozen=True)
class Segment:
    """One node of a segmentation tree.

    ``start`` and ``end`` are byte offsets into the UTF-8 encoding of the
    source, half open.  ``record_uri`` links the span to a linguistic
    record when the text came from one.  ``lang`` marks a processing
    language switch in effect for this subtree; ``None`` inherits.
    """

    kind: SegmentKind
    start: int
    end: int
    children: tuple["Segment", ...] = ()
    record_uri: str | None = None
    origin: Origin = Origin.PROGRAMMATIC
    lang: LanguageTag | None = None

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"bad span [{self.start}, {self.end})")
        prev_end = self.start
        for child in self.children:
            if child.kind <= self.kind:
                raise ValueError(
                    f"child kind {child.kind.label} is not finer than {self.kind.label}"
                )
            if child.start < prev_end or child.end > self.end:
                raise ValueError("children must be ordered, disjoint and contained")
            prev_end = child.end

    def walk(self) -> Iterator["Segment"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> Iterator["Segment"]:
        if not self.children:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()


@dataclass(frozen=True)
class SegmentedText:
    """A source string together with its lossless segmentation tree."""

    language: LanguageTag
    source: str
    root: Segment
    granularity: TextGranularity

    def __post_init__(self) -> None:
        nbytes = len(self.source.encode("utf-8"))
        if self.root.kind is not SegmentKind.FILE:
            raise ValueError("root segment must be of kind file")
        if self.root.start != 0 or self.root.end != nbytes:
            raise ValueError("root segment must span the whole source")

    @cached_property
    def encoded(self) -> bytes:
        return self.source.encode("utf-8")

    def text_of(self, segment: Segment) -> str:
        return self.encoded[segment.start : segment.end].decode("utf-8")

    def resolve(self, path: Sequence[int]) -> Segment:
        """Return the segment at a path of child indices from the root."""
        node = self.root
        for index in path:
            node = node.children[index]
        return node

    def segments_of_kind(self, kind: SegmentKind) -> list[Segment]:
        return [seg for seg in self.root.walk() if seg.kind is kind]

    def paths_of_kind(self, kind: SegmentKind) -> list[tuple[int, ...]]:
        found: list[tuple[int, ...]] = []

        def visit(node: Segment, path: tuple[int, ...]) -> None:
            if node.kind is kind:
                found.append(path)
            for i, child in enumerate(node.children):
                visit(child, path + (i,))

        visit(self.root, ())
        return found

    def leaf_paths(self) -> list[tuple[int, ...]]:
        found: list[tuple[int, ...]] = []

        def visit(node: Segment, path: tuple[int, ...]) -> None:
            if not node.children:
                found.append(path)
            else:
                for i, child in enumerate(node.children):
                    visit(child, path + (i,))

        visit(self.root, ())
        return found


@dataclass(frozen=True)
class SegmentationPolicy:
    """Tunable surface cues used by the segmenter.

    ``paragraph_indicator`` is a regular expression matching a paragraph
    boundary (a blank line by default).  ``sentence_indicators`` are the
    characters that may end a sentence.  ``separator`` is the reserved
    sub-sentence delimiter; it must not occur as ordinary content.
    """

    paragraph_indicator: str = r"(?:\r?\n)(?:[ \t]*\r?\n)+"
    sentence_indicators: frozenset[str] = frozenset({".", ";", "!", "?"})
    separator: str = "\x1e"

    def __post_init__(self) -> None:
        if len(self.separator) != 1:
            raise ValueError("separator must be a single character")
        for ch in self.sentence_indicators:
            if len(ch) != 1:
                raise ValueError("sentence indicators must be single characters")


DEFAULT_POLICY = SegmentationPolicy()


def collapse_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends.

    This is the normalization used whenever two pieces of text are
    compared for linguistic identity (table lookups, consistency checks):
    layout differences are not meaning differences.
    """
    return " ".join(text.split())


def _byte_offsets(text: str) -> list[int]:
    """Cumulative UTF-8 byte offset per character position (len+1 entries)."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _is_content_char(ch: str) -> bool:
    # Whitespace and control/format characters are residue by definition;
    # everything else counts as content that segmentation should cover.
    return not ch.isspace() and not unicodedata.category(ch).startswith("C")


def _char_boundaries(data: bytes) -> set[int]:
    bounds = {0, len(data)}
    for i, b in enumerate(data):
        if not 0x80 <= b < 0xC0:  # not a UTF-8 continuation byte
            bounds.add(i)
    return bounds


def _sentence_spans(text: str, start: int, end: int, indicators: frozenset[str]) -> list[tuple[int, int]]:
    """Char spans of sentences inside text[start:end], residue excluded.

    A sentence runs from the first non-space character after the previous
    boundary up to and including an indicator character, provided that
    indicator is followed by whitespace and then an upper-case letter or a
    digit, or by nothing but whitespace until the end of the region.
    Material after the last complete sentence is left unclaimed.
    """
    spans: list[tuple[int, int]] = []
    sent_start = start
    while sent_start < end and text[sent_start].isspace():
        sent_start += 1
    i = sent_start
    while i < end:
        if text[i] in indicators:
            j = i + 1
            while j < end and text[j].isspace():
                j += 1
            if j == end:
                spans.append((sent_start, i + 1))
                sent_start = end
                i = end
                continue
            if j > i + 1 and (text[j].isupper() or text[j].isdigit()):
                spans.append((sent_start, i + 1))
                sent_start = j
                i = j
                continue
        i += 1
    return spans


def _subsentence_spans(text: str, start: int, end: int, separator: str) -> list[tuple[int, int]]:
    """Char spans between separator occurrences; separators are residue."""
    positions = [i for i in range(start, end) if text[i] == separator]
    if not positions:
        return []
    spans: list[tuple[int, int]] = []
    prev = start
    for pos in positions + [end]:
        if pos > prev:
            spans.append((prev, pos))
        prev = pos + 1
    return spans


def segment_text(
    text: str,
    language: LanguageTag,
    policy: SegmentationPolicy = DEFAULT_POLICY,
    target: SegmentKind = SegmentKind.SENTENCE,
) -> SegmentedText:
    """Segment plain text down to ``target`` kind by string analysis.

    Content labelled ``xx`` has nothing linguistic to segment and comes
    back as a bare file segment whatever the target.  Multilingual (``mm``)
    input must be split into monolingual projections first; passing it
    here is a precondition violation.

    Raises :exc:`SeparatorCollision` when the reserved separator character
    occurs in the text but ``target`` is coarser than sub-sentence: the
    character cannot be both content and delimiter.
    """
    if language.kind is TagKind.MULTILINGUAL:
        raise ValueError("multilingual text must be split before segmentation")

    offsets = _byte_offsets(text)

    def seg(kind: SegmentKind, a: int, b: int, children: tuple[Segment, ...] = ()) -> Segment:
        return Segment(kind=kind, start=offsets[a], end=offsets[b], children=children)

    if language.kind is TagKind.NO_LINGUISTIC_CONTENT or target is SegmentKind.FILE:
        root = seg(SegmentKind.FILE, 0, len(text))
        return SegmentedText(language, text, root, compute_granularity_raw(text, root, policy))

    if target < SegmentKind.SUB_SENTENCE and policy.separator in text:
        pos = text.index(policy.separator)
        raise SeparatorCollision(
            f"separator U+{ord(policy.separator):04X} occurs at character {pos} "
            f"but the target kind is {target.label}"
        )

    paragraphs: list[Segment] = []
    boundary = re.compile(policy.paragraph_indicator)
    chunk_start = 0
    chunks: list[tuple[int, int]] = []
    for m in boundary.finditer(text):
        if m.start() > chunk_start:
            chunks.append((chunk_start, m.start()))
        chunk_start = m.end()
    if chunk_start < len(text):
        chunks.append((chunk_start, len(text)))

    for a, b in chunks:
        if not text[a:b].strip():
            continue
        sentences: list[Segment] = []
        if target >= SegmentKind.SENTENCE:
            for sa, sb in _sentence_spans(text, a, b, policy.sentence_indicators):
                subs: tuple[Segment, ...] = ()
                if target is SegmentKind.SUB_SENTENCE:
                    subs = tuple(
                        seg(SegmentKind.SUB_SENTENCE, xa, xb)
                        for xa, xb in _subsentence_spans(text, sa, sb, policy.separator)
                    )
                sentences.append(seg(SegmentKind.SENTENCE, sa, sb, subs))
        if not sentences and target is SegmentKind.SUB_SENTENCE:
            # No sentence cues; separators may still structure the chunk.
            subs_here = _subsentence_spans(text, a, b, policy.separator)
            if subs_here:
                paragraphs.append(
                    seg(
                        SegmentKind.PARAGRAPH,
                        a,
                        b,
                        tuple(seg(SegmentKind.SUB_SENTENCE, xa, xb) for xa, xb in subs_here),
                    )
                )
                continue
        paragraphs.append(seg(SegmentKind.PARAGRAPH, a, b, tuple(sentences)))

    root = seg(SegmentKind.FILE, 0, len(text), tuple(paragraphs))
    return SegmentedText(language, text, root, compute_granularity_raw(text, root, policy))


def compute_granularity(st: SegmentedText, policy: SegmentationPolicy = DEFAULT_POLICY) -> TextGranularity:
    """Granularity of a segmented text, derived from the tree alone."""
    return compute_granularity_raw(st.source, st.root, policy)


def compute_granularity_raw(
    source: str, root: Segment, policy: SegmentationPolicy = DEFAULT_POLICY
) -> TextGranularity:
    """Finest kind present in the tree, with coverage at that kind.

    Coverage is full when every content character of the source (not
    whitespace, not control or format characters) lies inside some segment
    of the reported kind or finer.
    """
    level = max((seg.kind for seg in root.walk()), default=SegmentKind.FILE)
    return TextGranularity(level, coverage_at(source, root, level))


def coverage_at(source: str, root: Segment, kind: SegmentKind) -> Coverage:
    """Coverage of the source's content by segments of ``kind`` or finer."""
    if kind is SegmentKind.FILE:
        return Coverage.FULL
    spans = sorted((seg.start, seg.end) for seg in root.walk() if seg.kind >= kind)
    merged: list[tuple[int, int]] = []
    for a, b in spans:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))

    byte_pos = 0
    span_idx = 0
    for ch in source:
        width = len(ch.encode("utf-8"))
        if _is_content_char(ch):
            while span_idx < len(merged) and merged[span_idx][1] <= byte_pos:
                span_idx += 1
            covered = (
                span_idx < len(merged)
                and merged[span_idx][0] <= byte_pos
                and byte_pos + width <= merged[span_idx][1]
            )
            if not covered:
                return Coverage.PARTIAL
        byte_pos += width
    return Coverage.FULL


def reconstruct(st: SegmentedText) -> str:
    """Reassemble the source from leaf spans and the residue between them.

    Segmentation is lossless by construction; this walks the tree and the
    gaps explicitly so tests can confirm the invariant without trusting
    ``st.source``.
    """
    data = st.encoded
    pieces: list[bytes] = []
    pos = 0
    for leaf in st.root.leaves():
        pieces.append(data[pos : leaf.start])
        pieces.append(data[leaf.start : leaf.end])
        pos = leaf.end
    pieces.append(data[pos:])
    return b"".join(pieces).decode("utf-8")


# ---------------------------------------------------------------------------
# Manual edits


@dataclass(frozen=True)
class SplitSegment:
    """Split the segment at ``path`` in two at byte offset ``offset``."""

    path: tuple[int, ...]
    offset: int


@dataclass(frozen=True)
class MergeWithNext:
    """Merge the segment at ``path`` with its next sibling of the same kind."""

    path: tuple[int, ...]


@dataclass(frozen=True)
class MoveBoundary:
    """Move the boundary between ``path`` and its next sibling to ``offset``."""

    path: tuple[int, ...]
    offset: int


ManualEdit = SplitSegment | MergeWithNext | MoveBoundary


def _resolve_parent(root: Segment, path: tuple[int, ...]) -> tuple[Segment, int]:
    if not path:
        raise InvalidEdit("the root file segment cannot be edited")
    node = root
    for index in path[:-1]:
        if index >= len(node.children):
            raise InvalidEdit(f"no segment at path {path}")
        node = node.children[index]
    if path[-1] >= len(node.children):
        raise InvalidEdit(f"no segment at path {path}")
    return node, path[-1]


def _rebuild(root: Segment, path: tuple[int, ...], new_children_at: Callable[[Segment], tuple[Segment, ...]]) -> Segment:
    """Replace the children of the parent of ``path`` using a callback."""
    if len(path) == 1:
        return replace(root, children=new_children_at(root))
    head = path[0]
    rebuilt_child = _rebuild(root.children[head], path[1:], new_children_at)
    children = root.children[:head] + (rebuilt_child,) + root.children[head + 1 :]
    return replace(root, children=children)


def apply_manual_edit(st: SegmentedText, edit: ManualEdit) -> SegmentedText:
    """Apply one manual correction, returning a new segmented text.

    Segments touched by the edit are marked with manual origin so later
    automated passes know not to discard them.  ``SplitSegment`` followed
    by ``MergeWithNext`` at the same place restores the original tree
    shape (the merged segment keeps its manual origin as evidence of the
    round trip).
    """
    parent, idx = _resolve_parent(st.root, edit.path)
    target = parent.children[idx]
    bounds = _char_boundaries(st.encoded)

    if isinstance(edit, SplitSegment):
        k = edit.offset
        if not (target.start < k < target.end):
            raise InvalidEdit(
                f"split offset {k} is outside segment [{target.start}, {target.end})"
            )
        if k not in bounds:
            raise InvalidEdit(f"split offset {k} is not on a character boundary")
        for child in target.children:
            if child.start < k < child.end:
                raise InvalidEdit(f"a child segment [{child.start}, {child.end}) straddles offset {k}")
        left_children = tuple(c for c in target.children if c.end <= k)
        right_children = tuple(c for c in target.children if c.start >= k)
        left = replace(target, end=k, children=left_children, origin=Origin.MANUAL)
        right = replace(
            target, start=k, children=right_children, origin=Origin.MANUAL, record_uri=None
        )

        def split_children(p: Segment) -> tuple[Segment, ...]:
            return p.children[:idx] + (left, right) + p.children[idx + 1 :]

        new_root = _rebuild(st.root, edit.path, split_children)

    elif isinstance(edit, MergeWithNext):
        if idx + 1 >= len(parent.children):
            raise InvalidEdit("no next sibling to merge with")
        sibling = parent.children[idx + 1]
        if sibling.kind is not target.kind:
            raise InvalidEdit(
                f"cannot merge {target.kind.label} with {sibling.kind.label}"
            )
        merged = replace(
            target,
            end=sibling.end,
            children=target.children + sibling.children,
            origin=Origin.MANUAL,
        )

        def merge_children(p: Segment) -> tuple[Segment, ...]:
            return p.children[:idx] + (merged,) + p.children[idx + 2 :]

        new_root = _rebuild(st.root, edit.path, merge_children)

    elif isinstance(edit, MoveBoundary):
        if idx + 1 >= len(parent.children):
            raise InvalidEdit("no next sibling; the boundary to move does not exist")
        sibling = parent.children[idx + 1]
        k = edit.offset
        if not (target.start < k < sibling.end):
            raise InvalidEdit(
                f"boundary offset {k} must fall inside ({target.start}, {sibling.end})"
            )
        if k not in bounds:
            raise InvalidEdit(f"boundary offset {k} is not on a character boundary")
        for child in target.children:
            if child.end > k:
                raise InvalidEdit("a child of the left segment would cross the new boundary")
        for child in sibling.children:
            if child.start < k:
                raise InvalidEdit("a child of the right segment would cross the new boundary")
        left = replace(target, end=k, origin=Origin.MANUAL)
        right = replace(sibling, start=k, origin=Origin.MANUAL)

        def move_children(p: Segment) -> tuple[Segment, ...]:
            return p.children[:idx] + (left, right) + p.children[idx + 2 :]

        new_root = _rebuild(st.root, edit.path, move_children)

    else:  # pragma: no cover - exhaustive over the edit union
        raise InvalidEdit(f"unknown edit {edit!r}")

    return SegmentedText(
        language=st.language,
        source=st.source,
        root=new_root,
        granularity=compute_granularity_raw(st.source, new_root),
    )


# ---------------------------------------------------------------------------
# Assembly of segmented texts from generated or parsed pieces


@dataclass(frozen=True)
class Piece:
    """A building block for :func:`assemble_pieces`.

    Literal pieces contribute plain text; marked pieces become sentence
    segments carrying a record URI.  Blank lines inside literal pieces
    open a new paragraph, exactly as plain-text segmentation would see
    them, so a document assembled here and re-parsed from its serialized
    form produces the same tree.
    """

    text: str
    record_uri: str | None = None
    marked: bool = False


_BLANK_LINE = re.compile(DEFAULT_POLICY.paragraph_indicator)


def assemble_pieces(
    pieces: Sequence[Piece], language: LanguageTag
) -> tuple[SegmentedText, list[tuple[int, ...]]]:
    """Build a segmented text from literal and marked pieces.

    Returns the text and, for each marked piece in order, the path of the
    sentence segment it became.
    """
    source_parts: list[str] = []
    pos = 0  # char position in the assembled source

    @dataclass
    class _Para:
        first_content: int | None = None
        last_content: int | None = None
        sentences: list[tuple[int, int, str | None]] = field(default_factory=list)

    paragraphs: list[_Para] = [_Para()]
    marked_order: list[tuple[int, int]] = []  # (paragraph index, sentence index)

    def note_content(a: int, b: int, text: str) -> None:
        para = paragraphs[-1]
        for i, ch in enumerate(text):
            if _is_content_char(ch):
                cpos = a + i
                if para.first_content is None:
                    para.first_content = cpos
                para.last_content = cpos

    for piece in pieces:
        if piece.marked:
            a, b = pos, pos + len(piece.text)
            para = paragraphs[-1]
            para.sentences.append((a, b, piece.record_uri))
            note_content(a, b, piece.text)
            marked_order.append((len(paragraphs) - 1, len(para.sentences) - 1))
            source_parts.append(piece.text)
            pos = b
        else:
            text = piece.text
            cursor = 0
            for m in _BLANK_LINE.finditer(text):
                before = text[cursor : m.start()]
                note_content(pos + cursor, pos + m.start(), before)
                paragraphs.append(_Para())
                cursor = m.end()
            note_content(pos + cursor, pos + len(text), text[cursor:])
            source_parts.append(text)
            pos += len(text)

    source = "".join(source_parts)
    offsets = _byte_offsets(source)

    para_segments: list[Segment] = []
    seg_paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for p_idx, para in enumerate(paragraphs):
        if para.first_content is None and not para.sentences:
            continue
        anchors: list[int] = []
        if para.first_content is not None:
            anchors.extend((para.first_content, para.last_content + 1))
        if para.sentences:
            anchors.extend((para.sentences[0][0], para.sentences[-1][1]))
        start, end = min(anchors), max(anchors)
        children = []
        for s_idx, (a, b, uri) in enumerate(para.sentences):
            children.append(
                Segment(SegmentKind.SENTENCE, offsets[a], offsets[b], record_uri=uri)
            )
            seg_paths[(p_idx, s_idx)] = (len(para_segments), s_idx)
        para_segments.append(
            Segment(
                SegmentKind.PARAGRAPH,
                offsets[start],
                offsets[end],
                children=tuple(children),
            )
        )

    root = Segment(SegmentKind.FILE, 0, offsets[len(source)], children=tuple(para_segments))
    st = SegmentedText(
        language=language,
        source=source,
        root=root,
        granularity=compute_granularity_raw(source, root),
    )
    return st, [seg_paths[key] for key in marked_order]
