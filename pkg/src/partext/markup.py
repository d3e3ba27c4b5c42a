"""Loaders that turn marked documents into segmented texts.

Three input shapes are supported:

* the native XML dialect, where segment structure, language switches and
  record identifiers are explicit markup;
* an HTML subset, where block elements map to paragraphs and the rest is
  plain string analysis;
* RTF, stripped best-effort to plain text before segmentation.

In every case the markup itself is consumed: the resulting segmented text
is over the extracted character data, and its spans point into that.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from html.parser import HTMLParser

from .langtags import LanguageTag, parse_tag
from .segcore import (
    DEFAULT_POLICY,
    Segment,
    SegmentationPolicy,
    SegmentKind,
    SegmentedText,
    compute_granularity_raw,
    segment_text,
)

__all__ = [
    "MalformedMarkup",
    "segment_marked",
    "segment_html",
    "strip_rtf",
    "emit_marked_xml",
]


class MalformedMarkup(ValueError):
    """The document is not well-formed or violates the dialect."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


_ELEMENT_KINDS = {
    "text": SegmentKind.FILE,
    "p": SegmentKind.PARAGRAPH,
    "s": SegmentKind.SENTENCE,
    "sub": SegmentKind.SUB_SENTENCE,
}
_KIND_ELEMENTS = {v: k for k, v in _ELEMENT_KINDS.items()}


def segment_marked(document: str) -> SegmentedText:
    """Parse the XML segmentation dialect into a segmented text.

    The root element is ``<text>`` with optional ``lang`` and ``base``
    attributes; ``<p>``, ``<s>`` and ``<sub>`` nest in order of fineness
    (levels may be skipped).  Any element may carry ``lang`` to switch the
    processing language for its region, and ``rid`` to attach a record
    identifier, resolved against the root ``base`` into a record URI.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedMarkup(f"not well-formed: {exc.msg.split(':')[0]}", line, column) from exc
    if root.tag != "text":
        raise MalformedMarkup(f"root element must be <text>, got <{root.tag}>")

    base = root.get("base")
    lang_attr = root.get("lang")
    language = parse_tag(lang_attr) if lang_attr else LanguageTag("un")

    parts: list[str] = []
    pos = 0

    def emit(text: str | None) -> None:
        nonlocal pos
        if text:
            parts.append(text)
            pos += len(text)

    def walk(elem: ET.Element, parent_kind: SegmentKind) -> list[tuple]:
        """Collect (kind, start, end, children, uri, lang) for elem's children."""
        collected: list[tuple] = []
        emit(elem.text)
        for child in elem:
            kind = _ELEMENT_KINDS.get(child.tag)
            if kind is None or kind is SegmentKind.FILE:
                raise MalformedMarkup(f"unexpected element <{child.tag}>")
            if kind <= parent_kind:
                raise MalformedMarkup(
                    f"<{child.tag}> cannot nest inside <{_KIND_ELEMENTS[parent_kind]}>"
                )
            start = pos
            grandchildren = walk(child, kind)
            end = pos
            rid = child.get("rid")
            uri = None
            if rid:
                uri = f"{base}/{rid}" if base else rid
            switch = child.get("lang")
            collected.append(
                (kind, start, end, grandchildren, uri, parse_tag(switch) if switch else None)
            )
            emit(child.tail)
        return collected

    collected = walk(root, SegmentKind.FILE)
    source = "".join(parts)

    # Offsets so far are character positions; convert while building.
    boundaries = [0]
    total = 0
    for ch in source:
        total += len(ch.encode("utf-8"))
        boundaries.append(total)

    def build(entry: tuple) -> Segment:
        kind, start, end, children, uri, switch = entry
        return Segment(
            kind=kind,
            start=boundaries[start],
            end=boundaries[end],
            children=tuple(build(c) for c in children),
            record_uri=uri,
            lang=switch,
        )

    root_seg = Segment(
        kind=SegmentKind.FILE,
        start=0,
        end=boundaries[len(source)],
        children=tuple(build(c) for c in collected),
    )
    return SegmentedText(
        language=language,
        source=source,
        root=root_seg,
        granularity=compute_granularity_raw(source, root_seg),
    )


def emit_marked_xml(st: SegmentedText, base: str | None = None) -> str:
    """Serialize a segmented text back into the XML dialect.

    Record URIs under ``base`` are shortened to relative ``rid`` values;
    other URIs are kept whole.
    """
    root = ET.Element("text", attrib={"lang": st.language.code})
    if base:
        root.set("base", base)
    data = st.encoded

    def fill(elem: ET.Element, seg: Segment) -> None:
        pos = seg.start
        last_child: ET.Element | None = None
        for child in seg.children:
            residue = data[pos:child.start].decode("utf-8")
            if last_child is None:
                elem.text = (elem.text or "") + residue
            else:
                last_child.tail = (last_child.tail or "") + residue
            node = ET.SubElement(elem, _KIND_ELEMENTS[child.kind])
            if child.record_uri:
                rid = child.record_uri
                if base and rid.startswith(base + "/"):
                    rid = rid[len(base) + 1 :]
                node.set("rid", rid)
            if child.lang is not None:
                node.set("lang", child.lang.code)
            fill(node, child)
            last_child = node
            pos = child.end
        tail = data[pos:seg.end].decode("utf-8")
        if last_child is None:
            elem.text = (elem.text or "") + tail
        else:
            last_child.tail = (last_child.tail or "") + tail

    fill(root, st.root)
    return ET.tostring(root, encoding="unicode")


# ---------------------------------------------------------------------------
# HTML subset

_BLOCK_TAGS = {
    "p", "div", "section", "article", "h1", "h2", "h3", "h4", "h5", "h6",
    "li", "blockquote", "pre", "td", "th", "figcaption", "dt", "dd",
}
_SKIP_TAGS = {"script", "style", "head", "template"}


class _BlockExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[str] = []
        self._current: list[str] = []
        self._skip_depth = 0

    def _flush(self) -> None:
        text = " ".join("".join(self._current).split())
        if text:
            self.blocks.append(text)
        self._current = []

    def handle_starttag(self, tag: str, attrs) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS or tag == "br":
            self._flush()

    def handle_endtag(self, tag: str) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag in _BLOCK_TAGS:
            self._flush()

    def handle_data(self, data: str) -> None:
        if not self._skip_depth:
            self._current.append(data)

    def close(self) -> None:
        super().close()
        self._flush()


def segment_html(
    document: str,
    language: LanguageTag,
    policy: SegmentationPolicy = DEFAULT_POLICY,
    target: SegmentKind = SegmentKind.SENTENCE,
) -> SegmentedText:
    """Extract text from an HTML subset and segment it.

    Block elements delimit paragraphs; whitespace inside a block is
    collapsed.  Everything else (sentence and sub-sentence discovery)
    is ordinary string analysis on the extracted text.
    """
    extractor = _BlockExtractor()
    extractor.feed(document)
    extractor.close()
    plain = "\n\n".join(extractor.blocks)
    return segment_text(plain, language, policy, target)


# ---------------------------------------------------------------------------
# RTF, best effort

_RTF_DESTINATIONS = re.compile(
    r"\{(?:\\\*)?\\(?:fonttbl|colortbl|stylesheet|info|pict|themedata"
    r"|header[lrf]?|footer[lrf]?)[^{}]*(?:\{[^{}]*\}[^{}]*)*\}"
)
_RTF_NEWLINE = re.compile(r"\\(?:par|line|sect|page)\b\s?")
_RTF_HEX = re.compile(r"\\'([0-9a-fA-F]{2})")
_RTF_UNICODE = re.compile(r"\\u(-?\d+)\s?\??")
_RTF_CONTROL = re.compile(r"\\[a-zA-Z]+-?\d* ?")
_RTF_ESCAPED = {"\\{": "{", "\\}": "}", "\\\\": "\\", "\\~": "\u00a0"}


def strip_rtf(document: str) -> str:
    """Reduce an RTF document to plain text, best effort.

    Destination groups that hold no running text are dropped, paragraph
    controls become blank lines, escapes are decoded, and remaining
    control words and braces are removed.  Good enough to feed the plain
    text segmenter; not a full RTF reader.
    """
    text = _RTF_DESTINATIONS.sub("", document)
    text = _RTF_NEWLINE.sub("\n\n", text)
    text = _RTF_UNICODE.sub(lambda m: chr(int(m.group(1)) % 0x10000), text)
    text = _RTF_HEX.sub(lambda m: bytes([int(m.group(1), 16)]).decode("latin-1"), text)
    for escaped, plain in _RTF_ESCAPED.items():
        text = text.replace(escaped, plain)
    text = _RTF_CONTROL.sub("", text)
    text = text.replace("{", "").replace("}", "")
    lines: list[str] = []
    for line in (l.strip() for l in text.split("\n")):
        if line:
            lines.append(line)
        elif lines and lines[-1] != "":
            lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def segment_rtf(
    document: str,
    language: LanguageTag,
    policy: SegmentationPolicy = DEFAULT_POLICY,
    target: SegmentKind = SegmentKind.SENTENCE,
) -> SegmentedText:
    """Strip RTF markup and segment the remaining plain text."""
    return segment_text(strip_rtf(document), language, policy, target)
