"""Shared fixtures-in-code for the test suite.

Random content generators plus independent oracle implementations.  The
oracles deliberately avoid calling into the package: a full-matrix edit
distance, a poset meet by enumeration, and plain-python scans stand in
for the engine's indexed and incremental versions.
"""

from __future__ import annotations

import random

from partext import LinguisticTable, parse_tag
from partext.langtags import LanguageTag

EN = parse_tag("en")
ES = parse_tag("es")
FR = parse_tag("fr")
DE = parse_tag("de")
NL = parse_tag("nl")

# -- random text ------------------------------------------------------------

_WORD_POOLS = (
    ("alpha", "beta", "gamma", "delta", "words", "about", "things", "mundo"),
    ("café", "jalapeño", "über", "señor", "œuvre", "garçon", "naïve"),
    ("λόγος", "γραφή", "θάλασσα", "ἀρχή"),
    ("слово", "текст", "перевод", "язык"),
    ("翻訳", "言語", "世界", "文書", "你好"),
    ("مرحبا", "لغة", "نص"),
    ("🌍", "✓", "—x—", "№5", "«quoted»"),
)

_TERMINATORS = (". ", "! ", "? ", "; ", ".\n", ". ")
_SPACES = (" ", " ", " ", "  ", "\t", "  ")


def random_word(rng: random.Random) -> str:
    pool = rng.choice(_WORD_POOLS)
    return rng.choice(pool)


def random_sentence(rng: random.Random, capitalized: bool = True) -> str:
    words = [random_word(rng) for _ in range(rng.randint(1, 9))]
    if capitalized:
        words[0] = "X" + words[0]
    body = ""
    for i, word in enumerate(words):
        if i:
            body += rng.choice(_SPACES)
        body += word
    return body + rng.choice(_TERMINATORS).rstrip("\n")


def random_paragraph(rng: random.Random) -> str:
    return " ".join(random_sentence(rng) for _ in range(rng.randint(1, 5)))


def random_text(rng: random.Random, max_bytes: int = 10_000) -> str:
    """Paragraph-structured text of mixed scripts, at most ``max_bytes``."""
    budget = rng.randint(0, max_bytes)
    parts: list[str] = []
    size = 0
    while size < budget:
        para = random_paragraph(rng)
        glue = rng.choice(("\n\n", "\n\n\n", "\n \n", "\r\n\r\n"))
        chunk = (glue if parts else "") + para
        if size + len(chunk.encode("utf-8")) > max_bytes:
            break
        parts.append(chunk)
        size += len(chunk.encode("utf-8"))
    if rng.random() < 0.15:
        parts.append(rng.choice(("\n", "  \n\n", "\t")))
    if rng.random() < 0.1:
        parts.insert(0, rng.choice((" ", "\n\n", "﻿")))
    return "".join(parts)


# -- oracles ----------------------------------------------------------------


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance by the textbook recurrence, one row at a time."""
    n = len(b)
    previous = list(range(n + 1))
    for i, ca in enumerate(a, start=1):
        current = [i] + [0] * n
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current[j] = min(
                previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost
            )
        previous = current
    return previous[n]


def norm(text: str) -> str:
    return " ".join(text.split())


def fuzzy_scan(
    table: LinguisticTable, lang: LanguageTag, query: str, threshold: float
) -> dict[int, float]:
    """Linear-scan similarity search; returns {record id: score}.

    Skips the distance matrix only on two elementary lower bounds: the
    distance between unequal strings is at least 1, and at least their
    length difference.  Since a larger distance can only lower the score,
    a bound already below the threshold cannot be beaten.
    """
    q = norm(query)
    out: dict[int, float] = {}
    for record in table.records():
        stored = record.segments.get(lang)
        if stored is None:
            continue
        s = norm(stored)
        longest = max(len(q), len(s))
        if longest == 0:
            out[record.id] = 1.0
            continue
        if q == s:
            out[record.id] = 1.0
            continue
        floor = max(1, abs(len(q) - len(s)))
        if 1.0 - floor / longest < threshold:
            continue
        score = 1.0 - edit_distance(q, s) / longest
        if score >= threshold:
            out[record.id] = score
    return out


# -- fixture content --------------------------------------------------------


def reference_table() -> LinguisticTable:
    """The canonical 3-row English/Spanish table used across the suite."""
    table = LinguisticTable(name="db")
    table.insert({EN: "hello world", ES: "Hola mundo"})
    table.insert({EN: "white cat", ES: "gato blanco"})
    table.insert({EN: "white cat", ES: "gata blanca"})
    return table


def random_table(
    rng: random.Random,
    langs: tuple[LanguageTag, ...],
    n_records: int,
    name: str = "rand",
) -> LinguisticTable:
    """A table of distinct multilingual records built from the word pools."""
    table = LinguisticTable(name=name)
    seen: set[str] = set()
    while len(table) < n_records:
        length = rng.randint(1, 8)
        base = " ".join(random_word(rng) for _ in range(length))
        if norm(base) in seen or not norm(base):
            continue
        seen.add(norm(base))
        segments = {
            lang: f"{base} [{lang.code}]" if lang is not langs[0] else base
            for lang in langs
        }
        table.insert(segments)
    return table
