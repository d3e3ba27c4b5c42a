"""Language labels for multilingual file handling.

Files and text regions are labelled with two-letter codes.  Besides the
standard ISO-639-1 inventory this module knows three special-purpose codes
that standard code lists do not provide:

``mm``
    genuinely multilingual content (several languages side by side),
``un``
    language undetermined or not yet examined,
``xx``
    no linguistic content (numbers, code, punctuation-only material).

The distinction matters in practice because ``ml``, which people sometimes
pick as an abbreviation for "multilingual", is the code of Malayalam, a
language with tens of millions of speakers.  ``check_labelling`` flags
exactly that kind of mistake.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "TagKind",
    "LanguageTag",
    "FileLanguageMetadata",
    "LabellingDiagnostic",
    "MalformedTag",
    "UnknownCode",
    "parse_tag",
    "check_labelling",
    "known_codes",
]


class MalformedTag(ValueError):
    """The label is not a two-letter alphabetic code."""


class UnknownCode(ValueError):
    """The label is well-formed but not a known language code."""


class TagKind(enum.Enum):
    STANDARD = "standard"
    MULTILINGUAL = "multilingual"
    UNDETERMINED = "undetermined"
    NO_LINGUISTIC_CONTENT = "no-linguistic-content"


#: Special codes, deliberately outside the ISO-639-1 inventory.
MULTILINGUAL_CODE = "mm"
UNDETERMINED_CODE = "un"
NO_CONTENT_CODE = "xx"

_SPECIAL_KINDS = {
    MULTILINGUAL_CODE: TagKind.MULTILINGUAL,
    UNDETERMINED_CODE: TagKind.UNDETERMINED,
    NO_CONTENT_CODE: TagKind.NO_LINGUISTIC_CONTENT,
}

# Static snapshot of the ISO-639-1 two-letter codes.  Embedded so that
# validation works offline and never drifts with an installed data package.
_ISO_639_1 = {
    "aa": "Afar", "ab": "Abkhazian", "ae": "Avestan", "af": "Afrikaans",
    "ak": "Akan", "am": "Amharic", "an": "Aragonese", "ar": "Arabic",
    "as": "Assamese", "av": "Avaric", "ay": "Aymara", "az": "Azerbaijani",
    "ba": "Bashkir", "be": "Belarusian", "bg": "Bulgarian", "bh": "Bihari languages",
    "bi": "Bislama", "bm": "Bambara", "bn": "Bengali", "bo": "Tibetan",
    "br": "Breton", "bs": "Bosnian", "ca": "Catalan", "ce": "Chechen",
    "ch": "Chamorro", "co": "Corsican", "cr": "Cree", "cs": "Czech",
    "cu": "Church Slavic", "cv": "Chuvash", "cy": "Welsh", "da": "Danish",
    "de": "German", "dv": "Divehi", "dz": "Dzongkha", "ee": "Ewe",
    "el": "Greek", "en": "English", "eo": "Esperanto", "es": "Spanish",
    "et": "Estonian", "eu": "Basque", "fa": "Persian", "ff": "Fulah",
    "fi": "Finnish", "fj": "Fijian", "fo": "Faroese", "fr": "French",
    "fy": "Western Frisian", "ga": "Irish", "gd": "Gaelic", "gl": "Galician",
    "gn": "Guarani", "gu": "Gujarati", "gv": "Manx", "ha": "Hausa",
    "he": "Hebrew", "hi": "Hindi", "ho": "Hiri Motu", "hr": "Croatian",
    "ht": "Haitian", "hu": "Hungarian", "hy": "Armenian", "hz": "Herero",
    "ia": "Interlingua", "id": "Indonesian", "ie": "Interlingue", "ig": "Igbo",
    "ii": "Sichuan Yi", "ik": "Inupiaq", "io": "Ido", "is": "Icelandic",
    "it": "Italian", "iu": "Inuktitut", "ja": "Japanese", "jv": "Javanese",
    "ka": "Georgian", "kg": "Kongo", "ki": "Kikuyu", "kj": "Kuanyama",
    "kk": "Kazakh", "kl": "Kalaallisut", "km": "Central Khmer", "kn": "Kannada",
    "ko": "Korean", "kr": "Kanuri", "ks": "Kashmiri", "ku": "Kurdish",
    "kv": "Komi", "kw": "Cornish", "ky": "Kirghiz", "la": "Latin",
    "lb": "Luxembourgish", "lg": "Ganda", "li": "Limburgan", "ln": "Lingala",
    "lo": "Lao", "lt": "Lithuanian", "lu": "Luba-Katanga", "lv": "Latvian",
    "mg": "Malagasy", "mh": "Marshallese", "mi": "Maori", "mk": "Macedonian",
    "ml": "Malayalam", "mn": "Mongolian", "mr": "Marathi", "ms": "Malay",
    "mt": "Maltese", "my": "Burmese", "na": "Nauru", "nb": "Norwegian Bokmal",
    "nd": "North Ndebele", "ne": "Nepali", "ng": "Ndonga", "nl": "Dutch",
    "nn": "Norwegian Nynorsk", "no": "Norwegian", "nr": "South Ndebele",
    "nv": "Navajo", "ny": "Chichewa", "oc": "Occitan", "oj": "Ojibwa",
    "om": "Oromo", "or": "Oriya", "os": "Ossetian", "pa": "Panjabi",
    "pi": "Pali", "pl": "Polish", "ps": "Pushto", "pt": "Portuguese",
    "qu": "Quechua", "rm": "Romansh", "rn": "Rundi", "ro": "Romanian",
    "ru": "Russian", "rw": "Kinyarwanda", "sa": "Sanskrit", "sc": "Sardinian",
    "sd": "Sindhi", "se": "Northern Sami", "sg": "Sango", "si": "Sinhala",
    "sk": "Slovak", "sl": "Slovenian", "sm": "Samoan", "sn": "Shona",
    "so": "Somali", "sq": "Albanian", "sr": "Serbian", "ss": "Swati",
    "st": "Southern Sotho", "su": "Sundanese", "sv": "Swedish", "sw": "Swahili",
    "ta": "Tamil", "te": "Telugu", "tg": "Tajik", "th": "Thai",
    "ti": "Tigrinya", "tk": "Turkmen", "tl": "Tagalog", "tn": "Tswana",
    "to": "Tonga", "tr": "Turkish", "ts": "Tsonga", "tt": "Tatar",
    "tw": "Twi", "ty": "Tahitian", "ug": "Uighur", "uk": "Ukrainian",
    "ur": "Urdu", "uz": "Uzbek", "ve": "Venda", "vi": "Vietnamese",
    "vo": "Volapuk", "wa": "Walloon", "wo": "Wolof", "xh": "Xhosa",
    "yi": "Yiddish", "yo": "Yoruba", "za": "Zhuang", "zh": "Chinese",
    "zu": "Zulu",
}

_SPECIAL_NAMES = {
    MULTILINGUAL_CODE: "multilingual",
    UNDETERMINED_CODE: "undetermined",
    NO_CONTENT_CODE: "no linguistic content",
}


def known_codes() -> frozenset[str]:
    """All accepted codes: the ISO-639-1 snapshot plus mm, un and xx."""
    return frozenset(_ISO_639_1) | frozenset(_SPECIAL_KINDS)


@dataclass(frozen=True, order=True)
class LanguageTag:
    """A validated two-letter language label.

    Instances come out of :func:`parse_tag`; building one directly with an
    unvalidated code raises the same errors parsing would.
    """

    code: str

    def __post_init__(self) -> None:
        if len(self.code) != 2 or not self.code.isascii() or not self.code.isalpha():
            raise MalformedTag(f"language label must be two ASCII letters, got {self.code!r}")
        if self.code != self.code.lower():
            object.__setattr__(self, "code", self.code.lower())
        if self.code not in _ISO_639_1 and self.code not in _SPECIAL_KINDS:
            raise UnknownCode(f"{self.code!r} is not a known language code")

    @property
    def kind(self) -> TagKind:
        return _SPECIAL_KINDS.get(self.code, TagKind.STANDARD)

    @property
    def name(self) -> str:
        return _SPECIAL_NAMES.get(self.code) or _ISO_639_1[self.code]

    def __str__(self) -> str:
        return self.code


def parse_tag(label: str) -> LanguageTag:
    """Parse and validate a language label, case-insensitively.

    Raises :exc:`MalformedTag` when the label is not two ASCII letters
    (``m1`` is the classic offender: a digit smuggled into what was meant
    to say "multilingual") and :exc:`UnknownCode` for well-formed labels
    outside the known inventory.
    """
    if not isinstance(label, str):
        raise MalformedTag(f"language label must be a string, got {type(label).__name__}")
    stripped = label.strip()
    if len(stripped) != 2 or not stripped.isascii() or not stripped.isalpha():
        hint = ""
        if stripped.lower() in {"m1", "ml1"}:
            hint = " (ml is reserved for Malayalam; multilingual content is labelled mm)"
        raise MalformedTag(f"language label must be two ASCII letters, got {label!r}{hint}")
    return LanguageTag(stripped.lower())


@dataclass(frozen=True)
class FileLanguageMetadata:
    """Declared language labelling of a file.

    ``declared`` lists the languages the file claims to contain; files of
    unknown language declare ``un`` explicitly rather than declaring
    nothing.  ``default_processing_language`` names the language tools
    should assume for unswitched regions, when that differs from the
    obvious single declared language.
    """

    declared: tuple[LanguageTag, ...]
    default_processing_language: LanguageTag | None = None

    def __post_init__(self) -> None:
        if not self.declared:
            raise ValueError(
                "declared languages must not be empty; declare 'un' for undetermined content"
            )
        seen: set[str] = set()
        for tag in self.declared:
            if tag.code in seen:
                raise ValueError(f"language {tag.code!r} declared twice")
            seen.add(tag.code)


@dataclass(frozen=True)
class LabellingDiagnostic:
    """One mismatch between declared and observed languages."""

    kind: str  # "undeclared-language" | "absent-language" | "ml-misuse"
    language: LanguageTag | None
    message: str
    suggestion: str | None = None


def check_labelling(
    metadata: FileLanguageMetadata,
    observed: Iterable[LanguageTag],
) -> list[LabellingDiagnostic]:
    """Compare declared labelling against languages actually observed.

    Observed languages normally come from region switches found while
    segmenting, or from a language guesser.  Declared ``mm`` covers any
    mix of real languages; declared ``un`` waives checking entirely.

    The one labelling mistake common enough to deserve its own diagnostic
    is declaring ``ml`` for a file that turns out to be multilingual:
    that single root cause is reported once, rather than as a cascade of
    per-language mismatches.
    """
    observed_real = []
    seen: set[str] = set()
    for tag in observed:
        if tag.kind is TagKind.STANDARD and tag.code not in seen:
            observed_real.append(tag)
            seen.add(tag.code)

    declared_codes = {tag.code for tag in metadata.declared}

    if UNDETERMINED_CODE in declared_codes:
        return []

    if "ml" in declared_codes and len(observed_real) > 1 and "ml" not in seen:
        return [
            LabellingDiagnostic(
                kind="ml-misuse",
                language=LanguageTag("ml"),
                message=(
                    "file declares 'ml' but contains "
                    + ", ".join(t.code for t in observed_real)
                    + "; 'ml' is Malayalam, not 'multilingual'"
                ),
                suggestion="declare 'mm' for multilingual content",
            )
        ]

    diagnostics: list[LabellingDiagnostic] = []
    covers_all = MULTILINGUAL_CODE in declared_codes
    for tag in observed_real:
        if tag.code not in declared_codes and not covers_all:
            diagnostics.append(
                LabellingDiagnostic(
                    kind="undeclared-language",
                    language=tag,
                    message=f"content in {tag.code} ({tag.name}) is not declared",
                    suggestion=f"add {tag.code!r} to the declared languages",
                )
            )
    for tag in metadata.declared:
        if tag.kind is TagKind.STANDARD and tag.code not in seen:
            diagnostics.append(
                LabellingDiagnostic(
                    kind="absent-language",
                    language=tag,
                    message=f"declared language {tag.code} ({tag.name}) was not observed",
                    suggestion=None,
                )
            )
    return diagnostics


def format_language_list(tags: Sequence[LanguageTag]) -> str:
    """Render tags as a comma-separated code list, in the given order."""
    return ",".join(tag.code for tag in tags)


def parse_language_list(value: str) -> tuple[LanguageTag, ...]:
    """Parse a comma-separated code list, e.g. from a header field."""
    parts = [p for p in (chunk.strip() for chunk in value.split(",")) if p]
    return tuple(parse_tag(p) for p in parts)
