"""Arabic character inventory, text normalization and the dotless transform.

The undotting map sends every dotted letter to its rasm (the skeleton left
once the dots are erased).  Three letters change shape when they are not
word-final, so they also carry a positional override:

    ن  ->  ٮ   (initial/medial),  ں  (final)
    ي  ->  ٮ   (initial/medial),  ى  (final)
    ق  ->  ڡ   (initial/medial),  ٯ  (final)

Everything here is a pure function over module-level constant tables.
"""
from __future__ import annotations

import enum
import functools
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

ARABIC = "arabic"
LATIN = "latin"
LANGUAGE_MODES = (ARABIC, LATIN)

HAMZA = "ء"
ALEF = "ا"
ALEF_MAKSURA = "ى"
TEH_MARBUTA = "ة"
NOON = "ن"
YEH = "ي"
QAF = "ق"

DOTLESS_BEH = "ٮ"
DOTLESS_FEH = "ڡ"
DOTLESS_QAF = "ٯ"
NOON_GHUNNA = "ں"

# letter -> rasm, in alphabetical order; hamza, teh marbuta and alef maksura last
_BASE_MAP = {
    "ا": "ا",  # alef
    "ب": DOTLESS_BEH,  # beh
    "ت": DOTLESS_BEH,  # teh
    "ث": DOTLESS_BEH,  # theh
    "ج": "ح",  # jeem
    "ح": "ح",  # hah
    "خ": "ح",  # khah
    "د": "د",  # dal
    "ذ": "د",  # thal
    "ر": "ر",  # reh
    "ز": "ر",  # zain
    "س": "س",  # seen
    "ش": "س",  # sheen
    "ص": "ص",  # sad
    "ض": "ص",  # dad
    "ط": "ط",  # tah
    "ظ": "ط",  # zah
    "ع": "ع",  # ain
    "غ": "ع",  # ghain
    "ف": DOTLESS_FEH,  # feh
    QAF: DOTLESS_QAF,
    "ك": "ك",  # kaf
    "ل": "ل",  # lam
    "م": "م",  # meem
    NOON: NOON_GHUNNA,
    "ه": "ه",  # heh
    "و": "و",  # waw
    YEH: ALEF_MAKSURA,
    HAMZA: HAMZA,
    TEH_MARBUTA: "ه",
    ALEF_MAKSURA: ALEF_MAKSURA,
}

_POSITIONAL_OVERRIDES = (
    (NOON, DOTLESS_BEH),
    (YEH, DOTLESS_BEH),
    (QAF, DOTLESS_FEH),
)

_DIACRITICS = (
    "ً",  # fathatan
    "ٌ",  # dammatan
    "ٍ",  # kasratan
    "َ",  # fatha
    "ُ",  # damma
    "ِ",  # kasra
    "ّ",  # shadda
    "ْ",  # sukun
)

_HAMZA_CARRIERS = {
    "آ": ALEF,  # alef with madda above
    "أ": ALEF,  # alef with hamza above
    "إ": ALEF,  # alef with hamza below
    "ؤ": "و",  # waw with hamza above
    "ئ": YEH,  # yeh with hamza above
}

_NON_CONNECTORS = ("ا", "د", "ذ", "ر", "ز", "و")


@dataclass(frozen=True)
class AlphabetSpec:
    dotted_letters: frozenset
    dotless_letters: frozenset
    diacritics: frozenset
    hamza_carriers: Mapping[str, str]
    non_connectors: frozenset


@dataclass(frozen=True)
class UndotRule:
    """Base letter map plus the (letter, replacement) pairs used off word-final."""

    base_map: Mapping[str, str]
    positional_overrides: tuple = _POSITIONAL_OVERRIDES
    use_overrides: bool = True
    _table: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_table", str.maketrans(dict(self.base_map)))

    def strict(self) -> "UndotRule":
        """Same table without the positional overrides."""
        return UndotRule(self.base_map, self.positional_overrides, use_overrides=False)


ALPHABET = AlphabetSpec(
    dotted_letters=frozenset(_BASE_MAP),
    dotless_letters=frozenset(_BASE_MAP.values()),
    diacritics=frozenset(_DIACRITICS),
    hamza_carriers=dict(_HAMZA_CARRIERS),
    non_connectors=frozenset(_NON_CONNECTORS) | {_BASE_MAP[c] for c in _NON_CONNECTORS},
)

UNDOT_RULE = UndotRule(base_map=dict(_BASE_MAP))
STRICT_UNDOT_RULE = UNDOT_RULE.strict()


class CharClass(str, enum.Enum):
    LETTER_DOTTED = "letter_dotted"
    LETTER_DOTLESS = "letter_dotless"
    DIACRITIC = "diacritic"
    HAMZA_CARRIER_FORM = "hamza_carrier_form"
    SPACE = "space"
    OTHER = "other"


def char_class(c: str) -> CharClass:
    """Classify a single code point.

    Letters present in both inventories (alef, lam, hamza, ...) are reported
    as dotted; ``letter_dotless`` is reserved for the rasm-only glyphs.
    """
    if c in ALPHABET.dotted_letters:
        return CharClass.LETTER_DOTTED
    if c in ALPHABET.dotless_letters:
        return CharClass.LETTER_DOTLESS
    if c in ALPHABET.diacritics:
        return CharClass.DIACRITIC
    if c in ALPHABET.hamza_carriers:
        return CharClass.HAMZA_CARRIER_FORM
    if c.isspace():
        return CharClass.SPACE
    return CharClass.OTHER


class UndotError(ValueError):
    def __init__(self, char: str, offset: int, line: int | None = None):
        self.char = char
        self.offset = offset
        self.line = line
        where = f"line {line}, offset {offset}" if line is not None else f"offset {offset}"
        super().__init__(f"cannot undot U+{ord(char):04X} ({unicodedata.name(char, '?')}) at {where}")


_WS = re.compile(r"\s+")
_CARRIER_TABLE = str.maketrans(_HAMZA_CARRIERS)
_ARABIC_KEEP = "".join(sorted(ALPHABET.dotted_letters))
_ARABIC_DROP = re.compile(f"[^{_ARABIC_KEEP}\\s]")
_UNDOT_OK = "".join(sorted(ALPHABET.dotted_letters | ALPHABET.dotless_letters))
_ARABIC_DROP_KEEP_RASM = re.compile(f"[^{_UNDOT_OK}\\s]")
_LATIN_DROP = re.compile(r"[^a-z\s]")
_OVERRIDE_PATTERNS = tuple(
    (re.compile(f"{letter}(?=\\S)"), repl) for letter, repl in _POSITIONAL_OVERRIDES
)


@functools.lru_cache(maxsize=None)
def _invalid_char(extra: str):
    return re.compile(f"[^{_UNDOT_OK} {re.escape(extra)}]")


def preprocess(text: str, mode: str = ARABIC, dropped: Counter | None = None,
               keep_dotless: bool = False) -> str:
    """Normalize raw text to letters and single spaces.

    Arabic mode composes the text (NFC), replaces hamza-seated letters by their
    carrier, then drops every character outside the 31-letter dotted
    alphabet (diacritics, digits, punctuation, tatweel, Latin, Persian
    letters...).  Latin mode lowercases and keeps ``a-z`` only.

    If ``dropped`` is given, it is updated with a histogram of removed
    characters (whitespace is collapsed, not counted).  ``keep_dotless``
    also keeps the rasm letters, so already undotted text survives.
    """
    if mode == ARABIC:
        text = unicodedata.normalize("NFC", text).translate(_CARRIER_TABLE)
        drop = _ARABIC_DROP_KEEP_RASM if keep_dotless else _ARABIC_DROP
    elif mode == LATIN:
        text = text.lower()
        drop = _LATIN_DROP
    else:
        raise ValueError(f"unknown language mode {mode!r}")
    if dropped is not None:
        dropped.update(drop.findall(text))
    text = drop.sub("", text)
    return _WS.sub(" ", text).strip()


def undot(text: str, rule: UndotRule = UNDOT_RULE, passthrough: str = "") -> str:
    """Map preprocessed Arabic text to its dotless form.

    Word position is determined by the space-delimited word: noon, yeh and
    qaf take their override unless they are the last letter of the word.
    Already dotless letters are fixed points, so ``undot`` is idempotent.

    Characters in ``passthrough`` are copied unchanged.  A non-space one (a
    segmentation delimiter) counts as word-internal; a newline separates words.
    """
    bad = _invalid_char(passthrough).search(text)
    if bad is not None:
        raise UndotError(bad.group(), bad.start())
    if rule.use_overrides:
        for pattern, repl in _OVERRIDE_PATTERNS:
            text = pattern.sub(repl, text)
    return text.translate(rule._table)


def undot_word_piece(piece: str, word_final: bool, rule: UndotRule = UNDOT_RULE) -> str:
    """Undot a fragment of a word, knowing whether it ends the word.

    Used for subword tokens, whose last letter is word-medial unless the
    piece closes its word.
    """
    if word_final or not piece:
        return undot(piece, rule)
    # a trailing alef makes the piece's last letter non-final
    return undot(piece + ALEF, rule)[:-1]


def dump_alphabet(rule: UndotRule = UNDOT_RULE) -> dict:
    """JSON-ready description of the alphabet and the undot tables."""
    overrides = dict(rule.positional_overrides) if rule.use_overrides else {}

    def entry(c: str) -> dict:
        return {
            "char": c,
            "codepoint": f"U+{ord(c):04X}",
            "name": unicodedata.name(c),
            "class": char_class(c).value,
            "non_connector": c in ALPHABET.non_connectors,
        }

    dotted = []
    for c in _BASE_MAP:
        row = entry(c)
        row["dotless"] = rule.base_map[c]
        row["dotless_nonfinal"] = overrides.get(c, rule.base_map[c])
        dotted.append(row)
    dotless = [entry(c) for c in sorted(ALPHABET.dotless_letters)]
    return {
        "dotted_count": len(ALPHABET.dotted_letters),
        "dotless_count": len(ALPHABET.dotless_letters),
        "positional_overrides": rule.use_overrides,
        "dotted_letters": dotted,
        "dotless_letters": dotless,
        "diacritics": [entry(c) for c in _DIACRITICS],
        "hamza_carriers": [
            dict(entry(c), carrier=carrier) for c, carrier in _HAMZA_CARRIERS.items()
        ],
    }
