"""Word, character, disjoint-letter and external morphological tokenization.

A :class:`TokenStream` keeps, besides the tokens, where each sample ends and
which tokens close a word.  The word-end flags are what lets a subword stream
be undotted with the same positional rules as the running text.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus_io import CorpusError, decode_utf8
from .script import ALPHABET, UNDOT_RULE, UndotError, UndotRule, undot, undot_word_piece

WORD = "word"
CHARACTER = "character"
DISJOINT = "disjoint"
MORPH = "morph_adapter"
SCHEMES = (WORD, CHARACTER, DISJOINT, MORPH)
# short names accepted on the command line
SCHEME_ALIASES = {"word": WORD, "char": CHARACTER, "character": CHARACTER,
                  "disjoint": DISJOINT, "morph": MORPH, "morph_adapter": MORPH,
                  "farasa": MORPH}

SPACE_TOKEN = "<##>"
DEFAULT_MORPH_DELIMITER = "+"

_NC = "".join(sorted(ALPHABET.non_connectors))
# a connected run ends at (and includes) the first non-connector
_DISJOINT_PIECE = re.compile(f"[^\\s{_NC}]*[{_NC}]|[^\\s{_NC}]+")


class TokenizationError(ValueError):
    pass


def canonical_scheme(name: str) -> str:
    try:
        return SCHEME_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown tokenization scheme {name!r}; expected one of {SCHEMES}") from None


@dataclass(frozen=True)
class TokenStream:
    """Tokens of one or more samples.

    ``boundaries[i]`` is the end offset (exclusive) of sample ``i``.
    ``word_final[j]`` tells whether token ``j`` ends a word; for the
    character scheme the space token itself is never word-final.
    """

    tokens: tuple
    scheme: str
    boundaries: tuple
    word_final: tuple

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def samples(self):
        """Yield the token tuple of each sample."""
        start = 0
        for end in self.boundaries:
            yield self.tokens[start:end]
            start = end

    @property
    def n_samples(self) -> int:
        return len(self.boundaries)

    def detokenize(self) -> list:
        """Reconstruct the text of every sample."""
        out = []
        start = 0
        for end in self.boundaries:
            toks = self.tokens[start:end]
            finals = self.word_final[start:end]
            if self.scheme == CHARACTER:
                out.append("".join(" " if t == SPACE_TOKEN else t for t in toks))
            else:
                parts = []
                for t, final in zip(toks, finals):
                    parts.append(t)
                    if final:
                        parts.append(" ")
                out.append("".join(parts).rstrip(" "))
            start = end
        return out

    def to_lines(self) -> str:
        """One token per line, samples separated by a blank line."""
        return "\n\n".join("\n".join(s) for s in self.samples()) + "\n"


def _stream(per_sample, scheme: str) -> TokenStream:
    tokens, finals, bounds = [], [], []
    for toks, fin in per_sample:
        tokens.extend(toks)
        finals.extend(fin)
        bounds.append(len(tokens))
    return TokenStream(tuple(tokens), scheme, tuple(bounds), tuple(finals))


def _as_lines(text):
    return [text] if isinstance(text, str) else list(text)


def _word_pieces(line: str):
    words = line.split()
    return words, [True] * len(words)


def _char_pieces(line: str):
    toks, finals = [], []
    for i, c in enumerate(line):
        if c == " ":
            toks.append(SPACE_TOKEN)
            finals.append(False)
        else:
            toks.append(c)
            finals.append(i + 1 == len(line) or line[i + 1] == " ")
    return toks, finals


def _disjoint_pieces(line: str):
    toks, finals = [], []
    for m in _DISJOINT_PIECE.finditer(line):
        toks.append(m.group())
        end = m.end()
        finals.append(end == len(line) or line[end].isspace())
    return toks, finals


def tokenize_word(text) -> TokenStream:
    """Maximal non-space runs.  ``text`` is a string or an iterable of samples."""
    return _stream((_word_pieces(s) for s in _as_lines(text)), WORD)


def tokenize_char(text) -> TokenStream:
    """One token per code point, spaces emitted as ``<##>``."""
    return _stream((_char_pieces(s) for s in _as_lines(text)), CHARACTER)


def tokenize_disjoint(text) -> TokenStream:
    """Split every word after each non-connecting letter (ا د ذ ر ز و and rasm images)."""
    return _stream((_disjoint_pieces(s) for s in _as_lines(text)), DISJOINT)


def _morph_pieces(line: str, delimiter: str):
    toks, finals = [], []
    for word in line.split():
        pieces = [p for p in word.split(delimiter) if p]
        toks.extend(pieces)
        finals.extend([False] * (len(pieces) - 1) + [True] if pieces else [])
    return toks, finals


def parse_morph_lines(lines, delimiter: str = DEFAULT_MORPH_DELIMITER, reference=None) -> TokenStream:
    """Token stream from already-segmented lines.

    If ``reference`` (the preprocessed companion samples) is given, every
    segmented word with its delimiters removed must equal the corresponding
    reference word; mismatching line numbers (1-based) are reported.
    """
    lines = list(lines)
    if reference is not None:
        validate_morph_lines(lines, reference, delimiter)
    elif not delimiter or delimiter.isspace():
        raise ValueError("morph delimiter must be a non-space string")
    return _stream((_morph_pieces(s, delimiter) for s in lines), MORPH)


def validate_morph_lines(lines, reference, delimiter: str = DEFAULT_MORPH_DELIMITER) -> None:
    """Check that segmented ``lines`` rebuild ``reference`` word by word."""
    if not delimiter or delimiter.isspace():
        raise ValueError("morph delimiter must be a non-space string")
    lines, reference = list(lines), list(reference)
    if len(reference) != len(lines):
        raise TokenizationError(
            f"segmentation has {len(lines)} lines but the corpus has {len(reference)}"
        )
    if "\n".join(lines).replace(delimiter, "") == "\n".join(reference):
        if not any(f" {delimiter}" in ln or f"{delimiter} " in ln or ln.startswith(delimiter)
                   or ln.endswith(delimiter) for ln in lines):
            return
    bad = [
        i + 1
        for i, (seg, ref) in enumerate(zip(lines, reference))
        if [w.replace(delimiter, "") for w in seg.split()] != ref.split()
    ]
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise TokenizationError(
            f"segmentation does not reconstruct the corpus on {len(bad)} line(s): {shown}"
        )


def load_morph_segmentation(
    path, delimiter: str = DEFAULT_MORPH_DELIMITER, reference=None
) -> TokenStream:
    """Read a pre-segmented corpus file (one sample per line)."""
    return parse_morph_lines(read_morph_lines(path), delimiter, reference)


def read_morph_lines(path) -> list:
    path = Path(path)
    try:
        text = decode_utf8(path.read_bytes(), str(path))
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln.strip() for ln in lines]


def tokenize(text, scheme: str) -> TokenStream:
    scheme = canonical_scheme(scheme)
    if scheme == WORD:
        return tokenize_word(text)
    if scheme == CHARACTER:
        return tokenize_char(text)
    if scheme == DISJOINT:
        return tokenize_disjoint(text)
    return parse_morph_lines(_as_lines(text))


def undot_stream(stream: TokenStream, rule: UndotRule = UNDOT_RULE,
                 isolated: bool = False) -> TokenStream:
    """Undot token by token, using each token's position in its original word.

    With ``isolated`` every token is undotted as a stand-alone word instead,
    so its last letter always takes the final form.
    """
    out = []
    for tok, final in zip(stream.tokens, stream.word_final):
        if tok == SPACE_TOKEN and stream.scheme == CHARACTER:
            out.append(tok)
        else:
            out.append(undot_word_piece(tok, final or isolated, rule))
    return TokenStream(tuple(out), stream.scheme, stream.boundaries, stream.word_final)


def count_tokens(lines, scheme: str, include_space: bool = False,
                 delimiter: str = DEFAULT_MORPH_DELIMITER) -> Counter:
    """Type frequencies over many samples without materializing a stream.

    This is the fast path used for corpus statistics.  For the character
    scheme the space token is only counted with ``include_space``.  For the
    morphological scheme ``lines`` must be the segmented lines.
    """
    lines = _as_lines(lines)
    spaces = sum(max(len(ln.split()) - 1, 0) for ln in lines) if include_space else 0
    return expand_word_counts(count_words(lines), scheme, delimiter, spaces)


def count_words(lines, chunk: int = 20_000) -> Counter:
    """Whitespace-delimited word frequencies of all lines."""
    lines = _as_lines(lines)
    counts = Counter()
    # chunks keep the temporary word lists small on large corpora
    for i in range(0, len(lines), chunk):
        counts.update(" ".join(lines[i:i + chunk]).split())
    return counts


def expand_word_counts(words: Counter, scheme: str, delimiter: str = DEFAULT_MORPH_DELIMITER,
                       spaces: int = 0) -> Counter:
    """Token frequencies of a scheme, from the frequencies of whole words.

    No token of any scheme crosses a word boundary, so this is exact.
    ``spaces`` is added as the character-level space token when non-zero.
    """
    scheme = canonical_scheme(scheme)
    if scheme == WORD:
        return Counter(words)
    if scheme == CHARACTER:
        split = iter
    elif scheme == DISJOINT:
        split = _DISJOINT_PIECE.findall
    else:
        split = lambda w: [p for p in w.split(delimiter) if p]  # noqa: E731
    counts = Counter()
    for w, f in words.items():
        for tok, k in Counter(split(w)).items():
            counts[tok] += k * f
    if spaces and scheme == CHARACTER:
        counts[SPACE_TOKEN] = spaces
    return counts


def undot_word_counts(words: Counter, scheme: str = WORD, rule: UndotRule = UNDOT_RULE,
                      delimiter: str = DEFAULT_MORPH_DELIMITER, isolated: bool = False) -> Counter:
    """Frequencies of the undotted words; distinct dotted words may merge."""
    types = list(words)
    images = undot_lines(types, scheme, rule, delimiter, isolated)
    out = Counter()
    for w, img in zip(types, images):
        out[img] += words[w]
    return out


# a whitespace character that never survives preprocessing
_PIECE_BREAK = "\x1f"


def undot_lines(lines, scheme: str = WORD, rule: UndotRule = UNDOT_RULE,
                delimiter: str = DEFAULT_MORPH_DELIMITER, isolated: bool = False) -> list:
    """Undot scheme-ready lines; segmented lines keep their word context.

    ``isolated`` undots character and morph tokens as stand-alone forms
    rather than by their position in the word.  It has no effect on word
    and disjoint tokens, whose last letter is final or a non-connector.
    """
    scheme = canonical_scheme(scheme)
    lines = _as_lines(lines)
    if not lines:
        return []
    passthrough = delimiter if scheme == MORPH else ""
    if isolated and scheme == CHARACTER:
        rule = rule.strict()
    text = "\n".join(lines)
    if isolated and scheme == MORPH:
        if _PIECE_BREAK in text:
            raise TokenizationError("segmented text contains U+001F")
        # a whitespace break makes every piece its own word
        text = text.replace(delimiter, _PIECE_BREAK)
        passthrough = _PIECE_BREAK
    # newlines end words, so the whole corpus can be undotted in one call
    try:
        out = undot(text, rule, passthrough + "\n")
    except UndotError:
        for i, line in enumerate(lines):
            try:
                undot(line, rule, passthrough + _PIECE_BREAK)
            except UndotError as exc:
                raise UndotError(exc.char, exc.offset, line=i + 1) from None
        raise
    if isolated and scheme == MORPH:
        out = out.replace(_PIECE_BREAK, delimiter)
    return out.split("\n")
