"""Corpus loading, length filtering and seeded train/validation/test splits."""
from __future__ import annotations

import logging
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path

from .script import ARABIC, LANGUAGE_MODES

log = logging.getLogger(__name__)

DEFAULT_SEED = 42

# Arabic full stop (U+06D4) and ASCII period
_SENTENCE_DOT = re.compile("[.۔]")


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class Corpus:
    samples: tuple
    name: str = "corpus"
    language_mode: str = ARABIC

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def with_samples(self, samples, name=None) -> "Corpus":
        return Corpus(tuple(samples), name or self.name, self.language_mode)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    validation_fraction: float = 0.0
    test_fraction: float = 0.1
    seed: int = DEFAULT_SEED
    shuffle: bool = True

    def __post_init__(self):
        fractions = (self.train_fraction, self.validation_fraction, self.test_fraction)
        if any(f < 0 or f > 1 for f in fractions):
            raise ValueError(f"split fractions must lie in [0, 1], got {fractions}")
        if self.train_fraction <= 0:
            raise ValueError("train fraction must be positive")
        if abs(math.fsum(fractions) - 1.0) > 1e-12:
            raise ValueError(f"split fractions must sum to 1, got {fractions}")


def decode_utf8(data: bytes, source: str = "<bytes>") -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(
            f"{source}: invalid UTF-8 at byte offset {exc.start}"
        ) from exc


def split_lines(text: str, split_on_sentence_dot: bool = False) -> list:
    """Trimmed, non-empty lines; CRLF and CR are treated as LF."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if split_on_sentence_dot:
        text = _SENTENCE_DOT.sub("\n", text)
    return [line.strip() for line in text.split("\n") if line.strip()]


def load_corpus(
    path,
    language_mode: str = ARABIC,
    name: str | None = None,
    split_on_sentence_dot: bool = False,
) -> Corpus:
    """Read one sample per line from a UTF-8 file.

    Lines are trimmed and blank ones dropped.  With ``split_on_sentence_dot``
    every ASCII period and Arabic full stop also ends a sample.
    """
    if language_mode not in LANGUAGE_MODES:
        raise ValueError(f"unknown language mode {language_mode!r}")
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CorpusError(f"cannot read {path}: {exc}") from exc
    samples = split_lines(decode_utf8(data, str(path)), split_on_sentence_dot)
    if not samples:
        log.warning("%s: corpus is empty", path)
    return Corpus(tuple(samples), name or path.stem, language_mode)


def load_corpora(paths, language_mode: str = ARABIC, name: str | None = None, **kwargs) -> Corpus:
    """Concatenate several files, in argument order, into one corpus."""
    paths = list(paths)
    parts = [load_corpus(p, language_mode, **kwargs) for p in paths]
    if name is None:
        name = parts[0].name if len(parts) == 1 else "aggregated"
    return Corpus(tuple(s for c in parts for s in c.samples), name, language_mode)


def filter_samples(corpus: Corpus, min_tokens: int = 0, max_tokens: int | None = None) -> Corpus:
    """Keep samples whose whitespace-token count lies in [min_tokens, max_tokens]."""
    if min_tokens < 0:
        raise ValueError("min_tokens must be >= 0")
    hi = math.inf if max_tokens is None else max_tokens
    kept = [s for s in corpus.samples if min_tokens <= len(s.split()) <= hi]
    log.info("%s: kept %d of %d samples", corpus.name, len(kept), len(corpus))
    return corpus.with_samples(kept)


def split_sizes(n: int, spec: SplitSpec) -> tuple:
    """(train, validation, test) sample counts summing to ``n``.

    Validation and test get their rounded share; train takes the remainder,
    so each size is within one sample of its exact fraction.
    """
    n_valid = round(n * spec.validation_fraction)
    n_test = round(n * spec.test_fraction)
    n_train = n - n_valid - n_test
    sizes = (n_train, n_valid, n_test)
    fractions = (spec.train_fraction, spec.validation_fraction, spec.test_fraction)
    for size, frac, label in zip(sizes, fractions, ("train", "validation", "test")):
        if frac > 0 and size < 1:
            raise CorpusError(
                f"corpus of {n} samples is too small for a non-empty {label} split"
            )
    return sizes


def split_indices(n: int, spec: SplitSpec) -> tuple:
    """Index lists of the (train, validation, test) blocks.

    Indices are permuted with ``random.Random(seed)`` unless ``spec.shuffle``
    is false, then cut into contiguous blocks.
    """
    if n == 0:
        raise CorpusError("cannot split an empty corpus")
    n_train, n_valid, _ = split_sizes(n, spec)
    order = list(range(n))
    if spec.shuffle:
        random.Random(spec.seed).shuffle(order)
    return order[:n_train], order[n_train:n_train + n_valid], order[n_train + n_valid:]


def split_corpus(corpus: Corpus, spec: SplitSpec = SplitSpec()) -> tuple:
    """Deterministic (train, validation, test) split of the samples."""
    blocks = split_indices(len(corpus), spec)
    names = ("train", "valid", "test")
    return tuple(
        corpus.with_samples([corpus.samples[i] for i in idx], f"{corpus.name}.{label}")
        for idx, label in zip(blocks, names)
    )


def write_corpus(corpus: Corpus, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for sample in corpus.samples:
            f.write(sample + "\n")
    return path


def write_splits(splits, out_dir, name: str) -> list:
    """Write ``<name>.train.txt``, ``<name>.valid.txt`` and ``<name>.test.txt``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [
        write_corpus(part, out_dir / f"{name}.{label}.txt")
        for part, label in zip(splits, ("train", "valid", "test"))
    ]
