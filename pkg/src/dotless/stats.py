"""Vocabulary tables and descriptive statistics of token distributions."""
from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass

from .script import UNDOT_RULE, UndotRule, undot
from .tokenizers import SPACE_TOKEN, TokenStream

DEFAULT_TOP_FRACTION = 0.10
DEFAULT_CURVE_POINTS = tuple(range(1, 101))


class StatsError(ValueError):
    pass


def _freq_order(item):
    token, freq = item
    return (-freq, token)


@dataclass(frozen=True)
class VocabTable:
    """Token frequencies, iterated by frequency descending then token."""

    entries: dict
    total: int
    scheme: str = ""
    dotted: bool = True

    @classmethod
    def from_counts(cls, counts, scheme: str = "", dotted: bool = True) -> "VocabTable":
        items = sorted(((t, int(f)) for t, f in counts.items() if f > 0), key=_freq_order)
        if not items:
            raise StatsError("cannot build a vocabulary from an empty stream")
        return cls(dict(items), sum(f for _, f in items), scheme, dotted)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, token):
        return token in self.entries

    def __getitem__(self, token):
        return self.entries[token]

    @property
    def V(self) -> int:
        return len(self.entries)

    @property
    def N(self) -> int:
        return self.total

    def items(self):
        return self.entries.items()

    def top(self, k: int) -> list:
        return list(self.entries)[:k]

    def ids(self) -> dict:
        """Integer ids, 0 for the most frequent type."""
        return {tok: i for i, tok in enumerate(self.entries)}

    def merge(self, other: "VocabTable") -> "VocabTable":
        if self.scheme != other.scheme or self.dotted != other.dotted:
            raise StatsError("cannot merge vocabularies of different schemes")
        counts = Counter(self.entries)
        counts.update(other.entries)
        return VocabTable.from_counts(counts, self.scheme, self.dotted)

    def write_tsv(self, path) -> None:
        """``id<TAB>token<TAB>frequency`` rows in id order."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            w = csv.writer(f, delimiter="\t", lineterminator="\n")
            w.writerow(["id", "token", "frequency"])
            for i, (tok, freq) in enumerate(self.entries.items()):
                w.writerow([i, tok, freq])


def build_vocab(stream, scheme: str | None = None, dotted: bool = True) -> VocabTable:
    """Exact type frequencies of a token stream (or any iterable of tokens)."""
    if isinstance(stream, TokenStream):
        scheme = scheme or stream.scheme
        counts = Counter(stream.tokens)
    elif isinstance(stream, Counter):
        counts = stream
    else:
        counts = Counter(stream)
    return VocabTable.from_counts(counts, scheme or "", dotted)


def entropy(vocab: VocabTable) -> float:
    """Unigram entropy in bits per token."""
    n = vocab.total
    if n <= 0:
        raise StatsError("entropy of an empty vocabulary")
    return math.fsum(-(f / n) * math.log2(f / n) for f in vocab.entries.values())


def redundancy_from_entropy(h: float, v: int, bound_decimals: int | None = None) -> float:
    """``1 - h / log2(v)``.

    ``bound_decimals`` truncates the upper bound ``log2(v)`` to that many
    decimals before dividing, the way hand-computed tables write it
    (log2 31 as 4.95, log2 19 as 4.24).
    """
    if v <= 1:
        raise StatsError("redundancy needs at least two types")
    bound = math.log2(v)
    if bound_decimals is not None:
        scale = 10 ** bound_decimals
        bound = math.floor(bound * scale) / scale
    return 1.0 - h / bound


def redundancy(vocab: VocabTable) -> float:
    return redundancy_from_entropy(entropy(vocab), vocab.V)


def length_profile(vocab: VocabTable, top_fraction: float = DEFAULT_TOP_FRACTION) -> tuple:
    """(mean type length, mean length of the ceil(top_fraction * V) most frequent types)."""
    if not 0 < top_fraction <= 1:
        raise ValueError("top_fraction must be in (0, 1]")
    if vocab.V == 0:
        raise StatsError("empty vocabulary")
    # the space token stands for one character
    lengths = [1 if t == SPACE_TOKEN else len(t) for t in vocab.entries]
    k = max(1, math.ceil(top_fraction * vocab.V))
    return sum(lengths) / len(lengths), sum(lengths[:k]) / k


def dotless_ratio_curve(
    dotted_vocab: VocabTable, points=DEFAULT_CURVE_POINTS, rule: UndotRule = UNDOT_RULE
) -> list:
    """(percent, V'/V) for the top ``percent`` % most frequent dotted types.

    Each type is undotted as a stand-alone word, which is exact for word and
    disjoint-letter types (a disjoint piece either ends in a non-connector or
    ends its word).
    """
    types = list(dotted_vocab.entries)
    images = [t if t == SPACE_TOKEN else undot(t, rule) for t in types]
    out = []
    for p in points:
        if not 0 < p <= 100:
            raise ValueError(f"percent must be in (0, 100], got {p}")
        k = max(1, math.ceil(len(types) * p / 100))
        out.append((p, len(set(images[:k])) / k))
    return out


@dataclass(frozen=True)
class StatsReport:
    corpus: str
    scheme: str
    dotted: bool
    V: int
    N: int
    V_over_N: float
    H: float
    S: float
    S_top: float
    redundancy: float | None
    top_fraction: float = DEFAULT_TOP_FRACTION


def stats_report(vocab: VocabTable, corpus: str = "", top_fraction: float = DEFAULT_TOP_FRACTION) -> StatsReport:
    s, s_top = length_profile(vocab, top_fraction)
    h = entropy(vocab)
    return StatsReport(
        corpus=corpus,
        scheme=vocab.scheme,
        dotted=vocab.dotted,
        V=vocab.V,
        N=vocab.N,
        V_over_N=100.0 * vocab.V / vocab.N,
        H=h,
        S=s,
        S_top=s_top,
        redundancy=redundancy_from_entropy(h, vocab.V) if vocab.V > 1 else None,
        top_fraction=top_fraction,
    )


@dataclass(frozen=True)
class ComparisonRow:
    corpus: str
    scheme: str
    V: int
    V_dotless: int
    V_ratio_pct: float
    N: int
    H: float
    H_dotless: float
    delta_H: float
    S: float
    S_dotless: float
    S_top: float
    S_top_dotless: float


def compare_report(dotted: StatsReport, dotless: StatsReport) -> ComparisonRow:
    if dotted.scheme != dotless.scheme:
        raise StatsError(f"scheme mismatch: {dotted.scheme} vs {dotless.scheme}")
    if dotted.corpus != dotless.corpus:
        raise StatsError(f"corpus mismatch: {dotted.corpus} vs {dotless.corpus}")
    return ComparisonRow(
        corpus=dotted.corpus,
        scheme=dotted.scheme,
        V=dotted.V,
        V_dotless=dotless.V,
        V_ratio_pct=100.0 * dotless.V / dotted.V,
        N=dotted.N,
        H=dotted.H,
        H_dotless=dotless.H,
        delta_H=dotted.H - dotless.H,
        S=dotted.S,
        S_dotless=dotless.S,
        S_top=dotted.S_top,
        S_top_dotless=dotless.S_top,
    )


# ---- serialization -------------------------------------------------------

STATS_COLUMNS = ("corpus", "scheme", "dottedness", "V", "N", "V_over_N_pct", "H",
                 "S", "S_top", "redundancy")
COMPARE_COLUMNS = ("corpus", "scheme", "V", "V_dotless", "V_ratio_pct", "N", "H",
                   "H_dotless", "delta_H", "S", "S_dotless", "S_top", "S_top_dotless")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def stats_rows(reports) -> list:
    rows = []
    for r in reports:
        rows.append([r.corpus, r.scheme, "dotted" if r.dotted else "dotless", r.V, r.N,
                     r.V_over_N, r.H, r.S, r.S_top, r.redundancy])
    return rows


def write_tsv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_stats_tsv(path, reports) -> None:
    write_tsv(path, STATS_COLUMNS, stats_rows(reports))


def write_compare_tsv(path, rows) -> None:
    write_tsv(path, COMPARE_COLUMNS, [[getattr(r, c) for c in COMPARE_COLUMNS] for r in rows])


def write_curve_csv(path, curve) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["percent", "dotless_over_dotted"])
        for p, ratio in curve:
            w.writerow([p, f"{ratio:.6f}"])


def to_jsonable(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return {k: to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(obj), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
