"""ARPA-style text serialization and a binary model cache.

The text layout is the familiar one::

    \\data\\
    ngram 1=<count>
    ...
    \\1-grams:
    <log10 p>\\t<w1 ... wk>\\t<log10 backoff>
    ...
    \\end\\

N-grams are sorted by token tuple within each order, so two files written
from the same counts are byte-identical.  An interpolated model is stored
with fully interpolated probabilities and the interpolation weights as
backoffs, which is exactly what a backoff reader needs to reproduce it.
"""
from __future__ import annotations

import math
import pickle
import struct
from collections import Counter

from .ngram import BOS, EOS, UNK, NgramCounts, NgramModel

ARPA_NO_PROB = -99.0
CACHE_MAGIC = b"DOTLESSLM"
CACHE_VERSION = 1


class ArpaError(ValueError):
    pass


def _f(x: float) -> str:
    return f"{x:.12g}"


def arpa_entries(model: NgramModel) -> list:
    """Per order, sorted (ngram, log10 prob, log10 backoff or None)."""
    orders = []
    for k in range(1, model.order + 1):
        grams = set(model.alpha[k])
        if k == 1:
            grams.add((UNK,))
            grams.add((BOS,))
        rows = []
        for g in sorted(grams):
            if g == (BOS,):
                lp = ARPA_NO_PROB
            else:
                lp = math.log10(model.prob(g[-1], g[:-1]))
            bow = None
            if k < model.order and g in model.backoff[k + 1]:
                bow = math.log10(model.backoff[k + 1][g])
            rows.append((g, lp, bow))
        orders.append(rows)
    return orders


def write_arpa(model: NgramModel, path) -> None:
    orders = arpa_entries(model)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\\data\\\n")
        for k, rows in enumerate(orders, 1):
            f.write(f"ngram {k}={len(rows)}\n")
        for k, rows in enumerate(orders, 1):
            f.write(f"\n\\{k}-grams:\n")
            for g, lp, bow in rows:
                line = f"{_f(lp)}\t{' '.join(g)}"
                if bow is not None:
                    line += f"\t{_f(bow)}"
                f.write(line + "\n")
        f.write("\n\\end\\\n")


class ArpaModel:
    """Backoff scorer over a parsed ARPA file."""

    def __init__(self, order: int, probs: dict, backoffs: dict):
        self.order = order
        self.probs = probs
        self.backoffs = backoffs
        self.vocab = frozenset(g[0] for g in probs if len(g) == 1) - {BOS, UNK}

    def log10_prob(self, word: str, context=()) -> float:
        if word not in self.vocab:
            word = UNK
        context = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        penalty = 0.0
        while True:
            g = context + (word,)
            if g in self.probs:
                return penalty + self.probs[g]
            if not context:
                raise ArpaError(f"no unigram entry for {word!r}")
            penalty += self.backoffs.get(context, 0.0)
            context = context[1:]

    def score_sample(self, tokens, include_eos: bool = True) -> list:
        history = [BOS]
        out = []
        for w in list(tokens) + ([EOS] if include_eos else []):
            out.append(self.log10_prob(w, history) * math.log(10))
            history.append(w if w in self.vocab else UNK)
        return out


def read_arpa(path) -> ArpaModel:
    probs, backoffs = {}, {}
    declared = {}
    section = None
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line == "\\data\\":
                section = "data"
                continue
            if line == "\\end\\":
                break
            if line.startswith("\\") and line.endswith("-grams:"):
                section = int(line[1:-len("-grams:")])
                continue
            if section == "data":
                if not line.startswith("ngram "):
                    raise ArpaError(f"line {lineno}: expected 'ngram k=count'")
                k, n = line[len("ngram "):].split("=")
                declared[int(k)] = int(n)
            elif isinstance(section, int):
                parts = line.split("\t")
                if len(parts) not in (2, 3):
                    raise ArpaError(f"line {lineno}: malformed n-gram entry")
                g = tuple(parts[1].split(" "))
                if len(g) != section:
                    raise ArpaError(f"line {lineno}: expected a {section}-gram")
                probs[g] = float(parts[0])
                if len(parts) == 3:
                    backoffs[g] = float(parts[2])
            else:
                raise ArpaError(f"line {lineno}: content outside any section")
    if not declared:
        raise ArpaError("missing \\data\\ header")
    for k, n in declared.items():
        got = sum(1 for g in probs if len(g) == k)
        if got != n:
            raise ArpaError(f"header declares {n} {k}-grams, found {got}")
    return ArpaModel(max(declared), probs, backoffs)


def _canonical(model: NgramModel) -> dict:
    """Plain sorted structures, so equal models pickle to equal bytes."""
    return {
        "order": model.order,
        "vocab": sorted(model.vocab),
        "discounts": sorted(model.discounts.items()),
        "backoff": [None] + [sorted(t.items()) for t in model.backoff[1:]],
        "alpha": [None] + [sorted(t.items()) for t in model.alpha[1:]],
        "counts_order": model.counts.order,
        "counts": [sorted(t.items()) for t in model.counts.tables],
        "simple": model.simple,
    }


def _from_canonical(d: dict) -> NgramModel:
    counts = NgramCounts(d["counts_order"], [Counter(dict(t)) for t in d["counts"]])
    return NgramModel(
        order=d["order"],
        vocab=frozenset(d["vocab"]),
        discounts=dict(d["discounts"]),
        backoff=[None] + [dict(t) for t in d["backoff"][1:]],
        alpha=[None] + [dict(t) for t in d["alpha"][1:]],
        counts=counts,
        simple=d["simple"],
    )


def save_model(model: NgramModel, path) -> None:
    """Binary cache: magic, uint32 version, pickled canonical model."""
    payload = pickle.dumps(_canonical(model), protocol=4)
    with open(path, "wb") as f:
        f.write(CACHE_MAGIC + struct.pack("<I", CACHE_VERSION) + payload)


def load_model(path) -> NgramModel:
    with open(path, "rb") as f:
        head = f.read(len(CACHE_MAGIC) + 4)
        if head[:len(CACHE_MAGIC)] != CACHE_MAGIC:
            raise ArpaError(f"{path}: not a model cache")
        (version,) = struct.unpack("<I", head[len(CACHE_MAGIC):])
        if version != CACHE_VERSION:
            raise ArpaError(f"{path}: cache version {version}, expected {CACHE_VERSION}")
        return _from_canonical(pickle.loads(f.read()))
