"""Zipf (rank-frequency) and Heap (vocabulary growth) fits in log-log space."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .stats import VocabTable

log = logging.getLogger(__name__)

DEFAULT_HEAP_POINTS = 64


class FitError(ValueError):
    pass


def loglog_ols(x, y) -> tuple:
    """Least squares of log2(y) on log2(x); returns (slope, intercept, r_squared)."""
    lx = np.log2(np.asarray(x, dtype=np.float64))
    ly = np.log2(np.asarray(y, dtype=np.float64))
    mx, my = lx.mean(), ly.mean()
    dx, dy = lx - mx, ly - my
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise FitError("all x values are identical")
    slope = float(np.dot(dx, dy)) / sxx
    intercept = float(my - slope * mx)
    syy = float(np.dot(dy, dy))
    resid = ly - (intercept + slope * lx)
    r2 = 1.0 if syy == 0.0 else 1.0 - float(np.dot(resid, resid)) / syy
    return slope, intercept, r2


@dataclass(frozen=True)
class ZipfFit:
    alpha: float
    C: float
    log2_intercept: float
    r_squared: float
    ranks: tuple
    freqs: tuple

    @property
    def points(self) -> list:
        return [(float(np.log2(r)), float(np.log2(f))) for r, f in zip(self.ranks, self.freqs)]

    def predict(self, rank):
        return 2.0 ** self.log2_intercept * np.asarray(rank, dtype=np.float64) ** (-self.alpha)

    def summary(self) -> dict:
        return {"alpha": self.alpha, "C": self.C, "log2_intercept": self.log2_intercept,
                "r_squared": self.r_squared, "n_points": len(self.ranks)}


@dataclass(frozen=True)
class HeapFit:
    k: float
    beta: float
    r_squared: float
    ns: tuple
    vs: tuple

    @property
    def points(self) -> list:
        return [(float(np.log2(n)), float(np.log2(v))) for n, v in zip(self.ns, self.vs)]

    def predict(self, n):
        return self.k * np.asarray(n, dtype=np.float64) ** self.beta

    def summary(self) -> dict:
        return {"k": self.k, "beta": self.beta, "r_squared": self.r_squared,
                "n_points": len(self.ns)}


def zipf_fit_frequencies(freqs, min_freq: float | None = None) -> ZipfFit:
    """Fit F(r) = C' r^-alpha to frequencies (sorted descending here)."""
    freqs = sorted((f for f in freqs if f > 0), reverse=True)
    if min_freq is not None:
        freqs = [f for f in freqs if f >= min_freq]
    if len(freqs) < 3:
        raise FitError(f"Zipf fit needs at least 3 types, got {len(freqs)}")
    ranks = list(range(1, len(freqs) + 1))
    slope, intercept, r2 = loglog_ols(ranks, freqs)
    return ZipfFit(-slope, freqs[0], intercept, r2, tuple(ranks), tuple(freqs))


def zipf_fit(vocab: VocabTable, min_freq: int | None = None) -> ZipfFit:
    return zipf_fit_frequencies(vocab.entries.values(), min_freq)


def heap_sample_positions(length: int, sample_points: int = DEFAULT_HEAP_POINTS, min_n: int = 1) -> list:
    """Distinct integer prefix lengths spaced uniformly in log n over [min_n, length]."""
    pos = np.unique(np.rint(np.geomspace(min_n, length, sample_points)).astype(np.int64))
    return [int(p) for p in pos]


def vocabulary_growth(tokens, positions) -> list:
    """V(n) at each requested prefix length (positions ascending)."""
    seen = set()
    out = []
    it = iter(positions)
    nxt = next(it, None)
    for i, tok in enumerate(tokens, 1):
        if nxt is None:
            break
        seen.add(tok)
        if i == nxt:
            out.append(len(seen))
            nxt = next(it, None)
    return out


def heap_fit_counts(ns, vs) -> HeapFit:
    """Fit V = k n^beta to measured (n, V(n)) pairs."""
    ns, vs = tuple(ns), tuple(vs)
    if len(ns) < 3:
        raise FitError(f"Heap fit needs at least 3 sample points, got {len(ns)}")
    if len(set(vs)) == 1:
        raise FitError("constant vocabulary")
    slope, intercept, r2 = loglog_ols(ns, vs)
    if not 0 < slope <= 1:
        log.warning("Heap exponent %.4f is outside (0, 1]", slope)
    return HeapFit(float(2.0 ** intercept), slope, r2, ns, vs)


def heap_fit(stream, sample_points: int = DEFAULT_HEAP_POINTS, min_n: int = 1) -> HeapFit:
    """Measure V(n) at log-spaced prefixes of the stream and fit Heap's law.

    ``min_n`` skips the shortest prefixes, where V(n) = n trivially.
    """
    tokens = stream.tokens if hasattr(stream, "tokens") else list(stream)
    if sample_points < 3:
        raise FitError("sample_points must be >= 3")
    if len(tokens) < sample_points:
        raise FitError(f"stream of {len(tokens)} tokens is shorter than {sample_points} sample points")
    if not 1 <= min_n < len(tokens):
        raise FitError(f"min_n must lie in [1, {len(tokens)})")
    ns = heap_sample_positions(len(tokens), sample_points, min_n)
    return heap_fit_counts(ns, vocabulary_growth(tokens, ns))


def _g(x) -> str:
    return repr(float(x))


def emit_plot_data(fit, path) -> None:
    """CSV of observed points and the fitted line.

    Zipf: ``rank,freq,fit_freq``.  Heap: ``n,V,fit_V``.
    """
    if isinstance(fit, ZipfFit):
        header, xs, ys = ("rank", "freq", "fit_freq"), fit.ranks, fit.freqs
    elif isinstance(fit, HeapFit):
        header, xs, ys = ("n", "V", "fit_V"), fit.ns, fit.vs
    else:
        raise TypeError(f"cannot emit plot data for {type(fit).__name__}")
    fitted = fit.predict(xs)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for x, y, yhat in zip(xs, ys, fitted):
            w.writerow([x, y, _g(yhat)])
