"""Interpolated Kneser-Ney n-gram language models.

Counting pads every sample with one ``<s>`` and one ``</s>``.  Estimation
follows the usual interpolated modified Kneser-Ney recipe:

* the highest order keeps raw counts; lower orders use continuation counts
  (number of distinct left extensions), except n-grams starting with ``<s>``
  which cannot be extended and keep their raw counts;
* each order has three discounts D1, D2, D3+ estimated from its
  count-of-counts (``simple=True`` uses one fixed discount instead);
* the unigram distribution is interpolated with a uniform distribution over
  the vocabulary plus ``<unk>``, so every token gets non-zero mass.

Probabilities are natural-log internally.
"""
from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .tokenizers import TokenStream

log = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
MIN_ORDER, MAX_ORDER = 2, 6
DEFAULT_DISCOUNT = 0.75


class NgramError(ValueError):
    pass


def _samples(data):
    """Normalize a TokenStream, a single token list or a list of samples."""
    if isinstance(data, TokenStream):
        return [tuple(s) for s in data.samples()]
    data = list(data)
    if data and isinstance(data[0], str):
        return [tuple(data)]
    return [tuple(s) for s in data]


@dataclass
class NgramCounts:
    """Raw k-gram counts for k = 1..order, keyed by token tuples."""

    order: int
    tables: list = field(default_factory=list)

    def __post_init__(self):
        if not self.tables:
            self.tables = [Counter() for _ in range(self.order + 1)]

    def __getitem__(self, k: int) -> Counter:
        return self.tables[k]

    def add_sample(self, tokens) -> None:
        padded = (BOS,) + tuple(tokens) + (EOS,)
        n = len(padded)
        for k in range(1, self.order + 1):
            table = self.tables[k]
            for i in range(n - k + 1):
                table[padded[i:i + k]] += 1

    def merge(self, other: "NgramCounts") -> "NgramCounts":
        if other.order != self.order:
            raise NgramError("cannot merge counts of different orders")
        merged = NgramCounts(self.order)
        for k in range(1, self.order + 1):
            merged.tables[k].update(self.tables[k])
            merged.tables[k].update(other.tables[k])
        return merged

    def distinct(self, k: int) -> int:
        return len(self.tables[k])

    def distinct_counts(self) -> dict:
        return {k: self.distinct(k) for k in range(1, self.order + 1)}


def count_ngrams(train, order: int, max_order: int = MAX_ORDER) -> NgramCounts:
    """Count all k-grams, k = 1..order, of every padded sample."""
    if not 1 <= order <= max_order:
        raise NgramError(f"order must be in [1, {max_order}], got {order}")
    samples = _samples(train)
    if not samples:
        raise NgramError("cannot count n-grams of an empty stream")
    counts = NgramCounts(order)
    for s in samples:
        counts.add_sample(s)
    return counts


def adjusted_counts(counts: NgramCounts, order: int) -> list:
    """Kneser-Ney counts: raw at ``order``, continuation counts below."""
    adj = [Counter() for _ in range(order + 1)]
    adj[order] = Counter(counts[order])
    for k in range(order - 1, 0, -1):
        table = adj[k]
        for g in counts[k + 1]:
            table[g[1:]] += 1
        for g, c in counts[k].items():
            if g[0] == BOS:
                table[g] = c
    del adj[1][(BOS,)]
    return adj


def modified_discounts(adj_table) -> tuple | None:
    """(D1, D2, D3+) from count-of-counts, or None when undefined."""
    coc = Counter(c for c in adj_table.values() if c <= 4)
    n1, n2, n3, n4 = (coc[i] for i in (1, 2, 3, 4))
    if not (n1 and n2 and n3 and n4):
        return None
    y = n1 / (n1 + 2 * n2)
    d = (1 - 2 * y * n2 / n1, 2 - 3 * y * n3 / n2, 3 - 4 * y * n4 / n3)
    if not all(0 <= dj < j for j, dj in enumerate(d, 1)):
        return None
    return d


@dataclass
class NgramModel:
    order: int
    vocab: frozenset
    discounts: dict
    # per order k: context tuple -> backoff weight gamma
    backoff: list
    # per order k: k-gram -> discounted probability mass
    alpha: list
    counts: NgramCounts
    simple: bool = False

    @property
    def V(self) -> int:
        """Predictable types (training types plus </s>), excluding <unk>."""
        return len(self.vocab)

    def _uniform(self) -> float:
        return 1.0 / (self.V + 1)

    def prob(self, word: str, context=()) -> float:
        """p(word | context) using at most order-1 context tokens."""
        if word not in self.vocab:
            word = UNK
        context = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        p = self._uniform()
        for k in range(1, len(context) + 2):
            h = context[len(context) - (k - 1):] if k > 1 else ()
            gamma = self.backoff[k].get(h)
            if gamma is None:
                break
            p = self.alpha[k].get(h + (word,), 0.0) + gamma * p
        return p

    def logprob_token(self, word: str, context=()) -> float:
        return math.log(self.prob(word, context))

    def score_sample(self, tokens, include_eos: bool = True) -> list:
        """Natural-log probability of each token (and of </s>) in one sample."""
        history = [BOS]
        out = []
        targets = list(tokens) + ([EOS] if include_eos else [])
        for w in targets:
            out.append(self.logprob_token(w, history))
            history.append(w if w in self.vocab else UNK)
        return out

    def conditional(self, context=()) -> dict:
        """Full distribution over vocab and <unk> for a context."""
        dist = {w: self.prob(w, context) for w in self.vocab}
        dist[UNK] = self.prob(UNK, context)
        return dist

    def contexts(self, k: int):
        return self.backoff[k].keys()


def estimate_kn(counts: NgramCounts, order: int | None = None, simple: bool = False,
                discount: float = DEFAULT_DISCOUNT, min_order: int = MIN_ORDER) -> NgramModel:
    """Estimate an interpolated Kneser-Ney model from complete counts.

    With ``simple`` every order uses the single fixed ``discount``;
    otherwise three count-of-count discounts per order, falling back to
    ``discount`` when the count-of-counts are degenerate.
    """
    order = counts.order if order is None else order
    if not min_order <= order <= MAX_ORDER:
        raise NgramError(f"order must be in [{min_order}, {MAX_ORDER}], got {order}")
    if order > counts.order:
        raise NgramError(f"counts only go up to order {counts.order}")
    if not 0 < discount < 1:
        raise NgramError("discount must be in (0, 1)")
    adj = adjusted_counts(counts, order)
    vocab = frozenset(g[0] for g in adj[1])
    discounts, backoff, alpha = {}, [None], [None]
    for k in range(1, order + 1):
        table = adj[k]
        d = None if simple else modified_discounts(table)
        if d is None:
            if not simple:
                log.warning("order %d: degenerate count-of-counts, using discount %.2f", k, discount)
            d = (discount, discount, discount)
        discounts[k] = d
        denom = defaultdict(int)
        removed = defaultdict(float)
        for g, c in table.items():
            h = g[:-1]
            denom[h] += c
            removed[h] += d[min(c, 3) - 1]
        gammas = {h: removed[h] / denom[h] for h in denom}
        masses = {g: (c - d[min(c, 3) - 1]) / denom[g[:-1]] for g, c in table.items()}
        backoff.append(gammas)
        alpha.append(masses)
    return NgramModel(order, vocab, discounts, backoff, alpha, counts, simple)


def train_kn(train, order: int, simple: bool = False, discount: float = DEFAULT_DISCOUNT) -> NgramModel:
    return estimate_kn(count_ngrams(train, order), order, simple=simple, discount=discount)


class UniformModel:
    """Scores every token as 1/|V|; a reference point for perplexity."""

    def __init__(self, vocab):
        self.vocab = frozenset(vocab)
        self._lp = -math.log(len(self.vocab))

    def score_sample(self, tokens, include_eos: bool = True) -> list:
        n = len(tokens) + (1 if include_eos else 0)
        return [self._lp] * n


def logprob(model, tokens, include_eos: bool = True) -> float:
    """Total natural-log probability of one sample."""
    tokens = list(tokens)
    if not tokens:
        raise NgramError("empty sequence")
    return math.fsum(model.score_sample(tokens, include_eos))


@dataclass(frozen=True)
class EvalReport:
    ppl: float
    token_count: int
    oov_tokens: int
    oov_types: int
    logprob: float
    order: int | None = None


def oov_stats(train_vocab, test) -> tuple:
    """(OOV token count, OOV type count) of ``test`` against a training vocabulary."""
    scheme = getattr(train_vocab, "scheme", "")
    if isinstance(test, TokenStream) and scheme and test.scheme != scheme:
        raise NgramError(f"scheme mismatch: {scheme} vs {test.scheme}")
    known = train_vocab.entries if hasattr(train_vocab, "entries") else set(train_vocab)
    oov = Counter(t for s in _samples(test) for t in s if t not in known)
    return sum(oov.values()), len(oov)


def perplexity(model, test, include_eos: bool = True) -> EvalReport:
    """exp of the mean negative log-likelihood over scored tokens.

    Every sample token is scored; ``</s>`` is scored too unless
    ``include_eos`` is false.  ``<s>`` is context only.
    """
    samples = _samples(test)
    if not samples:
        raise NgramError("empty test set")
    total, n = [], 0
    for s in samples:
        scores = model.score_sample(s, include_eos)
        total.extend(scores)
        n += len(scores)
    if n == 0:
        raise NgramError("no tokens to score")
    known = model.vocab
    oov = Counter(t for s in samples for t in s if t not in known)
    lp = math.fsum(total)
    return EvalReport(
        ppl=math.exp(-lp / n),
        token_count=n,
        oov_tokens=sum(oov.values()),
        oov_types=len(oov),
        logprob=lp,
        order=getattr(model, "order", None),
    )


def mle_logprob(counts: NgramCounts, order: int, test, include_eos: bool = True) -> tuple:
    """Unsmoothed maximum-likelihood log-probability: (total nats, tokens scored).

    Raises NgramError on any n-gram unseen in ``counts``.
    """
    if not 1 <= order <= counts.order:
        raise NgramError(f"order must be in [1, {counts.order}]")
    # context totals per order; shorter orders serve the first tokens of a
    # sample, whose whole history is shorter than order - 1
    lower = {}
    for k in range(1, order + 1):
        tot = Counter()
        for g, c in counts[k].items():
            if g != (BOS,):
                tot[g[:-1]] += c
        lower[k] = tot

    total, n = [], 0
    for s in _samples(test):
        padded = (BOS,) + tuple(s) + ((EOS,) if include_eos else ())
        for i in range(1, len(padded)):
            k = min(order, i + 1)
            g = padded[i - k + 1:i + 1]
            c = counts[k].get(g, 0)
            if c == 0:
                raise NgramError(f"unseen n-gram {g!r}")
            total.append(math.log(c / lower[k][g[:-1]]))
            n += 1
    return math.fsum(total), n


def mle_cross_entropy(counts: NgramCounts, order: int, test, include_eos: bool = True) -> float:
    lp, n = mle_logprob(counts, order, test, include_eos)
    return -lp / n
