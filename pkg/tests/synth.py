"""Synthetic Arabic-like corpora for tests and acceptance checks."""
from __future__ import annotations

import random

from dotless.script import ALPHABET

LETTERS = "".join(sorted(ALPHABET.dotted_letters))


def random_word(rng: random.Random, min_len: int = 1, max_len: int = 7) -> str:
    return "".join(rng.choice(LETTERS) for _ in range(rng.randint(min_len, max_len)))


def lexicon(rng: random.Random, size: int) -> list:
    words = set()
    while len(words) < size:
        words.add(random_word(rng, 2, 8))
    return sorted(words)


def zipf_sampler(rng: random.Random, words, alpha: float = 1.0):
    weights = [1.0 / (r ** alpha) for r in range(1, len(words) + 1)]
    shuffled = list(words)
    rng.shuffle(shuffled)
    def sample(k):
        return rng.choices(shuffled, weights=weights, k=k)
    return sample


def corpus_lines(seed: int, n_lines: int, vocab: int = 300, min_words: int = 3,
                 max_words: int = 12, alpha: float = 1.0) -> list:
    rng = random.Random(seed)
    sample = zipf_sampler(rng, lexicon(rng, vocab), alpha)
    return [" ".join(sample(rng.randint(min_words, max_words))) for _ in range(n_lines)]


def morph_segment(line: str, delimiter: str = "+") -> str:
    """Split off a leading waw and the definite article as prefixes."""
    out = []
    for w in line.split():
        parts = []
        if w.startswith("و") and len(w) > 2:
            parts.append("و")
            w = w[1:]
        if w.startswith("ال") and len(w) > 3:
            parts.append("ال")
            w = w[2:]
        parts.append(w)
        out.append(delimiter.join(parts))
    return " ".join(out)


def growth_stream(v_of_n, length):
    """Tokens such that the number of distinct types after n tokens is v_of_n(n)."""
    tokens, v = [], 0
    for n in range(1, length + 1):
        if v_of_n(n) > v:
            v += 1
            tokens.append(f"t{v}")
        else:
            tokens.append("t1")
    return tokens


def big_corpus(seed: int, n_tokens: int, vocab: int = 50_000, alpha: float = 1.0,
               line_words: tuple = (4, 14)) -> tuple:
    """(text, segmented text) with ``n_tokens`` Zipf-distributed words.

    Built in bulk, so ten million tokens take seconds.
    """
    rng = random.Random(seed)
    words = lexicon(rng, vocab)
    rng.shuffle(words)
    weights = [1.0 / (r ** alpha) for r in range(1, vocab + 1)]
    ids = rng.choices(range(vocab), weights=weights, k=n_tokens)
    segmented = [morph_segment(w) for w in words]
    lines, seg, i = [], [], 0
    while i < n_tokens:
        k = rng.randint(*line_words)
        chunk = ids[i:i + k]
        lines.append(" ".join([words[j] for j in chunk]))
        seg.append(" ".join([segmented[j] for j in chunk]))
        i += k
    return "\n".join(lines) + "\n", "\n".join(seg) + "\n"
