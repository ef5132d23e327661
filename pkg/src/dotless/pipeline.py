"""Corpus-level jobs behind the ``stats``, ``laws`` and ``lm-train`` commands.

Work is split into independent (corpus, scheme, dottedness) jobs.  Jobs may
run in a process pool; results are gathered by key and written in sorted
order, so the output never depends on the worker count.
"""
from __future__ import annotations

import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import laws, ngram, stats
from .corpus_io import Corpus, SplitSpec, filter_samples, load_corpora, split_indices
from .script import ARABIC, STRICT_UNDOT_RULE, UNDOT_RULE, preprocess
from .tokenizers import (CHARACTER, DEFAULT_MORPH_DELIMITER, DISJOINT, MORPH, SPACE_TOKEN,
                         WORD, _DISJOINT_PIECE, count_words, expand_word_counts,
                         parse_morph_lines,
                         read_morph_lines, tokenize, undot_lines, undot_word_counts,
                         validate_morph_lines)

log = logging.getLogger(__name__)

DOTTED, DOTLESS = "dotted", "dotless"


@dataclass(frozen=True)
class PreparedCorpus:
    """Preprocessed samples of one corpus plus optional morphological segmentation."""

    name: str
    lines: tuple
    morph_lines: tuple | None = None
    dropped_empty: int = 0

    def view(self, scheme: str, dotted: bool, overrides: bool = True,
             delimiter: str = DEFAULT_MORPH_DELIMITER, isolated: bool = False) -> list:
        """Scheme-ready lines, undotted when ``dotted`` is false."""
        if scheme == MORPH:
            if self.morph_lines is None:
                raise ValueError(f"{self.name}: morph_adapter needs a segmentation companion file")
            lines = self.morph_lines
        else:
            lines = self.lines
        if dotted:
            return list(lines)
        rule = UNDOT_RULE if overrides else STRICT_UNDOT_RULE
        return undot_lines(lines, scheme, rule, delimiter, isolated)


def preprocess_corpus(corpus: Corpus) -> tuple:
    """(preprocessed corpus, number of samples that became empty)."""
    out = [preprocess(s, corpus.language_mode) for s in corpus.samples]
    kept = [s for s in out if s]
    dropped = len(out) - len(kept)
    if dropped:
        log.info("%s: %d samples empty after preprocessing were dropped", corpus.name, dropped)
    return corpus.with_samples(kept), dropped


def prepare(paths, name=None, language_mode: str = ARABIC, morph_paths=None,
            delimiter: str = DEFAULT_MORPH_DELIMITER, min_tokens: int = 0,
            max_tokens: int | None = None, split_on_sentence_dot: bool = False) -> PreparedCorpus:
    """Load, preprocess and length-filter one (possibly aggregated) corpus.

    Morph companion files hold one segmented line per preprocessed sample;
    they are validated against the samples and filtered alongside them.
    """
    corpus = load_corpora(paths, language_mode, name, split_on_sentence_dot=split_on_sentence_dot)
    corpus, dropped = preprocess_corpus(corpus)
    morph = None
    if morph_paths:
        seg = [ln for p in morph_paths for ln in read_morph_lines(p)]
        validate_morph_lines(seg, corpus.samples, delimiter)
        morph = seg
    if min_tokens or max_tokens is not None:
        filtered = filter_samples(corpus, min_tokens, max_tokens)
        if morph is not None:
            hi = float("inf") if max_tokens is None else max_tokens
            morph = [m for s, m in zip(corpus.samples, morph) if min_tokens <= len(s.split()) <= hi]
        corpus = filtered
    return PreparedCorpus(corpus.name, corpus.samples, tuple(morph) if morph is not None else None, dropped)


def iter_tokens(lines, scheme: str, include_space: bool = False,
                delimiter: str = DEFAULT_MORPH_DELIMITER):
    """Tokens of all lines in corpus order (the stream behind Heap fits)."""
    for line in lines:
        if scheme == WORD:
            yield from line.split()
        elif scheme == CHARACTER:
            for c in line:
                if c != " ":
                    yield c
                elif include_space:
                    yield SPACE_TOKEN
        elif scheme == DISJOINT:
            yield from _DISJOINT_PIECE.findall(line)
        else:
            for word in line.split():
                yield from (p for p in word.split(delimiter) if p)


@dataclass(frozen=True)
class Options:
    overrides: bool = True
    isolated: bool = False
    delimiter: str = DEFAULT_MORPH_DELIMITER
    include_space: bool = False
    top_fraction: float = stats.DEFAULT_TOP_FRACTION
    curve_points: tuple = stats.DEFAULT_CURVE_POINTS
    heap_points: int = laws.DEFAULT_HEAP_POINTS
    heap_min_n: int = 1
    zipf_min_freq: int | None = None
    orders: tuple = (2, 3, 4, 5, 6)
    simple_kn: bool = False
    discount: float = ngram.DEFAULT_DISCOUNT
    include_eos: bool = True
    split: SplitSpec = field(default_factory=SplitSpec)


# ---- jobs ------------------------------------------------------------------

_CORPORA: dict = {}


def _init_worker(corpora):
    _CORPORA.clear()
    _CORPORA.update(corpora)


def _vocab(pc: PreparedCorpus, scheme: str, dotted: bool, opts: Options) -> stats.VocabTable:
    # word frequencies first; undotting and scheme splitting then work per type
    lines = pc.view(scheme, True)
    words = count_words(lines)
    if not dotted:
        rule = UNDOT_RULE if opts.overrides else STRICT_UNDOT_RULE
        words = undot_word_counts(words, scheme, rule, opts.delimiter, opts.isolated)
    spaces = 0
    if opts.include_space and scheme == CHARACTER:
        spaces = sum(len(ln.split()) - 1 for ln in lines if ln)
    counts = expand_word_counts(words, scheme, opts.delimiter, spaces)
    return stats.VocabTable.from_counts(counts, scheme, dotted)


def stats_job(key, opts: Options):
    name, scheme, dottedness = key
    pc = _CORPORA[name]
    dotted = dottedness == DOTTED
    vocab = _vocab(pc, scheme, dotted, opts)
    report = stats.stats_report(vocab, name, opts.top_fraction)
    curve = None
    if dotted:
        rule = UNDOT_RULE if opts.overrides else STRICT_UNDOT_RULE
        curve = stats.dotless_ratio_curve(vocab, opts.curve_points, rule)
    return key, (report, curve)


def laws_job(key, opts: Options):
    name, scheme, dottedness = key
    pc = _CORPORA[name]
    dotted = dottedness == DOTTED
    vocab = _vocab(pc, scheme, dotted, opts)
    zipf = laws.zipf_fit(vocab, opts.zipf_min_freq)
    lines = pc.view(scheme, dotted, opts.overrides, opts.delimiter, opts.isolated)
    tokens = list(iter_tokens(lines, scheme, opts.include_space, opts.delimiter))
    heap = laws.heap_fit(tokens, min(opts.heap_points, len(tokens)), opts.heap_min_n)
    return key, (zipf, heap)


def lm_samples(pc: PreparedCorpus, scheme: str, dotted: bool, opts: Options, indices) -> list:
    lines = pc.view(scheme, dotted, opts.overrides, opts.delimiter, opts.isolated)
    chosen = [lines[i] for i in indices]
    if scheme == MORPH:
        stream = parse_morph_lines(chosen, opts.delimiter)
    else:
        stream = tokenize(chosen, scheme)
    return [s for s in stream.samples() if s]


@dataclass(frozen=True)
class LMResult:
    reports: tuple
    distinct_ngrams: dict
    oov_tokens: int
    oov_types: int
    test_tokens: int
    discounts: dict


def lm_job(key, opts: Options, keep_models: bool = False):
    name, scheme, dottedness = key
    pc = _CORPORA[name]
    dotted = dottedness == DOTTED
    train_idx, _, test_idx = split_indices(len(pc.lines), opts.split)
    train = lm_samples(pc, scheme, dotted, opts, train_idx)
    test = lm_samples(pc, scheme, dotted, opts, test_idx)
    max_order = max(opts.orders)
    counts = ngram.count_ngrams(train, max_order)
    train_vocab = set(g[0] for g in counts[1]) - {ngram.BOS, ngram.EOS}
    oov_tokens, oov_types = ngram.oov_stats(train_vocab, test)
    reports, discounts, models = [], {}, {}
    for order in opts.orders:
        model = ngram.estimate_kn(counts, order, simple=opts.simple_kn, discount=opts.discount)
        reports.append(ngram.perplexity(model, test, opts.include_eos))
        discounts[order] = model.discounts
        if keep_models:
            models[order] = model
    result = LMResult(tuple(reports), counts.distinct_counts(), oov_tokens, oov_types,
                      sum(len(s) for s in test), discounts)
    return key, (result, models)


def run_jobs(fn, keys, corpora: dict, workers: int = 1, **kwargs) -> dict:
    """Run ``fn(key, **kwargs)`` for every key; results keyed, order-independent."""
    keys = sorted(keys)
    if workers <= 1 or len(keys) <= 1:
        _init_worker(corpora)
        return dict(fn(k, **kwargs) for k in keys)
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_init_worker,
                             initargs=(corpora,)) as pool:
        futures = [pool.submit(fn, k, **kwargs) for k in keys]
        return dict(f.result() for f in futures)
