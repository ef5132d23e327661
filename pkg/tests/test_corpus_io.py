import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from dotless.corpus_io import (Corpus, CorpusError, SplitSpec, filter_samples, load_corpora,
                               load_corpus, split_corpus, split_lines, split_sizes, write_splits)


def _write(tmp_path, name, data: bytes):
    p = tmp_path / name
    p.write_bytes(data)
    return p


def test_load_drops_empty_lines(tmp_path):
    p = _write(tmp_path, "c.txt", "ابجد\n\nهوز\n".encode())
    corpus = load_corpus(p)
    assert corpus.samples == ("ابجد", "هوز")
    assert corpus.name == "c"


def test_empty_file_warns(tmp_path, caplog):
    p = _write(tmp_path, "empty.txt", b"")
    corpus = load_corpus(p)
    assert len(corpus) == 0
    assert "empty" in caplog.text.lower() or "0 samples" in caplog.text


def test_crlf_matches_lf(tmp_path):
    text = "ابجد هوز\n  حطي  \nكلمن\n"
    lf = load_corpus(_write(tmp_path, "lf.txt", text.encode()))
    crlf = load_corpus(_write(tmp_path, "crlf.txt", text.replace("\n", "\r\n").encode()))
    assert lf.samples == crlf.samples


def test_invalid_utf8_reports_offset(tmp_path):
    p = _write(tmp_path, "bad.txt", b"ab\n\xff\xfe")
    with pytest.raises(CorpusError, match="offset 3"):
        load_corpus(p)


def test_missing_file(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "nope.txt")


def test_sentence_dot_splitting():
    assert split_lines("اب. جد۔ هو\nزح") == ["اب. جد۔ هو", "زح"]
    assert split_lines("اب. جد۔ هو\nزح", split_on_sentence_dot=True) == ["اب", "جد", "هو", "زح"]


def test_load_corpora_concatenates_in_order(tmp_path):
    a = _write(tmp_path, "a.txt", "اب\n".encode())
    b = _write(tmp_path, "b.txt", "جد\nهو\n".encode())
    agg = load_corpora([b, a])
    assert agg.samples == ("جد", "هو", "اب")
    assert agg.name == "aggregated"


def test_filter_samples():
    corpus = Corpus(tuple(" ".join(["ا"] * n) for n in (5, 30, 40)), "c")
    assert len(filter_samples(corpus, min_tokens=30)) == 2
    assert filter_samples(corpus) == corpus
    assert len(filter_samples(corpus, 0, 30)) == 2


def test_filter_matches_independent_scan():
    rng = random.Random(3)
    samples = tuple(" ".join(["ب"] * rng.randint(1, 60)) for _ in range(1000))
    kept = filter_samples(Corpus(samples, "c"), min_tokens=30)
    assert len(kept) == sum(1 for s in samples if len(s.split()) >= 30)


@given(st.lists(st.integers(1, 50), max_size=40), st.integers(0, 50))
def test_filter_idempotent(lengths, lo):
    corpus = Corpus(tuple(" ".join(["ت"] * n) for n in lengths), "c")
    once = filter_samples(corpus, lo)
    assert filter_samples(once, lo) == once


def test_split_90_10():
    corpus = Corpus(tuple(f"s{i}" for i in range(10)), "c")
    train, valid, test = split_corpus(corpus, SplitSpec(0.9, 0.0, 0.1, seed=42))
    assert (len(train), len(valid), len(test)) == (9, 0, 1)
    assert split_corpus(corpus, SplitSpec(0.9, 0.0, 0.1, seed=42)) == (train, valid, test)
    assert train.name == "c.train" and test.name == "c.test"


def test_split_85_5_10_is_partition():
    samples = tuple(f"s{i % 97}" for i in range(1000))
    parts = split_corpus(Corpus(samples, "c"), SplitSpec(0.85, 0.05, 0.10))
    assert [len(p) for p in parts] == [850, 50, 100]
    assert Counter(s for p in parts for s in p.samples) == Counter(samples)


def test_no_shuffle_is_sequential():
    corpus = Corpus(tuple(f"s{i}" for i in range(10)), "c")
    train, _, test = split_corpus(corpus, SplitSpec(0.8, 0.0, 0.2, shuffle=False))
    assert train.samples == corpus.samples[:8]
    assert test.samples == corpus.samples[8:]


def test_split_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(0.9, 0.1, 0.1)
    with pytest.raises(ValueError):
        SplitSpec(0.0, 0.0, 1.0)


def test_split_too_small():
    with pytest.raises(CorpusError):
        split_corpus(Corpus(("a",), "c"), SplitSpec(0.9, 0.0, 0.1))


@settings(max_examples=200)
@given(st.integers(2, 3000), st.sampled_from([(0.9, 0.0, 0.1), (0.85, 0.05, 0.1), (0.5, 0.25, 0.25)]))
def test_split_sizes_within_one_sample(n, fractions):
    spec = SplitSpec(*fractions)
    try:
        sizes = split_sizes(n, spec)
    except CorpusError:
        return
    assert sum(sizes) == n
    for size, frac in zip(sizes, fractions):
        assert abs(size - frac * n) <= 1


def test_write_splits(tmp_path):
    corpus = Corpus(tuple(f"s{i}" for i in range(20)), "news")
    parts = split_corpus(corpus, SplitSpec(0.8, 0.1, 0.1))
    write_splits(parts, tmp_path, "news")
    for suffix, part in zip(("train", "valid", "test"), parts):
        text = (tmp_path / f"news.{suffix}.txt").read_text(encoding="utf-8")
        assert text.splitlines() == list(part.samples)
