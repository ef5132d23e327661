import csv
import json

import pytest
from synth import corpus_lines, morph_segment

from dotless.cli import main


def _tsv(path):
    with open(path, encoding="utf-8") as f:
        return list(csv.DictReader(f, delimiter="\t"))


@pytest.fixture(scope="module")
def corpora(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpora")
    paths = {}
    for name, seed, n in (("news", 1, 120), ("poems", 2, 80)):
        lines = corpus_lines(seed, n, vocab=150)
        (d / f"{name}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        (d / f"{name}.seg").write_text("\n".join(map(morph_segment, lines)) + "\n", encoding="utf-8")
        paths[name] = (d / f"{name}.txt", d / f"{name}.seg")
    return paths


def test_alphabet_dump(tmp_path, capsys):
    assert main(["alphabet", "dump"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert (data["dotted_count"], data["dotless_count"]) == (31, 19)


def test_undot_line_aligned(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("أهمَ بيتٌ!\n\nمن قلم\n", encoding="utf-8")
    out = tmp_path / "out.txt"
    assert main(["undot", str(src), "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == "اهم ٮٮٮ\n\nمں ڡلم\n"
    again = tmp_path / "again.txt"
    assert main(["undot", str(out), "-o", str(again)]) == 0
    assert again.read_text(encoding="utf-8") == out.read_text(encoding="utf-8")


def test_undot_fixed_points(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("الم\nلام\n", encoding="utf-8")
    out = tmp_path / "out.txt"
    assert main(["undot", str(src), "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == src.read_text(encoding="utf-8")


def test_tokenize_with_vocab(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("مدرسة والكتاب\n", encoding="utf-8")
    out, vocab = tmp_path / "tok.txt", tmp_path / "vocab.tsv"
    assert main(["tokenize", str(src), "--scheme", "disjoint", "-o", str(out), "--vocab", str(vocab)]) == 0
    assert out.read_text(encoding="utf-8").split() == ["مد", "ر", "سة", "و", "ا", "لكتا", "ب"]
    rows = _tsv(vocab)
    assert [r["id"] for r in rows] == [str(i) for i in range(7)]


def test_split_command(tmp_path, corpora):
    out = tmp_path / "splits"
    assert main(["split", str(corpora["news"][0]), "-o", str(out)]) == 0
    train = (out / "news.train.txt").read_text(encoding="utf-8").splitlines()
    test = (out / "news.test.txt").read_text(encoding="utf-8").splitlines()
    assert (len(train), len(test)) == (108, 12)
    assert (out / "run.json").exists()


def test_stats_two_corpora_and_aggregate(tmp_path, corpora):
    out = tmp_path / "stats"
    args = ["stats", str(corpora["news"][0]), str(corpora["poems"][0]), "--aggregate",
            "--morph", str(corpora["news"][1]), "--morph", str(corpora["poems"][1]), "-o", str(out)]
    assert main(args) == 0
    rows = _tsv(out / "stats.tsv")
    assert len(rows) == 3 * 4 * 2
    for scheme in ("word", "character", "disjoint", "morph_adapter"):
        n = {r["corpus"]: int(r["N"]) for r in rows if r["scheme"] == scheme and r["dottedness"] == "dotted"}
        assert n["aggregated"] == n["news"] + n["poems"]
    for r in _tsv(out / "compare.tsv"):
        assert float(r["H_dotless"]) <= float(r["H"])
        assert int(r["V_dotless"]) <= int(r["V"])
    assert (out / "curves" / "news.word.ratio.csv").exists()
    run = json.loads((out / "run.json").read_text())
    assert run["config"]["seed"] == 42 and "version" in run


def test_missing_morph_companion_fails_cleanly(tmp_path, corpora, capsys):
    out = tmp_path / "bad"
    assert main(["stats", str(corpora["news"][0]), "--scheme", "morph_adapter", "-o", str(out)]) == 1
    assert "morph" in capsys.readouterr().err
    assert not out.exists()
    assert not any(p.name.startswith(".bad") for p in tmp_path.iterdir())


def test_laws_outputs(tmp_path, corpora):
    out = tmp_path / "laws"
    assert main(["laws", str(corpora["news"][0]), "--scheme", "word", "-o", str(out)]) == 0
    rows = _tsv(out / "laws.tsv")
    assert len(rows) == 2
    assert all(float(r["zipf_alpha"]) > 0 for r in rows)
    header = (out / "plots" / "news.word.dotted.zipf.csv").read_text().splitlines()[0]
    assert header == "rank,freq,fit_freq"
    header = (out / "plots" / "news.word.dotless.heap.csv").read_text().splitlines()[0]
    assert header == "n,V,fit_V"


def test_lm_train_sweep_and_eval(tmp_path, corpora):
    out = tmp_path / "lm"
    args = ["lm-train", str(corpora["news"][0]), "--scheme", "word", "--scheme", "char",
            "--save-models", "-o", str(out)]
    assert main(args) == 0
    ppl = _tsv(out / "lm_ppl.tsv")
    assert [r["order"] for r in ppl if r["scheme"] == "word"] == ["2", "3", "4", "5", "6"]
    assert all(float(r["dotted_ppl"]) >= 1 and float(r["dotless_ppl"]) >= 1 for r in ppl)
    for r in _tsv(out / "lm_oov.tsv"):
        assert int(r["dotless_oov_tokens"]) <= int(r["dotted_oov_tokens"])
    counts = _tsv(out / "ngram_counts.tsv")
    assert len(counts) == 2 * 2 * 6

    model = out / "models" / "news.word.dotted.3.arpa"
    report = tmp_path / "eval.json"
    assert main(["lm-eval", str(model), str(corpora["news"][0]), "-o", str(report)]) == 0
    from_arpa = json.loads(report.read_text())
    assert main(["lm-eval", str(model.with_suffix(".bin")), str(corpora["news"][0]), "-o", str(report)]) == 0
    from_bin = json.loads(report.read_text())
    assert from_arpa["ppl"] == pytest.approx(from_bin["ppl"], rel=1e-9)
    assert from_arpa["order"] == 3


def _snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_rerun_and_workers_identical(tmp_path, corpora):
    base = ["compare", str(corpora["news"][0]), str(corpora["poems"][0]), "--aggregate",
            "--max-order", "3", "--save-models"]
    assert main(base + ["-o", str(tmp_path / "a")]) == 0
    assert main(base + ["-o", str(tmp_path / "b")]) == 0
    assert main(base + ["-o", str(tmp_path / "c"), "--workers", "3"]) == 0
    a = _snapshot(tmp_path / "a")
    assert a == _snapshot(tmp_path / "b")
    assert a == _snapshot(tmp_path / "c")
    assert {"stats.tsv", "laws.tsv", "lm_ppl.tsv", "run.json"} <= set(a)


def test_bad_split_exit_code(tmp_path, corpora):
    assert main(["split", str(corpora["news"][0]), "-o", str(tmp_path / "s"), "--valid", "0.1"]) == 1


def test_tokenize_isolated_chars(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("من\n", encoding="utf-8")
    out = tmp_path / "tok.txt"
    assert main(["tokenize", str(src), "--scheme", "char", "--undot", "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8").split() == ["م", "ں"]
    src.write_text("نم\n", encoding="utf-8")
    assert main(["tokenize", str(src), "--scheme", "char", "--undot", "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8").split() == ["ٮ", "م"]
    assert main(["tokenize", str(src), "--scheme", "char", "--undot", "--isolated-token-undot",
                 "-o", str(out)]) == 0
    assert out.read_text(encoding="utf-8").split() == ["ں", "م"]
