"""Command-line interface: ``dotless <subcommand> ...``.

Every report-producing command writes into one output directory, including a
``run.json`` with the resolved configuration.  Files are first written to a
scratch directory next to it and only moved into place when the command
succeeds.
"""
from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path

from . import __version__, arpa, laws, ngram, stats
from .corpus_io import CorpusError, SplitSpec, load_corpora, split_corpus, split_lines, decode_utf8, write_splits
from .pipeline import (DOTLESS, DOTTED, Options, laws_job, lm_job, prepare,
                       run_jobs, stats_job)
from .script import (ARABIC, LANGUAGE_MODES, STRICT_UNDOT_RULE, UNDOT_RULE, UndotError,
                     dump_alphabet, preprocess, undot)
from .tokenizers import (CHARACTER, DISJOINT, MORPH, SCHEMES, WORD, TokenizationError,
                         canonical_scheme, parse_morph_lines, read_morph_lines, tokenize,
                         undot_stream)

log = logging.getLogger("dotless")

DEFAULT_SCHEMES = (WORD, CHARACTER, DISJOINT)
AGGREGATED = "aggregated"


class CLIError(Exception):
    pass


@contextmanager
def output_dir(path):
    """Scratch directory whose contents replace ``path``'s on success only."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{path.name}.", dir=path.parent))
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    path.mkdir(exist_ok=True)
    for item in sorted(tmp.rglob("*")):
        rel = item.relative_to(tmp)
        dest = path / rel
        if item.is_dir():
            dest.mkdir(exist_ok=True)
        else:
            item.replace(dest)
    shutil.rmtree(tmp, ignore_errors=True)


def _config(args) -> dict:
    # execution-only settings are left out so reruns compare byte for byte
    skip = {"func", "out_dir", "workers", "verbose", "_corpus_order"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"tool": "dotless", "version": __version__, "config": cfg}


def _write_run_json(out: Path, args) -> None:
    with open(out / "run.json", "w", encoding="utf-8") as f:
        json.dump(_config(args), f, ensure_ascii=False, indent=2, sort_keys=True, default=str)
        f.write("\n")


def _read_text(path) -> str:
    if path == "-":
        return decode_utf8(sys.stdin.buffer.read(), "<stdin>")
    try:
        return decode_utf8(Path(path).read_bytes(), str(path))
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _rule(args):
    return STRICT_UNDOT_RULE if args.no_positional_overrides else UNDOT_RULE


# ---- simple commands -------------------------------------------------------

def cmd_alphabet(args) -> None:
    data = dump_alphabet(_rule(args))
    _write_text(args.output, json.dumps(data, ensure_ascii=False, indent=2) + "\n")


def cmd_undot(args) -> None:
    """Line-aligned ``undot(preprocess(line))``; blank lines stay blank."""
    text = _read_text(args.input)
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    rule = _rule(args)
    out = []
    for i, line in enumerate(lines, 1):
        clean = preprocess(line, ARABIC, keep_dotless=True)
        try:
            out.append(undot(clean, rule))
        except UndotError as exc:
            raise CLIError(f"line {i}: {exc}") from exc
    _write_text(args.output, "".join(s + "\n" for s in out))


def cmd_tokenize(args) -> None:
    scheme = canonical_scheme(args.scheme)
    samples = [preprocess(s, args.mode) for s in split_lines(_read_text(args.input))]
    samples = [s for s in samples if s]
    if scheme == MORPH:
        if not args.morph:
            raise CLIError("--morph is required for the morph_adapter scheme")
        seg = read_morph_lines(args.morph)
        stream = parse_morph_lines(seg, args.morph_delimiter, samples)
    else:
        stream = tokenize(samples, scheme)
    if args.undot:
        stream = undot_stream(stream, _rule(args), args.isolated_token_undot)
    _write_text(args.output, stream.to_lines())
    if args.vocab:
        stats.build_vocab(stream, dotted=not args.undot).write_tsv(args.vocab)


def cmd_split(args) -> None:
    corpus = load_corpora(args.inputs, args.mode, args.name,
                          split_on_sentence_dot=args.split_on_sentence_dot)
    spec = SplitSpec(args.train, args.valid, args.test, args.seed, not args.no_shuffle)
    parts = split_corpus(corpus, spec)
    with output_dir(args.out_dir) as out:
        write_splits(parts, out, corpus.name)
        _write_run_json(out, args)
    for part in parts:
        log.info("%s: %d samples", part.name, len(part))


# ---- corpus pipelines ----------------------------------------------------------

def _corpora(args) -> dict:
    paths = list(args.inputs)
    morph = list(args.morph or [])
    if morph and len(morph) != len(paths):
        raise CLIError(f"got {len(morph)} --morph files for {len(paths)} corpora")
    common = dict(language_mode=args.mode, delimiter=args.morph_delimiter,
                  min_tokens=args.min_tokens, max_tokens=args.max_tokens,
                  split_on_sentence_dot=args.split_on_sentence_dot)
    corpora = {}
    names = []
    for i, p in enumerate(paths):
        pc = prepare([p], None, morph_paths=[morph[i]] if morph else None, **common)
        if pc.name in corpora:
            raise CLIError(f"duplicate corpus name {pc.name!r}")
        corpora[pc.name] = pc
        names.append(pc.name)
    if args.aggregate and len(paths) > 1:
        corpora[AGGREGATED] = prepare(paths, AGGREGATED, morph_paths=morph or None, **common)
        names.append(AGGREGATED)
    args._corpus_order = names
    return corpora


def _schemes(args) -> list:
    if args.scheme:
        schemes = [canonical_scheme(s) for s in args.scheme]
    else:
        schemes = list(DEFAULT_SCHEMES) + ([MORPH] if args.morph else [])
    if MORPH in schemes and not args.morph:
        raise CLIError("scheme morph_adapter needs --morph companion files")
    return sorted(set(schemes), key=SCHEMES.index)


def _dottedness(args) -> list:
    return {"both": [DOTTED, DOTLESS], DOTTED: [DOTTED], DOTLESS: [DOTLESS]}[args.dottedness]


def _options(args) -> Options:
    return Options(
        overrides=not args.no_positional_overrides,
        isolated=args.isolated_token_undot,
        delimiter=args.morph_delimiter,
        include_space=args.count_space_token,
        top_fraction=args.top_fraction,
        heap_points=args.heap_points,
        heap_min_n=args.heap_min_n,
        zipf_min_freq=args.min_freq,
        orders=tuple(range(args.min_order, args.max_order + 1)),
        simple_kn=args.kn_simple,
        discount=args.discount,
        include_eos=not args.no_eos,
        split=SplitSpec(args.train, args.valid, args.test, args.seed, not args.no_shuffle),
    )


def _keys(args, corpora):
    schemes, dots = _schemes(args), _dottedness(args)
    return [(c, s, d) for c in corpora for s in schemes for d in dots]


def _ordered(keys, args):
    corpus_rank = {n: i for i, n in enumerate(args._corpus_order)}
    return sorted(keys, key=lambda k: (corpus_rank[k[0]], SCHEMES.index(k[1]), k[2] != DOTTED))


def _stats_outputs(out: Path, args, corpora, opts: Options) -> None:
    results = run_jobs(stats_job, _keys(args, corpora), corpora, args.workers, opts=opts)
    keys = _ordered(results, args)
    reports = [results[k][0] for k in keys]
    stats.write_stats_tsv(out / "stats.tsv", reports)
    comparisons = []
    for k in keys:
        name, scheme, dot = k
        if dot == DOTTED and (name, scheme, DOTLESS) in results:
            comparisons.append(stats.compare_report(results[k][0], results[(name, scheme, DOTLESS)][0]))
    if comparisons:
        stats.write_compare_tsv(out / "compare.tsv", comparisons)
    curves = out / "curves"
    curve_data = {}
    for k in keys:
        curve = results[k][1]
        if curve is not None:
            curves.mkdir(exist_ok=True)
            stats.write_curve_csv(curves / f"{k[0]}.{k[1]}.ratio.csv", curve)
            curve_data[f"{k[0]}.{k[1]}"] = curve
    samples = {n: {"samples": len(pc.lines), "dropped_empty": pc.dropped_empty}
               for n, pc in corpora.items()}
    stats.write_json(out / "stats.json", {"corpora": samples, "reports": reports,
                                          "comparisons": comparisons, "ratio_curves": curve_data})


def _laws_outputs(out: Path, args, corpora, opts: Options) -> None:
    results = run_jobs(laws_job, _keys(args, corpora), corpora, args.workers, opts=opts)
    keys = _ordered(results, args)
    plots = out / "plots"
    plots.mkdir(exist_ok=True)
    rows, summary = [], []
    for k in keys:
        zipf, heap = results[k]
        stem = ".".join(k)
        laws.emit_plot_data(zipf, plots / f"{stem}.zipf.csv")
        laws.emit_plot_data(heap, plots / f"{stem}.heap.csv")
        rows.append(list(k) + [zipf.alpha, zipf.C, zipf.r_squared, len(zipf.ranks),
                               heap.k, heap.beta, heap.r_squared, len(heap.ns)])
        summary.append({"corpus": k[0], "scheme": k[1], "dottedness": k[2],
                        "zipf": zipf.summary(), "heap": heap.summary()})
    stats.write_tsv(out / "laws.tsv", ("corpus", "scheme", "dottedness", "zipf_alpha", "zipf_C",
                                       "zipf_r2", "zipf_points", "heap_k", "heap_beta", "heap_r2",
                                       "heap_points"), rows)
    stats.write_json(out / "laws.json", summary)


def _lm_outputs(out: Path, args, corpora, opts: Options) -> None:
    keep = bool(getattr(args, "save_models", False))
    results = run_jobs(lm_job, _keys(args, corpora), corpora, args.workers, opts=opts,
                       keep_models=keep)
    keys = _ordered(results, args)
    eval_rows, count_rows, summary = [], [], []
    for k in keys:
        res, models = results[k]
        for rep in res.reports:
            eval_rows.append(list(k) + [rep.order, rep.ppl, rep.token_count, rep.logprob])
        for order, n in sorted(res.distinct_ngrams.items()):
            count_rows.append(list(k) + [order, n])
        summary.append({"corpus": k[0], "scheme": k[1], "dottedness": k[2], "result": res})
        if keep:
            mdir = out / "models"
            mdir.mkdir(exist_ok=True)
            for order, model in sorted(models.items()):
                stem = mdir / f"{'.'.join(k)}.{order}"
                arpa.write_arpa(model, f"{stem}.arpa")
                arpa.save_model(model, f"{stem}.bin")
    stats.write_tsv(out / "lm_eval.tsv", ("corpus", "scheme", "dottedness", "order", "ppl",
                                          "tokens", "logprob"), eval_rows)
    stats.write_tsv(out / "ngram_counts.tsv", ("corpus", "scheme", "dottedness", "order",
                                               "distinct_ngrams"), count_rows)

    # PPL vs order; plotting convention: dotted = solid line, dotless = dashed
    ppl_rows, oov_rows = [], []
    pairs = sorted({(k[0], k[1]) for k in keys}, key=lambda p: (args._corpus_order.index(p[0]),
                                                                SCHEMES.index(p[1])))
    for name, scheme in pairs:
        dres = results.get((name, scheme, DOTTED), (None,))[0]
        ures = results.get((name, scheme, DOTLESS), (None,))[0]
        for i, order in enumerate(opts.orders):
            ppl_rows.append([name, scheme, order,
                             dres.reports[i].ppl if dres else None,
                             ures.reports[i].ppl if ures else None])
        if dres and ures:
            oov_rows.append([name, scheme, dres.test_tokens,
                             dres.oov_tokens, ures.oov_tokens, _pct(ures.oov_tokens, dres.oov_tokens),
                             dres.oov_types, ures.oov_types, _pct(ures.oov_types, dres.oov_types)])
    stats.write_tsv(out / "lm_ppl.tsv", ("corpus", "scheme", "order", "dotted_ppl", "dotless_ppl"),
                    ppl_rows)
    if oov_rows:
        stats.write_tsv(out / "lm_oov.tsv", ("corpus", "scheme", "test_tokens",
                                             "dotted_oov_tokens", "dotless_oov_tokens",
                                             "oov_tokens_ratio_pct", "dotted_oov_types",
                                             "dotless_oov_types", "oov_types_ratio_pct"), oov_rows)
    stats.write_json(out / "lm.json", _lm_json(summary))


def _pct(a, b):
    return 100.0 * a / b if b else None


def _lm_json(summary):
    out = []
    for item in summary:
        res = item["result"]
        out.append({
            "corpus": item["corpus"], "scheme": item["scheme"], "dottedness": item["dottedness"],
            "test_tokens": res.test_tokens, "oov_tokens": res.oov_tokens, "oov_types": res.oov_types,
            "distinct_ngrams": {str(k): v for k, v in sorted(res.distinct_ngrams.items())},
            "discounts": {str(k): list(v) for k, v in sorted(res.discounts.items())},
            "eval": [{"order": r.order, "ppl": r.ppl, "tokens": r.token_count,
                      "logprob": r.logprob, "oov_tokens": r.oov_tokens, "oov_types": r.oov_types}
                     for r in res.reports],
        })
    return out


def _run_pipeline(args, parts) -> None:
    corpora = _corpora(args)
    opts = _options(args)
    _schemes(args)
    with output_dir(args.out_dir) as out:
        for part in parts:
            part(out, args, corpora, opts)
        _write_run_json(out, args)
    log.info("wrote %s", args.out_dir)


def cmd_stats(args) -> None:
    _run_pipeline(args, [_stats_outputs])


def cmd_laws(args) -> None:
    _run_pipeline(args, [_laws_outputs])


def cmd_lm_train(args) -> None:
    _run_pipeline(args, [_lm_outputs])


def cmd_compare(args) -> None:
    _run_pipeline(args, [_stats_outputs, _laws_outputs, _lm_outputs])


def _load_any_model(path):
    with open(path, "rb") as f:
        head = f.read(len(arpa.CACHE_MAGIC))
    if head == arpa.CACHE_MAGIC:
        return arpa.load_model(path)
    return arpa.read_arpa(path)


def cmd_lm_eval(args) -> None:
    model = _load_any_model(args.model)
    scheme = canonical_scheme(args.scheme)
    samples = [preprocess(s, args.mode) for s in split_lines(_read_text(args.test))]
    samples = [s for s in samples if s]
    if scheme == MORPH:
        if not args.morph:
            raise CLIError("--morph is required for the morph_adapter scheme")
        stream = parse_morph_lines(read_morph_lines(args.morph), args.morph_delimiter, samples)
    else:
        stream = tokenize(samples, scheme)
    if args.undot:
        stream = undot_stream(stream, _rule(args), args.isolated_token_undot)
    report = ngram.perplexity(model, stream, include_eos=not args.no_eos)
    data = stats.to_jsonable(report)
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---- argument parsing ----------------------------------------------------------

def _add_undot_flags(p):
    p.add_argument("--no-positional-overrides", action="store_true",
                   help="use the letter table only (no initial/medial forms for noon, yeh, qaf)")


def _add_isolated_flag(p):
    p.add_argument("--isolated-token-undot", action="store_true",
                   help="undot character and morph tokens as stand-alone forms")


def _add_corpus_flags(p):
    p.add_argument("inputs", nargs="+", help="corpus files, one sample per line")
    p.add_argument("-o", "--out-dir", required=True, help="output directory")
    p.add_argument("--mode", choices=LANGUAGE_MODES, default=ARABIC, help="preprocessing mode")
    p.add_argument("--aggregate", action="store_true",
                   help="also analyse the concatenation of all inputs")
    p.add_argument("--scheme", action="append", choices=sorted(set(SCHEMES) | {"char", "morph"}),
                   help="tokenization scheme (repeatable; default word, character, disjoint "
                        "and morph_adapter when --morph is given)")
    p.add_argument("--dottedness", choices=("both", DOTTED, DOTLESS), default="both")
    p.add_argument("--morph", action="append",
                   help="pre-segmented companion file, one per input (repeatable)")
    p.add_argument("--morph-delimiter", default="+", help="subword delimiter in --morph files")
    p.add_argument("--split-on-sentence-dot", action="store_true",
                   help="also end samples at ASCII periods and Arabic full stops")
    p.add_argument("--min-tokens", type=int, default=0, help="drop samples with fewer words")
    p.add_argument("--max-tokens", type=int, default=None, help="drop samples with more words")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    _add_undot_flags(p)
    _add_isolated_flag(p)
    # stats / laws
    p.add_argument("--count-space-token", action="store_true",
                   help="count <##> as a character type in statistics")
    p.add_argument("--top-fraction", type=float, default=0.10,
                   help="fraction of most frequent types for the S_top length")
    p.add_argument("--heap-points", type=int, default=laws.DEFAULT_HEAP_POINTS,
                   help="log-spaced prefix lengths for the Heap fit")
    p.add_argument("--heap-min-n", type=int, default=1, help="shortest prefix used for Heap fit")
    p.add_argument("--min-freq", type=int, default=None, help="Zipf fit frequency cutoff")
    # language models
    p.add_argument("--min-order", type=int, default=2)
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--kn-simple", action="store_true",
                   help="single fixed discount instead of modified Kneser-Ney")
    p.add_argument("--discount", type=float, default=ngram.DEFAULT_DISCOUNT)
    p.add_argument("--no-eos", action="store_true", help="do not score </s>")
    p.add_argument("--train", type=float, default=0.9)
    p.add_argument("--valid", type=float, default=0.0)
    p.add_argument("--test", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--no-shuffle", action="store_true", help="sequential split")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dotless", description="Dotless Arabic text: undotting, statistics and n-gram models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alphabet", help="alphabet tables")
    asub = p.add_subparsers(dest="alphabet_command", required=True)
    d = asub.add_parser("dump", help="write the alphabet and undot map as JSON")
    d.add_argument("-o", "--output", default=None)
    _add_undot_flags(d)
    d.set_defaults(func=cmd_alphabet)

    p = sub.add_parser("undot", help="preprocess and undot a file line by line")
    p.add_argument("input", help="input file or - for stdin")
    p.add_argument("-o", "--output", default=None)
    _add_undot_flags(p)
    p.set_defaults(func=cmd_undot)

    p = sub.add_parser("tokenize", help="tokenize a corpus, one token per line")
    p.add_argument("input")
    p.add_argument("--scheme", default=WORD, choices=sorted(set(SCHEMES) | {"char", "morph"}))
    p.add_argument("--mode", choices=LANGUAGE_MODES, default=ARABIC)
    p.add_argument("--undot", action="store_true", help="emit dotless tokens")
    p.add_argument("--morph", default=None, help="pre-segmented companion file")
    p.add_argument("--morph-delimiter", default="+")
    p.add_argument("--vocab", default=None, help="also write an id/token/frequency TSV")
    p.add_argument("-o", "--output", default=None)
    _add_undot_flags(p)
    _add_isolated_flag(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("split", help="write seeded train/valid/test splits")
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--name", default=None)
    p.add_argument("--mode", choices=LANGUAGE_MODES, default=ARABIC)
    p.add_argument("--train", type=float, default=0.9)
    p.add_argument("--valid", type=float, default=0.0)
    p.add_argument("--test", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--no-shuffle", action="store_true")
    p.add_argument("--split-on-sentence-dot", action="store_true")
    p.set_defaults(func=cmd_split)

    for name, func, helptext in (
        ("stats", cmd_stats, "vocabulary, entropy and length statistics"),
        ("laws", cmd_laws, "Zipf and Heap fits with plot data"),
        ("lm-train", cmd_lm_train, "train and evaluate Kneser-Ney models over an order sweep"),
        ("compare", cmd_compare, "stats, laws and language models, dotted vs dotless"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_corpus_flags(p)
        if name in ("lm-train", "compare"):
            p.add_argument("--save-models", action="store_true",
                           help="write ARPA files and binary caches under models/")
        p.set_defaults(func=func)

    p = sub.add_parser("lm-eval", help="perplexity of a saved model on a test file")
    p.add_argument("model", help="ARPA file or binary model cache")
    p.add_argument("test", help="test corpus, one sample per line")
    p.add_argument("--scheme", default=WORD, choices=sorted(set(SCHEMES) | {"char", "morph"}))
    p.add_argument("--mode", choices=LANGUAGE_MODES, default=ARABIC)
    p.add_argument("--undot", action="store_true", help="undot the test text first")
    p.add_argument("--morph", default=None)
    p.add_argument("--morph-delimiter", default="+")
    p.add_argument("--no-eos", action="store_true")
    p.add_argument("-o", "--output", default=None)
    _add_undot_flags(p)
    _add_isolated_flag(p)
    p.set_defaults(func=cmd_lm_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (CLIError, CorpusError, TokenizationError, UndotError, ngram.NgramError,
            stats.StatsError, laws.FitError, arpa.ArpaError, ValueError) as exc:
        print(f"dotless: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
