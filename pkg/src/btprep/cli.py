"""Command-line interface.

Every subcommand is a thin wrapper over one module operation: flags are
parsed, files are read, the operation runs, and its output is written
exactly as the module produces it. Reports go to stdout as `key = value`
lines. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, binning, translit
from .assemble import (
    AssemblyConfig,
    BinningConfig,
    ScoringConfig,
    TranslitConfig,
    assemble_training_set,
    manifest_path,
    mix_sample,
    topk_filter,
)
from .corpus import Corpus, Origin, write_pairs
from .errors import BtprepError, ConfigError
from .evaluation import (
    bootstrap_significance,
    corpus_bleu,
    mean_ci,
    pearson,
    spearman,
    sxs_delta,
    word_level_translit_f1,
)
from .kvfile import read_kv
from .pipeline import GridSearchSpec, PipelineConfig, run_grid_search, run_iterative
from .quality import read_lines, read_scores, write_scores
from .tags import strip_all_tags


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def _report(**fields) -> None:
    for key, value in fields.items():
        print(f"{key} = {_fmt(value)}")


def _scoring_from_flags(args) -> ScoringConfig:
    if args.scores:
        return ScoringConfig("external", path=args.scores)
    if args.roundtrip:
        return ScoringConfig("roundtrip", path=args.roundtrip)
    return ScoringConfig("embeddings", src_path=args.embeddings[0], tgt_path=args.embeddings[1])


def _generator_from_flags(args) -> translit.CandidateGenerator:
    if args.candidates:
        return translit.TableGenerator.from_file(args.candidates, args.n)
    return translit.RuleRomanizer(args.romanize, args.n)


def _read_floats(path) -> list[float]:
    return [float(line) for line in read_lines(path) if line.strip()]


def _strip_lines(lines: list[str]) -> list[str]:
    return [strip_all_tags(line)[1] for line in lines]


def cmd_score(args) -> int:
    corpus = Corpus(args.corpus, Origin.BT)
    scored = list(_scoring_from_flags(args).score(corpus))
    scores = {sp.pair.id: sp.score for sp in scored}
    write_scores(scores, args.output)
    if scores:
        values = list(scores.values())
        _report(n=len(values), min=min(values), max=max(values), mean=sum(values) / len(values))
    else:
        _report(n=0)
    return 0


def cmd_bin(args) -> int:
    scores = read_scores(args.scores)
    ks = [int(k) for k in args.sweep.split(",")] if args.sweep else [args.k]
    for k in ks:
        config = BinningConfig(method=args.method, k=k, seed=args.seed)
        config.validate()
        result = config.run(scores)
        out = Path(f"{args.output}.k{k}") if args.sweep else Path(args.output)
        binning.write_assignments(result.assignment, out)
        _report(
            k=k,
            method=result.method,
            sizes=",".join(str(s) for s in result.sizes()),
            boundaries=",".join(repr(b) for b in result.boundaries),
            output=out,
        )
    return 0


def cmd_translit(args) -> int:
    pairs = Corpus(args.corpus, Origin.BT).pairs()
    gen = _generator_from_flags(args)
    labels = translit.label_corpus(pairs, gen)
    translit.write_labels(labels, args.output)
    both = sum(1 for v in labels.values() if v == translit.BOTH)
    stats = translit.TranslitStats(len(labels), len(labels) - both, both)
    _report(
        n=stats.n,
        txn_count=stats.txn_count,
        both_count=stats.both_count,
        txn_fraction=stats.txn_fraction,
        both_fraction=stats.both_fraction,
    )
    return 0


ASSEMBLY_KEYS = {
    "bt", "bitext", "output", "seed", "scoring", "bitext_scoring",
    "binning", "bins", "binning_seed", "bt_tag", "bitext_policy",
    "translit", "candidates", "translit_n",
    "filter_count", "filter_threshold", "mix_top", "mix_extra", "mix_seed",
}
PIPELINE_KEYS = ASSEMBLY_KEYS | {"workdir", "rounds", "translator", "scorer", "mono"}


def _parse_bool(value: str, key: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise ConfigError(f"{key} must be true or false, got {value!r}")


def _parse_scoring_spec(spec: str) -> ScoringConfig:
    kind, _, rest = spec.partition(":")
    if kind in ("external", "roundtrip"):
        config = ScoringConfig(kind, path=rest)
    elif kind == "embeddings":
        src, _, tgt = rest.partition(",")
        config = ScoringConfig(kind, src_path=src, tgt_path=tgt)
    else:
        raise ConfigError(f"unknown scoring kind {kind!r}")
    config.validate()
    return config


def _parse_candidates_spec(spec: str, n: int) -> TranslitConfig:
    kind, _, rest = spec.partition(":")
    if kind == "table":
        config = TranslitConfig("table", path=rest, n=n)
    elif kind == "romanize":
        config = TranslitConfig("romanize", language=rest, n=n)
    else:
        raise ConfigError(f"unknown candidate kind {kind!r}")
    config.validate()
    return config


def assembly_config_from_kv(
    entries: dict[str, str], allowed=ASSEMBLY_KEYS, validate: bool = True
) -> AssemblyConfig:
    for key in entries:
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r}")
    for key in ("bt", "output"):
        if key not in entries:
            raise ConfigError(f"missing config key {key!r}")

    binning_cfg = None
    if entries.get("binning", "none") != "none":
        binning_cfg = BinningConfig(
            method=entries["binning"],
            k=int(entries.get("bins", binning.DEFAULT_BINS)),
            seed=int(entries.get("binning_seed", 0)),
        )
    translit_cfg = None
    if "candidates" in entries:
        translit_cfg = _parse_candidates_spec(
            entries["candidates"], int(entries.get("translit_n", translit.DEFAULT_NUM_CANDIDATES))
        )
    config = AssemblyConfig(
        bt_path=entries["bt"],
        output_path=entries["output"],
        bitext_path=entries.get("bitext"),
        scoring=_parse_scoring_spec(entries["scoring"]) if "scoring" in entries else None,
        binning=binning_cfg,
        bt_tag=_parse_bool(entries.get("bt_tag", "false"), "bt_tag"),
        bitext_policy=entries.get("bitext_policy", "untagged"),
        bitext_scoring=(
            _parse_scoring_spec(entries["bitext_scoring"]) if "bitext_scoring" in entries else None
        ),
        translit_side=entries.get("translit", "off"),
        translit_gen=translit_cfg,
        filter_count=int(entries["filter_count"]) if "filter_count" in entries else None,
        filter_threshold=(
            float(entries["filter_threshold"]) if "filter_threshold" in entries else None
        ),
        mix_top=int(entries["mix_top"]) if "mix_top" in entries else None,
        mix_extra=int(entries["mix_extra"]) if "mix_extra" in entries else None,
        mix_seed=int(entries.get("mix_seed", 0)),
        seed=int(entries.get("seed", 0)),
    )
    if validate:
        config.validate()
    return config


def pipeline_config_from_kv(entries: dict[str, str]) -> PipelineConfig:
    assembly_entries = {k: v for k, v in entries.items() if k in ASSEMBLY_KEYS}
    # the runner substitutes per-round paths for these
    assembly_entries.setdefault("output", "per-round")
    if "translator" in entries:
        assembly_entries.setdefault("bt", "per-round")
    assembly = assembly_config_from_kv(assembly_entries, allowed=ASSEMBLY_KEYS, validate=False)
    for key in entries:
        if key not in PIPELINE_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    if "workdir" not in entries:
        raise ConfigError("missing config key 'workdir'")
    config = PipelineConfig(
        assembly=assembly,
        workdir=entries["workdir"],
        rounds=int(entries.get("rounds", 1)),
        translator_command=entries.get("translator"),
        scorer_command=entries.get("scorer"),
        mono_path=entries.get("mono"),
    )
    config.validate()
    return config


def cmd_assemble(args) -> int:
    config = assembly_config_from_kv(read_kv(args.config))
    manifest = assemble_training_set(config)
    _report(
        output=config.output_path,
        manifest=manifest_path(config.output_path),
        n_output=manifest["n_output"],
    )
    return 0


def cmd_filter_topk(args) -> int:
    pairs = Corpus(args.corpus, Origin.BT).pairs()
    scored = list(ScoringConfig("external", path=args.scores).score(pairs))
    kept = topk_filter(scored, count=args.count, threshold=args.threshold)
    write_pairs((sp.pair for sp in kept), args.output)
    if args.scores_out:
        write_scores({sp.pair.id: sp.score for sp in kept}, args.scores_out)
    _report(n_selected=len(kept), output=args.output)
    return 0


def cmd_mix_sample(args) -> int:
    pairs = Corpus(args.corpus, Origin.BT).pairs()
    scored = list(ScoringConfig("external", path=args.scores).score(pairs))
    top = topk_filter(scored, count=args.top)
    top_ids = {sp.pair.id for sp in top}
    rest = [sp for sp in scored if sp.pair.id not in top_ids]
    mixed = mix_sample(top, rest, args.extra, args.seed)
    write_pairs((sp.pair for sp in mixed), args.output)
    _report(n_top=len(top), n_sampled=len(mixed) - len(top), output=args.output)
    return 0


def cmd_eval_bleu(args) -> int:
    hyps = read_lines(args.hyp)
    refs = read_lines(args.ref)
    if args.strip_tags:
        hyps = _strip_lines(hyps)
    score = corpus_bleu(hyps, refs)
    _report(
        bleu=score.value,
        p1=score.precisions[0],
        p2=score.precisions[1],
        p3=score.precisions[2],
        p4=score.precisions[3],
        brevity_penalty=score.brevity_penalty,
        hyp_len=score.hyp_len,
        ref_len=score.ref_len,
    )
    return 0


def cmd_eval_f1(args) -> int:
    sources = read_lines(args.src)
    hyps = read_lines(args.hyp)
    refs = read_lines(args.ref)
    if args.strip_tags:
        hyps = _strip_lines(hyps)
    report = word_level_translit_f1(sources, hyps, refs, _generator_from_flags(args))
    _report(
        tp=report.tp, fp=report.fp, fn=report.fn,
        precision=report.precision, recall=report.recall, f1=report.f1,
    )
    return 0


def cmd_eval_significance(args) -> int:
    report = bootstrap_significance(
        read_lines(args.hyp_a),
        read_lines(args.hyp_b),
        read_lines(args.ref),
        n_sets=args.n_sets,
        set_size=args.set_size,
        seed=args.seed,
    )
    if args.per_set_csv:
        with open(args.per_set_csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("set,bleu_a,bleu_b\n")
            for i, (a, b) in enumerate(zip(report.bleu_a, report.bleu_b)):
                fh.write(f"{i},{a!r},{b!r}\n")
    _report(
        n_sets=report.n_sets,
        set_size=report.set_size,
        seed=report.seed,
        mean_bleu_a=sum(report.bleu_a) / report.n_sets,
        mean_bleu_b=sum(report.bleu_b) / report.n_sets,
        t_statistic=report.t_statistic,
        p_value=report.p_value,
    )
    return 0


def cmd_eval_correlation(args) -> int:
    xs = _read_floats(args.x)
    ys = _read_floats(args.y)
    if args.method in ("pearson", "both"):
        _report(pearson=pearson(xs, ys))
    if args.method in ("spearman", "both"):
        _report(spearman=spearman(xs, ys))
    return 0


def cmd_stats(args) -> int:
    if args.scores:
        values = _read_floats(args.scores)
        summary = mean_ci(values)
        _report(n=summary.n, mean=summary.mean, ci_halfwidth=summary.ci_halfwidth)
    else:
        report = sxs_delta(_read_floats(args.base), _read_floats(args.test))
        _report(n=report.n, delta=report.delta, significant="true" if report.significant else "false")
    return 0


def cmd_run(args) -> int:
    config = pipeline_config_from_kv(read_kv(args.config))
    results = run_iterative(config)
    for result in results:
        _report(**{f"round_{result.index}_corpus": result.corpus_path})
    return 0


def cmd_grid_search(args) -> int:
    if args.kind == "count":
        selectors = [int(s) for s in args.selectors.split(",")]
    else:
        selectors = [float(s) for s in args.selectors.split(",")]
    spec = GridSearchSpec(
        corpus_path=args.corpus,
        scores_path=args.scores,
        output_dir=args.output_dir,
        selectors=selectors,
        kind=args.kind,
    )
    for entry in run_grid_search(spec):
        print(f"{entry.selector}\t{entry.output_path}\t{entry.n_pairs}")
    return 0


def _add_generator_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--candidates", help="candidate table file (word<TAB>cand1,cand2,...)")
    group.add_argument("--romanize", metavar="LANG", help="rule romanizer language (hi, gu, ta)")
    p.add_argument("--n", type=int, default=translit.DEFAULT_NUM_CANDIDATES,
                   help="candidates per word (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btprep",
        description="Prepare and evaluate back-translated MT training corpora.",
    )
    parser.add_argument("--version", action="version", version=f"btprep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a corpus and write an id<TAB>score sidecar")
    p.add_argument("--corpus", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--scores", help="precomputed score sidecar to ingest")
    group.add_argument("--roundtrip", help="line-aligned round-trip translation file")
    group.add_argument("--embeddings", nargs=2, metavar=("SRC", "TGT"),
                       help="source and target embedding sidecars")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bin", help="assign scored pairs to quality bins")
    p.add_argument("--scores", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int, default=binning.DEFAULT_BINS)
    p.add_argument("--method", choices=["equal-volume", "equal-width", "random"],
                   default="equal-volume")
    p.add_argument("--seed", type=int, default=0, help="seed for --method random")
    p.add_argument("--sweep", help="comma-separated k values; writes OUTPUT.k<K> each")
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("translit", help="label pairs Txn/Both and report fractions")
    p.add_argument("--corpus", required=True)
    _add_generator_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("assemble", help="assemble a training corpus from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("filter-topk", help="keep the top-k or above-threshold pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scores", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--count", type=int)
    group.add_argument("--threshold", type=float)
    p.add_argument("--output", required=True)
    p.add_argument("--scores-out", help="also write the surviving scores")
    p.set_defaults(func=cmd_filter_topk)

    p = sub.add_parser("mix-sample", help="top-k plus a random sample of the rest")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--extra", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_mix_sample)

    p = sub.add_parser("eval-bleu", help="corpus BLEU of a hypothesis file")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--strip-tags", action="store_true",
                   help="strip leading tags from hypotheses first")
    p.set_defaults(func=cmd_eval_bleu)

    p = sub.add_parser("eval-f1", help="word-level transliteration F1")
    p.add_argument("--src", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    _add_generator_flags(p)
    p.add_argument("--strip-tags", action="store_true")
    p.set_defaults(func=cmd_eval_f1)

    p = sub.add_parser("eval-significance", help="bootstrap t-test of two systems' BLEU")
    p.add_argument("--hyp-a", required=True)
    p.add_argument("--hyp-b", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--n-sets", type=int, default=1000)
    p.add_argument("--set-size", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-set-csv", help="dump per-set BLEUs as CSV")
    p.set_defaults(func=cmd_eval_significance)

    p = sub.add_parser("eval-correlation", help="Pearson/Spearman of two value files")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--method", choices=["pearson", "spearman", "both"], default="both")
    p.set_defaults(func=cmd_eval_correlation)

    p = sub.add_parser("stats", help="mean/CI of a score file, or SxS delta of two")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--scores", help="one score per line")
    group.add_argument("--base", help="baseline ratings (pairs with --test)")
    p.add_argument("--test", help="test ratings (pairs with --base)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("run", help="run the round-based pipeline from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid-search", help="one filtered corpus per selector")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--selectors", required=True, help="comma-separated counts or thresholds")
    p.add_argument("--kind", choices=["count", "threshold"], default="count")
    p.set_defaults(func=cmd_grid_search)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "stats" and args.base and not args.test:
        parser.error("--base requires --test")
    try:
        return args.func(args)
    except BtprepError as err:
        stage = getattr(err, "stage", None)
        prefix = f"error[{stage}]" if stage else "error"
        print(f"{prefix}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
