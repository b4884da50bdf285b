"""Command-line front end wiring the table transforms into batch pipelines.

Subcommands: triangulate, prune, pivot-lex, augment, analyze. Data is written
only to the declared output paths (staged, so a failed run leaves no partial
files); all diagnostics go to stderr. Identical inputs and flags produce
byte-identical outputs and report files.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from typing import IO

from .analysis import oov_report, size_report
from .errors import ConfigError, PhrasePivotError
from .lexicon_pivot import (
    LexStrategy,
    augment_table,
    lexicon_to_entries,
    parse_pivot_lexicon,
    pivot_lexicon,
    pivot_lexicon_directions,
    prune_lexicon_topn,
    write_pivot_lexicon,
)
from .pruning import PruneParams, prune_modified
from .table_model import (
    DEFAULT_WEIGHTS,
    PhraseTable,
    parse_lexicon_table,
    parse_phrase_table,
    parse_weight_config,
    write_phrase_table,
)
from .triangulation import (
    accumulate_word_counts,
    parse_word_counts,
    triangulate,
    write_word_counts,
)

_BUDGET_RE = re.compile(r"^([0-9]+)([kKmMgG]?)$")
_BUDGET_UNITS = {"": 1, "k": 1 << 10, "m": 1 << 20, "g": 1 << 30}


def parse_memory_budget(text: str) -> int:
    m = _BUDGET_RE.match(text)
    if m is None:
        raise ConfigError(f"bad memory budget: {text!r} (expected BYTES with optional K/M/G)")
    return int(m.group(1)) * _BUDGET_UNITS[m.group(2).lower()]


def _parse_cap(text: str) -> int | None:
    if text == "unlimited":
        return None
    if text.isascii() and text.isdigit() and int(text) >= 1:
        return int(text)
    raise ConfigError(f"bad cap: {text!r} (expected a positive integer or 'unlimited')")


class _Stage:
    """Collects output files written to temp paths, renamed only on success."""

    def __init__(self) -> None:
        self._pending: list[tuple[IO[str], str, str]] = []

    def open(self, path: str) -> IO[str]:
        temp = f"{path}.part"
        handle = open(temp, "w", encoding="utf-8", newline="\n")
        self._pending.append((handle, temp, path))
        return handle

    def commit(self) -> None:
        for handle, temp, path in self._pending:
            handle.close()
            os.replace(temp, path)
        self._pending.clear()

    def abort(self) -> None:
        for handle, temp, _ in self._pending:
            try:
                handle.close()
            finally:
                try:
                    os.remove(temp)
                except OSError:
                    pass
        self._pending.clear()


def _run_staged(fn) -> None:
    stage = _Stage()
    try:
        fn(stage)
    except BaseException:
        stage.abort()
        raise
    stage.commit()


def _load_phrase_table(path: str) -> PhraseTable:
    with open(path, "r", encoding="utf-8", newline="\n") as handle:
        return parse_phrase_table(handle, source_name=path)


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_triangulate(args: argparse.Namespace) -> int:
    src_pvt = _load_phrase_table(args.src_pvt)
    pvt_tgt = _load_phrase_table(args.pvt_tgt)
    table, report = triangulate(
        src_pvt,
        pvt_tgt,
        memory_budget=args.memory_budget,
        temp_dir=args.temp_dir,
        threads=args.threads,
    )
    if len(table) == 0:
        _diag("warning: no phrase pairs induced (no shared pivot phrases)")

    def write(stage: _Stage) -> None:
        write_phrase_table(table, stage.open(args.output))
        if args.counts is not None:
            write_word_counts(accumulate_word_counts(table), stage.open(args.counts))
        if args.report is not None:
            # elapsed stays off the report file so reruns are byte-identical
            stage.open(args.report).write(report.record(include_elapsed=False) + "\n")

    _run_staged(write)
    _diag(report.record())
    return 0


def cmd_prune(args: argparse.Namespace) -> int:
    params_n = _parse_cap(args.n)
    params_m = _parse_cap(args.m)
    if args.weights is not None:
        with open(args.weights, "r", encoding="utf-8", newline="\n") as handle:
            weights = parse_weight_config(handle, source_name=args.weights)
    else:
        weights = DEFAULT_WEIGHTS
        _diag(
            "no weights file given; using default weights "
            + " ".join(str(w) for w in weights.weights)
        )
    table = _load_phrase_table(args.table)
    pruned, report = prune_modified(table, PruneParams(params_n, params_m, weights))

    def write(stage: _Stage) -> None:
        write_phrase_table(pruned, stage.open(args.output))
        if args.report is not None:
            stage.open(args.report).write("\n".join(report.lines()) + "\n")

    _run_staged(write)
    for line in report.lines():
        _diag(line)
    return 0


def cmd_pivot_lex(args: argparse.Namespace) -> int:
    roles = pivot_lexicon_directions()
    tables = {}
    for role, (direction, source_lang, target_lang) in roles.items():
        path = getattr(args, role)
        with open(path, "r", encoding="utf-8", newline="\n") as handle:
            tables[role] = parse_lexicon_table(
                handle,
                direction,
                source_name=path,
                source_lang=source_lang,
                target_lang=target_lang,
            )
    lex = pivot_lexicon(
        tables["s_given_p"], tables["p_given_s"], tables["p_given_t"], tables["t_given_p"]
    )
    pruned = prune_lexicon_topn(lex, args.top)

    def write(stage: _Stage) -> None:
        write_pivot_lexicon(pruned, stage.open(args.output))

    _run_staged(write)
    _diag(f"pivoted_pairs={len(lex)} kept_pairs={len(pruned)}")
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    strategy = LexStrategy.parse(args.strategy)
    counts = None
    if args.counts is not None:
        with open(args.counts, "r", encoding="utf-8", newline="\n") as handle:
            counts = parse_word_counts(handle, source_name=args.counts)
    if strategy.kind == "re_estimate" and counts is None:
        raise ConfigError("strategy re-estimate requires a --counts file")
    table = _load_phrase_table(args.table)
    with open(args.lexicon, "r", encoding="utf-8", newline="\n") as handle:
        lex = parse_pivot_lexicon(handle, source_name=args.lexicon)
    additions = lexicon_to_entries(lex, strategy, counts)
    merged, report = augment_table(table, additions)

    def write(stage: _Stage) -> None:
        write_phrase_table(merged, stage.open(args.output))
        if args.report is not None:
            stage.open(args.report).write("\n".join(report.lines()) + "\n")

    _run_staged(write)
    for line in report.lines():
        _diag(line)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    table = _load_phrase_table(args.table)
    if args.mode == "oov":
        if args.test is None:
            raise ConfigError("analyze oov requires --test")
        with open(args.test, "r", encoding="utf-8") as handle:
            sentences = [line.split() for line in handle]
        report = oov_report(table, sentences)

        def write(stage: _Stage) -> None:
            stage.open(args.output).write("\n".join(report.lines()) + "\n")
            if args.oov_list is not None:
                out = stage.open(args.oov_list)
                for word in report.oov_type_list:
                    out.write(word + "\n")

        _run_staged(write)
        return 0

    baseline = _load_phrase_table(args.baseline) if args.baseline is not None else None
    report = size_report(table, baseline)

    def write(stage: _Stage) -> None:
        stage.open(args.output).write("\n".join(report.lines()) + "\n")

    _run_staged(write)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phrasepivot",
        description="Build, prune, and augment pivoted phrase tables.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--memory-budget",
        default="1G",
        metavar="BYTES[K|M|G]",
        help="memory budget for the join before spilling to disk (default 1G)",
    )
    common.add_argument("--temp-dir", default=None, help="directory for spill files")
    common.add_argument("--report", default=None, help="write the run report to this file")
    common.add_argument(
        "--threads", type=int, default=os.cpu_count() or 1, help="worker threads"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "triangulate", parents=[common],
        help="induce a source-target table from source-pivot and pivot-target tables",
    )
    p.add_argument("src_pvt", help="source-to-pivot phrase table")
    p.add_argument("pvt_tgt", help="pivot-to-target phrase table")
    p.add_argument("-o", "--output", required=True, help="induced phrase table")
    p.add_argument("--counts", default=None, help="also write induced word-link counts here")
    p.set_defaults(func=cmd_triangulate)

    p = sub.add_parser(
        "prune", parents=[common],
        help="two-stage pruning: top-N per source phrase, then top-M per target phrase",
    )
    p.add_argument("table", help="phrase table to prune")
    p.add_argument("-w", "--weights", default=None, help="decoding weight file (4 reals)")
    p.add_argument("-N", dest="n", default="unlimited", help="per-source cap or 'unlimited'")
    p.add_argument("-M", dest="m", default="unlimited", help="per-target cap or 'unlimited'")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser(
        "pivot-lex", parents=[common],
        help="compose a source-target word lexicon through the pivot language",
    )
    p.add_argument("--s-given-p", required=True, dest="s_given_p",
                   help="lexicon with P(source word | pivot word)")
    p.add_argument("--p-given-s", required=True, dest="p_given_s",
                   help="lexicon with P(pivot word | source word)")
    p.add_argument("--p-given-t", required=True, dest="p_given_t",
                   help="lexicon with P(pivot word | target word)")
    p.add_argument("--t-given-p", required=True, dest="t_given_p",
                   help="lexicon with P(target word | pivot word)")
    p.add_argument("-n", "--top", type=int, default=20,
                   help="candidates kept per source word (default 20)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pivot_lex)

    p = sub.add_parser(
        "augment", parents=[common],
        help="add pivoted-lexicon entries missing from a phrase table",
    )
    p.add_argument("table", help="phrase table to augment")
    p.add_argument("lexicon", help="pivoted lexicon file (from pivot-lex)")
    p.add_argument("--strategy", default="copy",
                   help="lexical weights: copy | constant[:VALUE] | re-estimate")
    p.add_argument("--counts", default=None,
                   help="word-link counts file (required for re-estimate)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser(
        "analyze", parents=[common],
        help="coverage (oov) or size (stats) report for a phrase table",
    )
    p.add_argument("mode", choices=("oov", "stats"))
    p.add_argument("table", help="phrase table to analyze")
    p.add_argument("--test", default=None, help="tokenized test set, one sentence per line")
    p.add_argument("--baseline", default=None, help="baseline table for the size percentage")
    p.add_argument("--oov-list", default=None, help="also write the sorted OOV types here")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        args.memory_budget = parse_memory_budget(args.memory_budget)
        return args.func(args)
    except (PhrasePivotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
