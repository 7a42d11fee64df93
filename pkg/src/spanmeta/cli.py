"""Command-line entry point: ``spanmeta {score,sweep,rank,selfcheck}``.

Exit status: 0 success, 1 usage error, 2 data error, 3 failed self-check.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .aggregate import CorpusScore, aggregate, evaluate_dataset, grouped, mean_of_groups
from .core import Segment, SpanMetaError
from .io import load_dataset
from .measures import MeasureConfig
from .report import FORMATS, ReportRow, emit_report, rank_table, render_table
from .sentinels import InvalidPerturbation, PerturbationSpec

log = logging.getLogger("spanmeta")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class TooFewSystems(SpanMetaError):
    pass


@dataclass
class RunConfig:
    inputs: list[Path]
    measures: list[MeasureConfig]
    averaging: list[str] = field(default_factory=lambda: ["micro"])
    group_by: str = "none"
    pool_groups: bool = False
    perturb: Optional[PerturbationSpec] = None
    sweep: list[Fraction] = field(default_factory=list)
    one_based: bool = False
    fmt: str = "csv"
    digits: int = 4
    out: Optional[Path] = None
    workers: int = 1

    def __post_init__(self):
        if not self.measures:
            raise UsageError("at least one --measure is required")
        if not self.averaging:
            raise UsageError("at least one --avg is required")
        if self.sweep and self.perturb is None:
            raise UsageError("--sweep needs exactly one --perturb to vary")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.digits < 0:
            raise UsageError("--digits must be >= 0")


def _group_key(group_by: str):
    if group_by == "lang_pair":
        return lambda s: s.lang_pair
    if group_by == "system":
        return lambda s: s.system
    return None


def load_systems(cfg: RunConfig) -> dict[str, list[Segment]]:
    """Segments per system; records without a ``system`` field take the file stem."""
    systems: dict[str, list[Segment]] = {}
    for path in cfg.inputs:
        for seg in load_dataset(path, cfg.one_based, default_system=Path(path).stem):
            systems.setdefault(seg.system, []).append(seg)
    return dict(sorted(systems.items()))


def _mean_scores(scores: Sequence[CorpusScore]):
    n = len(scores)
    p = sum((s.precision for s in scores), Fraction(0)) / n
    r = sum((s.recall for s in scores), Fraction(0)) / n
    f = sum((s.f for s in scores), Fraction(0)) / n
    return p, r, f, min(s.f for s in scores), max(s.f for s in scores)


def score_system(
    system: str,
    segments: Sequence[Segment],
    cfg: RunConfig,
    perturb: Optional[PerturbationSpec],
    executor: Optional[Executor],
) -> list[ReportRow]:
    """Rows for one system under one (optional) perturbation, averaged over its repetitions."""
    key = _group_key(cfg.group_by)
    groups = grouped(segments, key) if key else {}
    runs = perturb.runs if perturb else 1

    # scores[(measure index, averaging, group)] -> one CorpusScore per repetition
    scores: dict[tuple, list[CorpusScore]] = {}
    for rep in range(runs):
        segs = perturb.apply_all(segments, rep) if perturb else list(segments)
        per_cfg = evaluate_dataset(segs, cfg.measures, cfg.workers, executor=executor)
        for mi, (mcfg, results) in enumerate(zip(cfg.measures, per_cfg)):
            by_id = {s.id: r for s, r in zip(segs, results)}
            for avg in cfg.averaging:
                group_scores = []
                for name, members in groups.items():
                    sc = aggregate([by_id[s.id] for s in members], mcfg, avg)
                    scores.setdefault((mi, avg, name), []).append(sc)
                    group_scores.append(sc)
                if groups and not cfg.pool_groups:
                    total = mean_of_groups(group_scores, avg)
                else:
                    total = aggregate(results, mcfg, avg)
                scores.setdefault((mi, avg, "ALL"), []).append(total)

    rows = []
    for (mi, avg, group), reps in scores.items():
        mcfg = cfg.measures[mi]
        p, r, f, f_min, f_max = _mean_scores(reps)
        rows.append(ReportRow(
            system=system, measure=mcfg.kind.value, tau=mcfg.param, averaging=avg, group=group,
            precision=p, recall=r, f=f,
            n_segments=reps[0].n_segments,
            n_hyp_spans=round(Fraction(sum(s.n_hyp_spans for s in reps), len(reps))),
            n_gold_spans=reps[0].n_gold_spans,
            perturbation=perturb.kind if perturb else None,
            param=Fraction(perturb.amount).limit_denominator(10**9) if perturb else None,
            f_min=f_min if perturb else None,
            f_max=f_max if perturb else None,
        ))
    return rows


def _pool(cfg: RunConfig):
    if cfg.workers > 1:
        return ProcessPoolExecutor(max_workers=cfg.workers)
    return nullcontext(None)


def cmd_score(cfg: RunConfig) -> list[ReportRow]:
    systems = load_systems(cfg)
    rows: list[ReportRow] = []
    with _pool(cfg) as executor:
        for system, segs in systems.items():
            rows += score_system(system, segs, cfg, cfg.perturb, executor)
    return rows


def cmd_sweep(cfg: RunConfig) -> list[ReportRow]:
    if cfg.perturb is None or not cfg.sweep:
        raise UsageError("sweep needs --perturb and a non-empty --sweep grid")
    grid = [cfg.perturb.with_amount(v) for v in cfg.sweep]
    systems = load_systems(cfg)
    rows: list[ReportRow] = []
    with _pool(cfg) as executor:
        for system, segs in systems.items():
            for spec in grid:
                rows += score_system(system, segs, cfg, spec, executor)
    return rows


def cmd_rank(cfg: RunConfig) -> tuple[list[str], list[list[str]]]:
    rows = [r for r in cmd_score(cfg) if r.group == "ALL"]
    n_systems = len({r.system for r in rows})
    if n_systems < 2:
        raise TooFewSystems(f"ranking needs at least 2 systems, found {n_systems}")
    return rank_table(rows)


def _parse_grid(text: str, kind: str) -> list[Fraction]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            v = Fraction(item)
        except ValueError:
            raise UsageError(f"bad sweep value {item!r}") from None
        if kind != "drop" and v.denominator != 1:
            raise UsageError(f"{kind} sweeps need integer values, got {item!r}")
        out.append(v)
    if not out:
        raise UsageError("empty --sweep grid")
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", action="append", default=[], type=Path, help="dataset file (repeatable)")
    common.add_argument(
        "--measure", action="append", default=[],
        help="em | mp:<tau> | mpp | w19 | w23 | w25 | approx-w25 (repeatable)",
    )
    common.add_argument("--avg", action="append", default=[], choices=["micro", "macro"])
    common.add_argument("--group-by", default="none", choices=["none", "lang_pair", "system"])
    common.add_argument(
        "--pool-groups", action="store_true",
        help="with --group-by, score the ALL row on pooled data instead of averaging groups",
    )
    common.add_argument("--perturb", help="extend:<k> | drop:<p>:<seed>:<reps> | remove-few:<t>")
    common.add_argument("--one-based-inclusive", action="store_true", help="input offsets are 1-based inclusive")
    common.add_argument("--format", default="csv", choices=FORMATS)
    common.add_argument("--digits", type=int, default=4)
    common.add_argument("--out", type=Path, help="write here instead of stdout")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="spanmeta", description="Span-level precision/recall/F for error-span annotations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("score", parents=[common], help="score systems against gold spans")
    sweep = sub.add_parser("sweep", parents=[common], help="score across a perturbation grid")
    sweep.add_argument("--sweep", required=True, help="comma-separated grid for the --perturb amount")
    sub.add_parser("rank", parents=[common], help="rank systems per measure and averaging")
    check = sub.add_parser("selfcheck", help="run built-in fixture and oracle checks")
    check.add_argument("--random-segments", type=int, default=200)
    check.add_argument("--seed", type=int, default=2025)
    return parser


def config_from_args(args) -> RunConfig:
    measures = []
    for m in args.measure:
        try:
            measures.append(MeasureConfig.parse(m))
        except (ValueError, SpanMetaError) as exc:
            raise UsageError(f"bad --measure {m!r}: {exc}") from None
    perturb = None
    if args.perturb:
        try:
            perturb = PerturbationSpec.parse(args.perturb)
        except InvalidPerturbation as exc:
            raise UsageError(str(exc)) from None
    sweep = []
    if getattr(args, "sweep", None) is not None:
        if perturb is None:
            raise UsageError("--sweep needs --perturb")
        sweep = _parse_grid(args.sweep, perturb.kind)
        try:
            for v in sweep:
                perturb.with_amount(v)
        except InvalidPerturbation as exc:
            raise UsageError(str(exc)) from None
    cfg = RunConfig(
        inputs=list(args.input),
        measures=measures,
        averaging=list(dict.fromkeys(args.avg)) or ["micro"],
        group_by=args.group_by,
        pool_groups=args.pool_groups,
        perturb=perturb,
        sweep=sweep,
        one_based=args.one_based_inclusive,
        fmt=args.format,
        digits=args.digits,
        out=args.out,
        workers=args.workers,
    )
    if not cfg.inputs:
        raise UsageError("at least one --input is required")
    return cfg


def _write(data: bytes, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out.write_bytes(data)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(message)s",
    )

    if args.command == "selfcheck":
        from .selfcheck import run_selfcheck

        return EXIT_OK if run_selfcheck(args.random_segments, args.seed) else EXIT_CHECK

    try:
        cfg = config_from_args(args)
        if args.command == "rank":
            if cfg.fmt == "svg":
                raise UsageError("rank tables cannot be rendered as svg")
            header, body = cmd_rank(cfg)
            data = render_table(header, body, cfg.fmt)
        else:
            rows = cmd_sweep(cfg) if args.command == "sweep" else cmd_score(cfg)
            data = emit_report(rows, cfg.fmt, cfg.digits)
    except UsageError as exc:
        print(f"spanmeta: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpanMetaError, OSError) as exc:
        print(f"spanmeta: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _write(data, cfg.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
