"""Corpus-level scores: micro and macro averaging over a dataset."""

from __future__ import annotations

from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .core import AnnotatedSpan, Segment, SpanMetaError, Span
from .matching import (
    DEFAULT_BUDGET,
    FrontierPoint,
    best_point,
    combine_frontiers,
    mpp_credit,
    overlap_credit,
    segment_frontier,
)
from .measures import PRF, Kind, MeasureConfig, Tally, tally

AVERAGING_MODES = ("micro", "macro")


class EmptyDataset(SpanMetaError):
    def __init__(self):
        super().__init__("cannot aggregate an empty dataset")


@dataclass(frozen=True)
class CorpusScore:
    prf: PRF
    n_segments: int
    n_hyp_spans: int
    n_gold_spans: int
    config: Optional[MeasureConfig] = None

    @property
    def precision(self) -> Fraction:
        return self.prf.precision

    @property
    def recall(self) -> Fraction:
        return self.prf.recall

    @property
    def f(self) -> Fraction:
        return self.prf.f


@dataclass(frozen=True)
class SegmentResult:
    """Per-segment output needed by both averaging modes."""

    tally: Tally
    # credit frontier for measures whose micro optimum is joint over the corpus
    frontier: Optional[tuple[FrontierPoint, ...]] = None
    n_hyp: int = 0
    n_gold: int = 0

    def prf(self, cfg: Optional[MeasureConfig] = None) -> PRF:
        return self.tally.prf(cfg)


def _partial_credit(cfg: MeasureConfig):
    if cfg.kind is Kind.MPP:
        return mpp_credit
    if cfg.kind is Kind.APPROX_W25:
        return overlap_credit
    return None


def evaluate_segment(seg: Segment, cfg: MeasureConfig, budget: int = DEFAULT_BUDGET) -> SegmentResult:
    credit = _partial_credit(cfg)
    frontier = None
    if credit is not None:
        # micro needs only the credit totals, not the matchings behind them
        frontier = tuple(
            FrontierPoint(pt.p_sum, pt.r_sum) for pt in segment_frontier(seg, credit, budget)
        )
    return SegmentResult(tally(seg, cfg, budget), frontier, len(seg.hypothesis), len(seg.gold))


def _evaluate_all(args):
    seg, cfgs, budget = args
    return [evaluate_segment(seg, c, budget) for c in cfgs]


def evaluate_dataset(
    segments: Sequence[Segment],
    cfgs: Sequence[MeasureConfig],
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
    executor: Optional[Executor] = None,
) -> list[list[SegmentResult]]:
    """Per-segment results for each config, as ``results[config_index][segment_index]``.

    With ``workers > 1`` segments are scored in a process pool; results come
    back in input order so reductions are unaffected by the worker count.
    A caller running many evaluations can pass its own ``executor``.
    """
    jobs = [(seg, tuple(cfgs), budget) for seg in segments]
    if executor is not None and len(jobs) > 1:
        chunk = max(1, len(jobs) // (max(workers, 1) * 4))
        per_seg = list(executor.map(_evaluate_all, jobs, chunksize=chunk))
    elif workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return evaluate_dataset(segments, cfgs, workers, budget, pool)
    else:
        per_seg = [_evaluate_all(j) for j in jobs]
    return [[row[i] for row in per_seg] for i in range(len(cfgs))]


def _mean(values: Iterable[Fraction]) -> Fraction:
    values = list(values)
    return sum(values, Fraction(0)) / len(values)


def macro_average(
    seg_scores: Sequence[PRF],
    n_hyp_spans: int = 0,
    n_gold_spans: int = 0,
    config: Optional[MeasureConfig] = None,
) -> CorpusScore:
    """Arithmetic means of sample P, R and F (F is not recomputed from the means)."""
    if not seg_scores:
        raise EmptyDataset()
    prf = PRF(
        _mean(s.precision for s in seg_scores),
        _mean(s.recall for s in seg_scores),
        _mean(s.f for s in seg_scores),
        measure=config.name if config else seg_scores[0].measure,
        tau=config.param if config else seg_scores[0].tau,
        averaging="macro",
    )
    return CorpusScore(prf, len(seg_scores), n_hyp_spans, n_gold_spans, config)


def _joint_frontier_tally(results: Sequence[SegmentResult], p_den: int, r_den: int) -> Tally:
    front = [FrontierPoint(Fraction(0), Fraction(0))]
    for res in results:
        front = combine_frontiers(front, res.frontier)
    pt = best_point(front, p_den, r_den)
    return Tally(pt.p_sum, p_den, pt.r_sum, r_den)


def micro_from_results(results: Sequence[SegmentResult], cfg: MeasureConfig) -> CorpusScore:
    if not results:
        raise EmptyDataset()
    pooled = sum((r.tally for r in results), Tally())
    if results[0].frontier is not None:
        # partial-credit optimum is taken over the whole corpus at once, exactly
        # as if every segment were concatenated into one
        pooled = _joint_frontier_tally(results, pooled.p_den, pooled.r_den)
    return CorpusScore(
        pooled.prf(cfg, "micro"),
        len(results),
        sum(r.n_hyp for r in results),
        sum(r.n_gold for r in results),
        cfg,
    )


def macro_from_results(results: Sequence[SegmentResult], cfg: MeasureConfig) -> CorpusScore:
    return macro_average(
        [r.prf(cfg) for r in results],
        sum(r.n_hyp for r in results),
        sum(r.n_gold for r in results),
        cfg,
    )


def aggregate(results: Sequence[SegmentResult], cfg: MeasureConfig, averaging: str) -> CorpusScore:
    if averaging == "micro":
        return micro_from_results(results, cfg)
    if averaging == "macro":
        return macro_from_results(results, cfg)
    raise ValueError(f"unknown averaging mode {averaging!r}")


def score_dataset(
    dataset: Iterable[Segment],
    cfg: MeasureConfig,
    averaging: str = "micro",
    workers: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> CorpusScore:
    segments = list(dataset)
    if not segments:
        raise EmptyDataset()
    (results,) = evaluate_dataset(segments, [cfg], workers, budget)
    return aggregate(results, cfg, averaging)


def micro_em_mp(dataset: Iterable[Segment], cfg: MeasureConfig) -> CorpusScore:
    if cfg.kind not in (Kind.EM, Kind.MP):
        raise ValueError("micro_em_mp takes an em or mp measure")
    return score_dataset(dataset, cfg, "micro")


def micro_mpp(dataset: Iterable[Segment], budget: int = DEFAULT_BUDGET) -> CorpusScore:
    return score_dataset(dataset, MeasureConfig(Kind.MPP), "micro", budget=budget)


def micro_w(dataset: Iterable[Segment], kind: Kind) -> CorpusScore:
    """Pooled character-coverage (or best-match) statistics for the WMT-style measures.

    For W19 the span-level best-match credits of every span in the corpus
    are pooled before dividing; the WMT 2019 script itself only macro-averages.
    """
    kind = Kind(kind)
    if kind not in (Kind.W19, Kind.W23, Kind.W25, Kind.APPROX_W25):
        raise ValueError(f"micro_w does not handle {kind}")
    return score_dataset(dataset, MeasureConfig(kind), "micro")


def macro(dataset: Iterable[Segment], cfg: MeasureConfig) -> CorpusScore:
    return score_dataset(dataset, cfg, "macro")


def _shift(spans: Sequence[AnnotatedSpan], offset: int) -> list[AnnotatedSpan]:
    return [
        AnnotatedSpan(Span(a.start + offset, a.end + offset), a.severity, a.category, a.extra)
        for a in spans
    ]


def concatenate(dataset: Iterable[Segment]) -> Segment:
    """Join all segments into one, shifting spans by the preceding text length."""
    segments = list(dataset)
    if not segments:
        raise EmptyDataset()
    if len(segments) == 1:
        return segments[0]
    hyp: list[AnnotatedSpan] = []
    gold: list[AnnotatedSpan] = []
    offset = 0
    for seg in segments:
        hyp += _shift(seg.hypothesis, offset)
        gold += _shift(seg.gold, offset)
        offset += len(seg.text)
    return Segment(
        id="+".join(s.id for s in segments),
        text="".join(s.text for s in segments),
        hypothesis=tuple(hyp),
        gold=tuple(gold),
    )


def grouped(
    segments: Sequence[Segment], key: Callable[[Segment], Optional[str]]
) -> dict[str, list[Segment]]:
    """Split segments by ``key`` (sorted group names; ``None`` becomes ``"-"``)."""
    groups: dict[str, list[Segment]] = {}
    for seg in segments:
        groups.setdefault(key(seg) or "-", []).append(seg)
    return dict(sorted(groups.items()))


def mean_of_groups(scores: Sequence[CorpusScore], averaging: str) -> CorpusScore:
    """Average per-group corpus P, R and F (the cross-language-pair summary)."""
    if not scores:
        raise EmptyDataset()
    cfg = scores[0].config
    prf = PRF(
        _mean(s.precision for s in scores),
        _mean(s.recall for s in scores),
        _mean(s.f for s in scores),
        measure=cfg.name if cfg else scores[0].prf.measure,
        tau=cfg.param if cfg else scores[0].prf.tau,
        averaging=averaging,
    )
    return CorpusScore(
        prf,
        sum(s.n_segments for s in scores),
        sum(s.n_hyp_spans for s in scores),
        sum(s.n_gold_spans for s in scores),
        cfg,
    )
