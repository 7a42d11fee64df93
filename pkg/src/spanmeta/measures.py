"""Sample-level precision, recall and F-score for every supported measure.

Each measure reduces a segment to a :class:`Tally` of precision and recall
numerators and denominators. Sample scores divide once; micro averages sum
tallies first. Empty denominators follow one convention everywhere:
precision is 1 with no hypothesis spans, recall is 1 with no gold spans,
and F is 0 whenever exactly one side is empty. This applies to the
WMT-style coverage measures too, whose original scripts may treat empty
documents differently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import matching
from .core import Segment, SpanMetaError, harmonic_mean, overlap, ratio
from .matching import DEFAULT_BUDGET, Rule


class CountInconsistent(SpanMetaError):
    pass


class Kind(str, enum.Enum):
    EM = "em"
    MP = "mp"
    MPP = "mpp"
    APPROX_W25 = "approx-w25"
    W19 = "w19"
    W23 = "w23"
    W25 = "w25"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MeasureConfig:
    kind: Kind
    tau: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not isinstance(self.tau, int) or self.tau < 1:
            raise matching.InvalidTau(self.tau)

    @classmethod
    def parse(cls, text: str) -> "MeasureConfig":
        """Parse ``em``, ``mp``, ``mp:<tau>``, ``mpp``, ``w19`` ... as used on the command line."""
        name, _, arg = text.strip().lower().partition(":")
        if name == "mp":
            try:
                tau = int(arg) if arg else 1
            except ValueError:
                raise matching.InvalidTau(arg) from None
            return cls(Kind.MP, tau)
        if arg:
            raise ValueError(f"measure {name!r} takes no parameter")
        return cls(Kind(name))

    @property
    def name(self) -> str:
        return f"mp:{self.tau}" if self.kind is Kind.MP else self.kind.value

    @property
    def param(self) -> Optional[int]:
        return self.tau if self.kind is Kind.MP else None

    @property
    def rule(self) -> Optional[Rule]:
        if self.kind is Kind.EM:
            return matching.EM
        if self.kind is Kind.MP:
            return matching.MP(self.tau)
        if self.kind in (Kind.MPP, Kind.APPROX_W25):
            return matching.MPP
        return None

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class PRF:
    precision: Fraction
    recall: Fraction
    f: Fraction
    measure: str = ""
    tau: Optional[int] = None
    averaging: str = "sample"

    def __iter__(self):
        return iter((self.precision, self.recall, self.f))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.precision, self.recall, self.f


@dataclass(frozen=True)
class Tally:
    """Precision/recall numerators and denominators, additive across segments."""

    p_num: Fraction = Fraction(0)
    p_den: int = 0
    r_num: Fraction = Fraction(0)
    r_den: int = 0

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(
            self.p_num + other.p_num,
            self.p_den + other.p_den,
            self.r_num + other.r_num,
            self.r_den + other.r_den,
        )

    def prf(self, cfg: Optional[MeasureConfig] = None, averaging: str = "sample") -> PRF:
        p = ratio(self.p_num, self.p_den)
        r = ratio(self.r_num, self.r_den)
        return PRF(
            p, r, harmonic_mean(p, r),
            measure=cfg.name if cfg else "",
            tau=cfg.param if cfg else None,
            averaging=averaging,
        )


def prf_from_counts(tp: int, hyp_total: int, gold_total: int) -> PRF:
    if min(tp, hyp_total, gold_total) < 0 or tp > hyp_total or tp > gold_total:
        raise CountInconsistent(f"tp={tp} with hyp_total={hyp_total}, gold_total={gold_total}")
    return Tally(Fraction(tp), hyp_total, Fraction(tp), gold_total).prf()


def _count_tally(seg: Segment, tp: int) -> Tally:
    return Tally(Fraction(tp), len(seg.hypothesis), Fraction(tp), len(seg.gold))


def tally_em(seg: Segment) -> Tally:
    return _count_tally(seg, len(matching.optimal_matching_em(seg)))


def tally_mp(seg: Segment, tau: int = 1) -> Tally:
    return _count_tally(seg, len(matching.optimal_matching_mp(seg, tau)))


def tally_mpp(seg: Segment, budget: int = DEFAULT_BUDGET) -> Tally:
    _, p, r = matching.optimal_matching_mpp(seg, budget)
    return Tally(p, len(seg.hypothesis), r, len(seg.gold))


def tally_approx_w25(seg: Segment, budget: int = DEFAULT_BUDGET) -> Tally:
    _, p, r = matching.optimal_matching_overlap(seg, budget)
    return Tally(
        p, sum(len(s) for s in seg.hyp_spans),
        r, sum(len(s) for s in seg.gold_spans),
    )


def _best_match_credit(spans, others) -> Fraction:
    # ties resolve to the lowest-index counterpart; only the overlap size matters
    total = Fraction(0)
    for s in spans:
        best = max((overlap(s, o) for o in others), default=0)
        total += Fraction(best, len(s))
    return total


def tally_w19(seg: Segment) -> Tally:
    hyp, gold = seg.hyp_spans, seg.gold_spans
    return Tally(
        _best_match_credit(hyp, gold), len(hyp),
        _best_match_credit(gold, hyp), len(gold),
    )


def best_matches(seg: Segment) -> tuple[list[Optional[int]], list[Optional[int]]]:
    """Best-matching counterpart index per hypothesis and per gold span (``None`` if no overlap)."""

    def bm(spans, others):
        out = []
        for s in spans:
            best, best_ov = None, 0
            for j, o in enumerate(others):
                ov = overlap(s, o)
                if ov > best_ov:
                    best, best_ov = j, ov
            out.append(best)
        return out

    return bm(seg.hyp_spans, seg.gold_spans), bm(seg.gold_spans, seg.hyp_spans)


def coverage_counts(spans, n: int) -> list[int]:
    """How many spans cover each character position."""
    diff = [0] * (n + 1)
    for s in spans:
        diff[s.start] += 1
        diff[s.end] -= 1
    counts, run = [], 0
    for d in diff[:n]:
        run += d
        counts.append(run)
    return counts


def _text_extent(seg: Segment) -> int:
    ends = [s.end for s in seg.hyp_spans + seg.gold_spans]
    return max([len(seg.text)] + ends)


def tally_w23(seg: Segment) -> Tally:
    n = _text_extent(seg)
    ch = coverage_counts(seg.hyp_spans, n)
    cg = coverage_counts(seg.gold_spans, n)
    both = sum(1 for a, b in zip(ch, cg) if a and b)
    return Tally(
        Fraction(both), sum(1 for a in ch if a),
        Fraction(both), sum(1 for b in cg if b),
    )


def tally_w25(seg: Segment) -> Tally:
    n = _text_extent(seg)
    ch = coverage_counts(seg.hyp_spans, n)
    cg = coverage_counts(seg.gold_spans, n)
    shared = sum(min(a, b) for a, b in zip(ch, cg))
    return Tally(Fraction(shared), sum(ch), Fraction(shared), sum(cg))


def tally(seg: Segment, cfg: MeasureConfig, budget: int = DEFAULT_BUDGET) -> Tally:
    kind = cfg.kind
    if kind is Kind.EM:
        return tally_em(seg)
    if kind is Kind.MP:
        return tally_mp(seg, cfg.tau)
    if kind is Kind.MPP:
        return tally_mpp(seg, budget)
    if kind is Kind.APPROX_W25:
        return tally_approx_w25(seg, budget)
    if kind is Kind.W19:
        return tally_w19(seg)
    if kind is Kind.W23:
        return tally_w23(seg)
    return tally_w25(seg)


def score(seg: Segment, cfg: MeasureConfig, budget: int = DEFAULT_BUDGET) -> PRF:
    return tally(seg, cfg, budget).prf(cfg)


def score_em(seg: Segment) -> PRF:
    return score(seg, MeasureConfig(Kind.EM))


def score_mp(seg: Segment, tau: int = 1) -> PRF:
    return score(seg, MeasureConfig(Kind.MP, tau))


def score_mpp(seg: Segment, budget: int = DEFAULT_BUDGET) -> PRF:
    return score(seg, MeasureConfig(Kind.MPP), budget)


def score_approx_w25(seg: Segment, budget: int = DEFAULT_BUDGET) -> PRF:
    return score(seg, MeasureConfig(Kind.APPROX_W25), budget)


def score_w19(seg: Segment) -> PRF:
    return score(seg, MeasureConfig(Kind.W19))


def score_w23(seg: Segment) -> PRF:
    return score(seg, MeasureConfig(Kind.W23))


def score_w25(seg: Segment) -> PRF:
    return score(seg, MeasureConfig(Kind.W25))
