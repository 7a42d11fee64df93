"""Built-in consistency checks run by ``spanmeta selfcheck``."""

from __future__ import annotations

import random
from fractions import Fraction as F

from . import matching, measures
from .aggregate import concatenate, micro_em_mp, micro_mpp
from .fixtures import quick_fox, quick_fox_overlapping, random_dataset, random_segment
from .matching import EM, MP, MPP, brute_force_matching, count_f, mpp_f, overlap_f
from .measures import Kind, MeasureConfig
from .sentinels import PerturbationSpec


def _expect(actual, expected) -> str:
    return "" if tuple(actual) == tuple(expected) else f"got {tuple(map(str, actual))}, want {tuple(map(str, expected))}"


def _fixture_checks():
    fox, over = quick_fox(), quick_fox_overlapping()
    yield "quick-fox em", _expect(measures.score_em(fox), (F(1, 2),) * 3)
    yield "quick-fox mp:1", _expect(measures.score_mp(fox, 1), (F(1),) * 3)
    yield "quick-fox mpp", _expect(measures.score_mpp(fox), (F(7, 9), F(1), F(7, 8)))
    w19 = measures.score_w19(over)
    yield "overlapping w19", _expect(w19.as_tuple()[:2], (F(7, 9), F(1)))
    w25 = measures.score_w25(over)
    yield "overlapping w25", _expect(w25.as_tuple()[:2], (F(11, 12), F(1)))
    mpp = measures.score_mpp(over)
    yield "overlapping mpp", _expect(mpp.as_tuple()[:2], (F(7, 9), F(2, 3)))


ORACLE_CASES = [
    ("em", EM, count_f, lambda s: measures.score_em(s).f),
    ("mp:1", MP(1), count_f, lambda s: measures.score_mp(s, 1).f),
    ("mp:3", MP(3), count_f, lambda s: measures.score_mp(s, 3).f),
    ("mpp", MPP, mpp_f, lambda s: measures.score_mpp(s).f),
    ("approx-w25", MPP, overlap_f, lambda s: measures.score_approx_w25(s).f),
]


def oracle_mismatches(segments, cases=ORACLE_CASES):
    """(case name, segment) pairs where solver F differs from brute-force F."""
    bad = []
    for seg in segments:
        for name, rule, scorer, solver in cases:
            m = brute_force_matching(seg, rule, scorer)
            pairs = [c for c in matching.candidate_pairs(seg, rule) if (c.hyp_index, c.gold_index) in set(m.pairs)]
            if scorer(seg, pairs) != solver(seg):
                bad.append((name, seg))
    return bad


def _oracle_check(n: int, seed: int) -> str:
    rng = random.Random(seed)
    segs = [random_segment(rng, max_len=60, max_spans=5, seg_id=f"r{i}") for i in range(n)]
    bad = oracle_mismatches(segs)
    if bad:
        name, seg = bad[0]
        return f"{len(bad)} mismatches, first under {name} on {seg}"
    return ""


def _concat_check(n: int, seed: int) -> str:
    rng = random.Random(seed)
    for _ in range(n):
        ds = random_dataset(rng, max_segments=5, max_len=30, max_spans=4)
        joined = concatenate(ds)
        for cfg in (MeasureConfig(Kind.EM), MeasureConfig(Kind.MP, 1)):
            if micro_em_mp(ds, cfg).prf.as_tuple() != measures.score(joined, cfg).as_tuple():
                return f"{cfg.name} micro differs from concatenation"
        if micro_mpp(ds).prf.as_tuple() != measures.score_mpp(joined).as_tuple():
            return "mpp micro differs from concatenation"
    return ""


def _determinism_check(seed: int) -> str:
    rng = random.Random(seed)
    ds = list(random_dataset(rng, max_segments=6))
    spec = PerturbationSpec("drop", 0.5, seed=seed, repetitions=2)
    first = [spec.apply_all(ds, r) for r in range(2)]
    second = [spec.apply_all(list(reversed(ds)), r)[::-1] for r in range(2)]
    return "" if first == second else "drop perturbation depends on segment order"


def run_selfcheck(n_random: int = 200, seed: int = 2025, out=print) -> bool:
    checks = list(_fixture_checks())
    checks.append((f"oracle equivalence on {n_random} random segments", _oracle_check(n_random, seed)))
    checks.append(("micro equals concatenation", _concat_check(50, seed)))
    checks.append(("drop streams independent of order", _determinism_check(seed)))
    ok = True
    for name, problem in checks:
        out(f"{'FAIL' if problem else 'PASS'}  {name}{': ' + problem if problem else ''}")
        ok = ok and not problem
    out(f"{sum(1 for _, p in checks if not p)}/{len(checks)} checks passed")
    return ok
