"""One-to-one matching between hypothesis and gold spans.

Every solver returns the F-maximizing matching for its rule. Ties between
equal-F matchings are broken by the assignment vector ``(g_0, g_1, ...)``
where ``g_i`` is the gold index matched to hypothesis ``i`` (unmatched sorts
after every gold index); the smallest vector wins. The brute-force oracle
uses the same order, so solver and oracle agree on the matching itself,
not only on its score.

Partial-credit rules are solved exactly: the overlap graph is split into
connected components, each component's Pareto frontier of (precision
credit, recall credit) totals is computed, and frontiers are combined.
F is strictly increasing in both totals once the denominators are fixed,
so the optimum always sits on the combined frontier.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .core import Segment, SpanMetaError, harmonic_mean, overlap, ratio

DEFAULT_BUDGET = 2**20
MAX_BRUTE_FORCE_CANDIDATES = 25


class InvalidTau(SpanMetaError):
    def __init__(self, tau):
        self.tau = tau
        super().__init__(f"tau must be an integer >= 1, got {tau!r}")


class ComponentTooLarge(SpanMetaError):
    def __init__(self, limit: int, n_hyp: int, n_gold: int):
        self.limit = limit
        super().__init__(
            f"exact search over a component with {n_hyp} hypothesis and {n_gold} gold "
            f"spans exceeds the enumeration budget of {limit} states"
        )


class TooManyCandidates(SpanMetaError):
    def __init__(self, n: int, limit: int):
        self.n, self.limit = n, limit
        super().__init__(f"{n} candidate pairs exceed the brute-force cap of {limit}")


@dataclass(frozen=True)
class Rule:
    """Which pairs may be matched: ``em``, ``mp`` (overlap >= tau) or ``mpp``."""

    kind: str
    tau: int = 1

    def __post_init__(self):
        if self.kind not in ("em", "mp", "mpp"):
            raise ValueError(f"unknown matching rule {self.kind!r}")
        if not isinstance(self.tau, int) or isinstance(self.tau, bool) or self.tau < 1:
            raise InvalidTau(self.tau)


EM = Rule("em")
MPP = Rule("mpp")


def MP(tau: int = 1) -> Rule:
    return Rule("mp", tau)


@dataclass(frozen=True)
class CandidatePair:
    hyp_index: int
    gold_index: int
    overlap_len: int
    hyp_len: int
    gold_len: int


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((int(h), int(g)) for h, g in self.pairs))
        hyps = [h for h, _ in pairs]
        golds = [g for _, g in pairs]
        if len(set(hyps)) != len(hyps) or len(set(golds)) != len(golds):
            raise ValueError(f"matching is not one-to-one: {pairs}")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def assignment(self, n_hyp: int, n_gold: int) -> tuple[int, ...]:
        """Tie-break key: gold index per hypothesis, ``n_gold`` where unmatched."""
        vec = [n_gold] * n_hyp
        for h, g in self.pairs:
            vec[h] = g
        return tuple(vec)


def candidate_pairs(seg: Segment, rule: Rule) -> list[CandidatePair]:
    """All (hyp, gold) pairs admissible under ``rule``, ordered by hyp then gold index."""
    if rule.kind == "mp":
        tau = rule.tau
    elif rule.kind == "mpp":
        tau = 1
    else:
        tau = None
    out = []
    for i, h in enumerate(seg.hyp_spans):
        for j, g in enumerate(seg.gold_spans):
            if tau is None:
                if h != g:
                    continue
                ov = len(h)
            else:
                ov = overlap(h, g)
                if ov < tau:
                    continue
            out.append(CandidatePair(i, j, ov, len(h), len(g)))
    return out


def _adjacency(n_hyp: int, cands: Iterable[CandidatePair]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n_hyp)]
    for c in cands:
        adj[c.hyp_index].append(c.gold_index)
    return adj


def _max_matching_size(adj: Sequence[Sequence[int]], hyps: Iterable[int], blocked: set[int]) -> int:
    """Kuhn's augmenting-path algorithm restricted to ``hyps`` and unblocked golds."""
    owner: dict[int, int] = {}

    def augment(h: int, seen: set[int]) -> bool:
        for g in adj[h]:
            if g in blocked or g in seen:
                continue
            seen.add(g)
            if g not in owner or augment(owner[g], seen):
                owner[g] = h
                return True
        return False

    return sum(1 for h in hyps if augment(h, set()))


def lexmin_maximum_matching(n_hyp: int, cands: Sequence[CandidatePair]) -> Matching:
    """Maximum-cardinality matching over ``cands`` with the smallest assignment vector.

    Fixes hypotheses one at a time, giving each the smallest gold index that
    still admits a maximum matching on the remaining spans.
    """
    adj = _adjacency(n_hyp, cands)
    used: set[int] = set()
    remaining = _max_matching_size(adj, range(n_hyp), used)
    pairs = []
    for i in range(n_hyp):
        if remaining == 0:
            break
        for g in adj[i]:
            if g in used:
                continue
            used.add(g)
            if 1 + _max_matching_size(adj, range(i + 1, n_hyp), used) == remaining:
                pairs.append((i, g))
                remaining -= 1
                break
            used.discard(g)
    return Matching(tuple(pairs))


def optimal_matching_em(seg: Segment) -> Matching:
    """Exact-match pairs: per distinct offset, the k-th hypothesis copy takes the k-th gold copy."""
    free: dict[tuple[int, int], list[int]] = {}
    for j, g in enumerate(seg.gold_spans):
        free.setdefault((g.start, g.end), []).append(j)
    pairs = []
    for i, h in enumerate(seg.hyp_spans):
        bucket = free.get((h.start, h.end))
        if bucket:
            pairs.append((i, bucket.pop(0)))
    return Matching(tuple(pairs))


def optimal_matching_mp(seg: Segment, tau: int = 1) -> Matching:
    """F for count-based rules grows with ``|M|``, so a maximum matching is optimal."""
    rule = MP(tau)
    return lexmin_maximum_matching(len(seg.hypothesis), candidate_pairs(seg, rule))


# --- partial credit ---------------------------------------------------------

CreditFn = Callable[[CandidatePair], tuple[Fraction, Fraction]]


def mpp_credit(c: CandidatePair) -> tuple[Fraction, Fraction]:
    """Per-pair precision and recall credit: overlap over each span's own length."""
    return Fraction(c.overlap_len, c.hyp_len), Fraction(c.overlap_len, c.gold_len)


def overlap_credit(c: CandidatePair) -> tuple[Fraction, Fraction]:
    """Raw overlapping characters on both sides (denominators are total span lengths)."""
    return Fraction(c.overlap_len), Fraction(c.overlap_len)


@dataclass(frozen=True)
class FrontierPoint:
    p_sum: Fraction
    r_sum: Fraction
    pairs: tuple[tuple[int, int], ...] = ()


def pareto_prune(points: Iterable[FrontierPoint], key=None) -> list[FrontierPoint]:
    """Keep non-dominated points; among equal points keep the one with the smallest ``key``."""
    best: dict[tuple[Fraction, Fraction], FrontierPoint] = {}
    for pt in points:
        k = (pt.p_sum, pt.r_sum)
        cur = best.get(k)
        if cur is None or (key is not None and key(pt) < key(cur)):
            best[k] = pt
    ordered = sorted(best.values(), key=lambda pt: (-pt.p_sum, -pt.r_sum))
    front = []
    max_r: Optional[Fraction] = None
    for pt in ordered:
        if max_r is None or pt.r_sum > max_r:
            front.append(pt)
            max_r = pt.r_sum
    return front


def combine_frontiers(a: Sequence[FrontierPoint], b: Sequence[FrontierPoint], key=None) -> list[FrontierPoint]:
    merged = (
        FrontierPoint(x.p_sum + y.p_sum, x.r_sum + y.r_sum, tuple(sorted(x.pairs + y.pairs)))
        for x in a
        for y in b
    )
    return pareto_prune(merged, key)


def _components(cands: Sequence[CandidatePair]) -> list[list[CandidatePair]]:
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in cands:
        ra, rb = find(("h", c.hyp_index)), find(("g", c.gold_index))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for c in cands:
        groups.setdefault(find(("h", c.hyp_index)), []).append(c)
    # deterministic: components ordered by their smallest hypothesis index
    return sorted(groups.values(), key=lambda cs: cs[0].hyp_index)


def component_frontier(cands: Sequence[CandidatePair], credit: CreditFn, budget: int = DEFAULT_BUDGET) -> list[FrontierPoint]:
    """Pareto frontier of credit totals over every one-to-one matching of one component.

    Dynamic programme over (hypothesis position, set of golds already used);
    each state keeps only its own non-dominated suffix totals. Options are
    tried smallest gold first and "unmatched" last, and the first suffix to
    reach a total is kept, so every total carries its tie-break winner.
    Raises :class:`ComponentTooLarge` once more than ``budget`` states are needed.
    """
    hyps = sorted({c.hyp_index for c in cands})
    golds = sorted({c.gold_index for c in cands})
    bit = {g: 1 << i for i, g in enumerate(golds)}
    options: dict[int, list[tuple[int, Fraction, Fraction]]] = {h: [] for h in hyps}
    for c in sorted(cands, key=lambda c: (c.hyp_index, c.gold_index)):
        p, r = credit(c)
        options[c.hyp_index].append((c.gold_index, p, r))

    memo: dict[tuple[int, int], list[FrontierPoint]] = {}
    empty = [FrontierPoint(Fraction(0), Fraction(0))]

    def solve(pos: int, used: int) -> list[FrontierPoint]:
        if pos == len(hyps):
            return empty
        key = (pos, used)
        if key in memo:
            return memo[key]
        if len(memo) >= budget:
            raise ComponentTooLarge(budget, len(hyps), len(golds))
        h = hyps[pos]
        found: dict[tuple[Fraction, Fraction], FrontierPoint] = {}
        for g, p, r in options[h]:
            if used & bit[g]:
                continue
            for sub in solve(pos + 1, used | bit[g]):
                total = (p + sub.p_sum, r + sub.r_sum)
                if total not in found:
                    found[total] = FrontierPoint(total[0], total[1], ((h, g),) + sub.pairs)
        for sub in solve(pos + 1, used):
            total = (sub.p_sum, sub.r_sum)
            if total not in found:
                found[total] = sub
        memo[key] = pareto_prune(found.values())
        return memo[key]

    return solve(0, 0)


def segment_frontier(seg: Segment, credit: CreditFn = mpp_credit, budget: int = DEFAULT_BUDGET) -> list[FrontierPoint]:
    """Combined frontier for a whole segment, tie-break winners kept per total."""
    n_hyp, n_gold = len(seg.hypothesis), len(seg.gold)

    def key(pt: FrontierPoint):
        return Matching(pt.pairs).assignment(n_hyp, n_gold)

    front = [FrontierPoint(Fraction(0), Fraction(0))]
    for comp in _components(candidate_pairs(seg, MPP)):
        front = combine_frontiers(front, component_frontier(comp, credit, budget), key)
    return front


def best_point(front: Sequence[FrontierPoint], p_den, r_den, key=None) -> FrontierPoint:
    """Frontier point maximizing the harmonic mean of ``p_sum/p_den`` and ``r_sum/r_den``."""
    best, best_f = None, None
    for pt in front:
        f = harmonic_mean(ratio(pt.p_sum, p_den), ratio(pt.r_sum, r_den))
        if best is None or f > best_f or (f == best_f and key is not None and key(pt) < key(best)):
            best, best_f = pt, f
    return best


def _optimal_partial(seg: Segment, credit: CreditFn, p_den, r_den, budget: int):
    n_hyp, n_gold = len(seg.hypothesis), len(seg.gold)
    front = segment_frontier(seg, credit, budget)
    pt = best_point(front, p_den, r_den, key=lambda q: Matching(q.pairs).assignment(n_hyp, n_gold))
    return Matching(pt.pairs), pt.p_sum, pt.r_sum


def optimal_matching_mpp(seg: Segment, budget: int = DEFAULT_BUDGET) -> tuple[Matching, Fraction, Fraction]:
    """F-maximizing one-to-one matching with per-pair partial credit.

    Returns the matching and its precision and recall credit sums (before
    dividing by the number of hypothesis and gold spans).
    """
    return _optimal_partial(seg, mpp_credit, len(seg.hypothesis), len(seg.gold), budget)


def optimal_matching_overlap(seg: Segment, budget: int = DEFAULT_BUDGET) -> tuple[Matching, Fraction, Fraction]:
    """Like :func:`optimal_matching_mpp` but crediting raw overlap characters."""
    p_den = sum(len(s) for s in seg.hyp_spans)
    r_den = sum(len(s) for s in seg.gold_spans)
    return _optimal_partial(seg, overlap_credit, p_den, r_den, budget)


# --- oracle -----------------------------------------------------------------

Scorer = Callable[[Segment, Sequence[CandidatePair]], Fraction]


def count_f(seg: Segment, pairs: Sequence[CandidatePair]) -> Fraction:
    tp = len(pairs)
    return harmonic_mean(ratio(tp, len(seg.hypothesis)), ratio(tp, len(seg.gold)))


def mpp_f(seg: Segment, pairs: Sequence[CandidatePair]) -> Fraction:
    p = sum((mpp_credit(c)[0] for c in pairs), Fraction(0))
    r = sum((mpp_credit(c)[1] for c in pairs), Fraction(0))
    return harmonic_mean(ratio(p, len(seg.hypothesis)), ratio(r, len(seg.gold)))


def overlap_f(seg: Segment, pairs: Sequence[CandidatePair]) -> Fraction:
    ov = sum(c.overlap_len for c in pairs)
    p_den = sum(len(s) for s in seg.hyp_spans)
    r_den = sum(len(s) for s in seg.gold_spans)
    return harmonic_mean(ratio(ov, p_den), ratio(ov, r_den))


def brute_force_matching(
    seg: Segment,
    rule: Rule,
    scorer: Optional[Scorer] = None,
    max_candidates: int = MAX_BRUTE_FORCE_CANDIDATES,
) -> Matching:
    """Score every one-to-one subset of the candidate pairs and return the best.

    Exponential; meant only as a test oracle for the solvers above.
    """
    cands = candidate_pairs(seg, rule)
    if len(cands) > max_candidates:
        raise TooManyCandidates(len(cands), max_candidates)
    if scorer is None:
        scorer = mpp_f if rule.kind == "mpp" else count_f
    by_hyp: dict[int, list[CandidatePair]] = {}
    for c in cands:
        by_hyp.setdefault(c.hyp_index, []).append(c)
    hyps = sorted(by_hyp)

    best_pairs: list[CandidatePair] = []
    best_f: Optional[Fraction] = None
    chosen: list[CandidatePair] = []
    used: set[int] = set()

    # assignment-vector order: smaller gold first, unmatched last; strict '>'
    # keeps the first (smallest) maximizer
    def visit(pos: int):
        nonlocal best_pairs, best_f
        if pos == len(hyps):
            f = scorer(seg, chosen)
            if best_f is None or f > best_f:
                best_f, best_pairs = f, list(chosen)
            return
        for c in by_hyp[hyps[pos]]:
            if c.gold_index in used:
                continue
            used.add(c.gold_index)
            chosen.append(c)
            visit(pos + 1)
            chosen.pop()
            used.discard(c.gold_index)
        visit(pos + 1)

    visit(0)
    return Matching(tuple((c.hyp_index, c.gold_index) for c in best_pairs))
