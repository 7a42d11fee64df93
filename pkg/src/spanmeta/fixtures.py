"""Bundled example segments and random generators used by tests and ``selfcheck``."""

from __future__ import annotations

import random
from importlib import resources

from .core import Dataset, Segment, Span

QUICK_FOX_TEXT = "The quick brown fox jumps"

THE = Span(0, 3)
QUICK = Span(4, 9)
THE_QUICK = Span(0, 9)
FOX = Span(16, 19)


def quick_fox() -> Segment:
    """Two hypothesis spans ("The quick", "fox") against gold ("quick", "fox")."""
    return Segment("quick-fox", QUICK_FOX_TEXT, hypothesis=[THE_QUICK, FOX], gold=[QUICK, FOX])


def quick_fox_overlapping() -> Segment:
    """Hypothesis "The quick" overlaps two gold spans, "The" and "quick"."""
    return Segment(
        "quick-fox-overlapping", QUICK_FOX_TEXT,
        hypothesis=[THE_QUICK, FOX], gold=[THE, QUICK, FOX],
    )


def fixture_path(name: str):
    """Path-like handle to a bundled JSONL fixture (``quick_fox`` or ``quick_fox_overlapping``)."""
    return resources.files("spanmeta") / "data" / f"{name}.jsonl"


SPARSE_TEXT = "the cat sat on the mat"


def sparse_gaming_dataset() -> Dataset:
    """100 segments, 60 of them error-free in the gold yet flagged once by the hypothesis.

    The other 40 carry gold errors: 30 with a single exactly-found error and
    10 with two errors, one found exactly and one found too wide. Emptying
    every hypothesis with at most one span trades 30 true detections for 60
    avoided false alarms.
    """
    cat, the, on_the = Span(4, 7), Span(15, 18), Span(12, 18)
    segs = []
    for i in range(60):
        segs.append(Segment(f"clean-{i:02d}", SPARSE_TEXT, hypothesis=[cat], gold=[]))
    for i in range(30):
        segs.append(Segment(f"single-{i:02d}", SPARSE_TEXT, hypothesis=[cat], gold=[cat]))
    for i in range(10):
        segs.append(Segment(f"double-{i:02d}", SPARSE_TEXT, hypothesis=[cat, on_the], gold=[cat, the]))
    return Dataset(segs)


def random_spans(rng: random.Random, n_chars: int, max_spans: int) -> list[Span]:
    out = []
    for _ in range(rng.randint(0, max_spans)):
        start = rng.randrange(n_chars)
        # favour short spans so overlaps are partial more often than total
        end = min(n_chars, start + 1 + int(rng.expovariate(1 / 6)))
        out.append(Span(start, end))
    return out


def random_segment(rng: random.Random, max_len: int = 60, max_spans: int = 5, seg_id: str = "rand") -> Segment:
    n = rng.randint(1, max_len)
    text = "".join(rng.choice("abcdefgh ") for _ in range(n))
    hyp = random_spans(rng, n, max_spans)
    gold = random_spans(rng, n, max_spans)
    if hyp and rng.random() < 0.3:
        # reuse some offsets so exact matches and duplicates occur
        gold.extend(rng.sample(hyp, rng.randint(1, len(hyp))))
        gold = gold[:max_spans]
        rng.shuffle(gold)
    return Segment(seg_id, text, hypothesis=hyp, gold=gold)


def random_dataset(rng: random.Random, max_segments: int = 6, **kwargs) -> Dataset:
    n = rng.randint(1, max_segments)
    return Dataset([random_segment(rng, seg_id=f"r{i}", **kwargs) for i in range(n)])
