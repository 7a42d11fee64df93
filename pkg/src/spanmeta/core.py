"""Span and segment data model.

Offsets count Unicode scalar values (Python ``str`` indices) and are stored
0-based, half-open: ``Span(4, 9)`` covers ``text[4:9]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional


class SpanMetaError(Exception):
    """Base class for all errors raised by this package."""


class EmptySpan(SpanMetaError):
    def __init__(self, start: int, end: int, where: str = ""):
        self.start, self.end, self.where = start, end, where
        msg = f"empty or inverted span ({start}, {end})"
        super().__init__(f"{where}: {msg}" if where else msg)


class OutOfBounds(SpanMetaError):
    def __init__(self, span: "Span", text_len: int, where: str = ""):
        self.span, self.text_len, self.where = span, text_len, where
        msg = f"span ({span.start}, {span.end}) exceeds text length {text_len}"
        super().__init__(f"{where}: {msg}" if where else msg)


class DuplicateSegmentId(SpanMetaError):
    def __init__(self, seg_id: str):
        self.seg_id = seg_id
        super().__init__(f"duplicate segment id {seg_id!r}")


class InvalidSegment(SpanMetaError):
    """Raised by :func:`validate_segment`; ``problems`` lists every violation."""

    def __init__(self, seg_id: str, problems: list[SpanMetaError]):
        self.seg_id = seg_id
        self.problems = problems
        lines = "; ".join(str(p) for p in problems)
        super().__init__(f"segment {seg_id!r}: {lines}")


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0:
            raise OutOfBounds(self, -1)
        if self.end <= self.start:
            raise EmptySpan(self.start, self.end)

    def __len__(self) -> int:
        return self.end - self.start

    @classmethod
    def from_one_based(cls, i: int, j: int) -> "Span":
        """Build from a 1-based inclusive ``(i, j)`` pair."""
        return cls(i - 1, j)

    def to_one_based(self) -> tuple[int, int]:
        return self.start + 1, self.end


@dataclass(frozen=True)
class AnnotatedSpan:
    """A span plus labels that are carried through I/O but never scored."""

    span: Span
    severity: Optional[str] = None
    category: Optional[str] = None
    extra: dict[str, Any] = field(default_factory=dict, compare=True, hash=False)

    @property
    def start(self) -> int:
        return self.span.start

    @property
    def end(self) -> int:
        return self.span.end

    def __len__(self) -> int:
        return len(self.span)


def _annotate(s) -> AnnotatedSpan:
    if isinstance(s, AnnotatedSpan):
        return s
    if isinstance(s, Span):
        return AnnotatedSpan(s)
    start, end = s
    return AnnotatedSpan(Span(start, end))


@dataclass(frozen=True)
class Segment:
    id: str
    text: str
    hypothesis: tuple[AnnotatedSpan, ...] = ()
    gold: tuple[AnnotatedSpan, ...] = ()
    system: Optional[str] = None
    lang_pair: Optional[str] = None
    extra: dict[str, Any] = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        # accept lists of Span / (start, end) tuples for convenience
        object.__setattr__(self, "hypothesis", tuple(_annotate(s) for s in self.hypothesis))
        object.__setattr__(self, "gold", tuple(_annotate(s) for s in self.gold))

    def __len__(self) -> int:
        return len(self.text)

    @property
    def hyp_spans(self) -> list[Span]:
        return [a.span for a in self.hypothesis]

    @property
    def gold_spans(self) -> list[Span]:
        return [a.span for a in self.gold]

    def replace(self, **changes) -> "Segment":
        fields = dict(
            id=self.id, text=self.text, hypothesis=self.hypothesis, gold=self.gold,
            system=self.system, lang_pair=self.lang_pair, extra=self.extra,
        )
        fields.update(changes)
        return Segment(**fields)


@dataclass(frozen=True)
class Dataset:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)


def span_length(s: Span) -> int:
    return s.end - s.start


def overlap(a: Span, b: Span) -> int:
    """Number of character positions shared by ``a`` and ``b``."""
    return max(0, min(a.end, b.end) - max(a.start, b.start))


def union_length(a: Span, b: Span) -> int:
    return span_length(a) + span_length(b) - overlap(a, b)


def validate_segment(seg: Segment) -> Segment:
    """Return ``seg`` unchanged, or raise :class:`InvalidSegment` listing each bad span."""
    n = len(seg.text)
    problems: list[SpanMetaError] = []
    for side, spans in (("hypothesis", seg.hypothesis), ("gold", seg.gold)):
        for idx, a in enumerate(spans):
            where = f"{seg.id}.{side}[{idx}]"
            if a.span.end > n:
                problems.append(OutOfBounds(a.span, n, where))
    if problems:
        raise InvalidSegment(seg.id, problems)
    return seg


def validate_dataset(segments: Iterable[Segment]) -> Dataset:
    """Validate every segment and check ids are unique per system."""
    seen: set[tuple[Optional[str], str]] = set()
    out = []
    for seg in segments:
        key = (seg.system, seg.id)
        if key in seen:
            raise DuplicateSegmentId(seg.id)
        seen.add(key)
        out.append(validate_segment(seg))
    return Dataset(tuple(out))


def ratio(num, den) -> Fraction:
    """``num / den``, or 1 when the denominator is zero (nothing to get wrong)."""
    if den == 0:
        return Fraction(1)
    return Fraction(num) / den


def harmonic_mean(p: Fraction, r: Fraction) -> Fraction:
    if p + r == 0:
        return Fraction(0)
    return 2 * p * r / (p + r)
