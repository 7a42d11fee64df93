"""Sentinel perturbations of hypothesis annotations.

Randomness comes from numpy's Philox-4x64 counter-based generator. Each
segment gets its own stream whose 128-bit key is the first 16 bytes of
SHA-256 over ``"<master seed>:<repetition>:<segment id>"``, so the spans
dropped from a segment never depend on processing order or worker count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import AnnotatedSpan, Segment, Span, SpanMetaError


class InvalidPerturbation(SpanMetaError):
    pass


def extend_spans(seg: Segment, k: int) -> Segment:
    """Widen each hypothesis span by ``k`` characters per side, clipped to the text."""
    if k < 0:
        raise InvalidPerturbation(f"extension must be >= 0, got {k}")
    if k == 0:
        return seg
    n = len(seg.text)
    hyp = tuple(
        AnnotatedSpan(Span(max(0, a.start - k), min(n, a.end + k)), a.severity, a.category, a.extra)
        for a in seg.hypothesis
    )
    return seg.replace(hypothesis=hyp)


def segment_stream(master_seed: int, segment_id: str, repetition: int = 0) -> np.random.Generator:
    digest = hashlib.sha256(f"{master_seed}:{repetition}:{segment_id}".encode("utf-8")).digest()
    key = np.frombuffer(digest[:16], dtype="<u8").astype(np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def drop_spans(seg: Segment, p: float, rng: np.random.Generator) -> Segment:
    """Delete each hypothesis span independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise InvalidPerturbation(f"drop probability must lie in [0, 1], got {p}")
    if not seg.hypothesis:
        return seg
    # one draw per span even at p in {0, 1}, keeping streams aligned across p
    u = rng.random(len(seg.hypothesis))
    keep = tuple(a for a, x in zip(seg.hypothesis, u) if x >= p)
    return seg.replace(hypothesis=keep)


def remove_if_few(seg: Segment, threshold: int) -> Segment:
    """Empty the hypothesis when it holds ``threshold`` spans or fewer."""
    if threshold < 0:
        raise InvalidPerturbation(f"threshold must be >= 0, got {threshold}")
    if seg.hypothesis and len(seg.hypothesis) <= threshold:
        return seg.replace(hypothesis=())
    return seg


@dataclass(frozen=True)
class PerturbationSpec:
    """``extend`` (amount = k), ``drop`` (amount = p) or ``remove-few`` (amount = threshold)."""

    kind: str
    amount: float = 0
    seed: int = 0
    repetitions: int = 1

    def __post_init__(self):
        if self.kind == "extend":
            if self.amount < 0 or int(self.amount) != self.amount:
                raise InvalidPerturbation(f"extend needs an integer k >= 0, got {self.amount}")
        elif self.kind == "drop":
            if not 0 <= self.amount <= 1:
                raise InvalidPerturbation(f"drop probability must lie in [0, 1], got {self.amount}")
            if self.repetitions < 1:
                raise InvalidPerturbation("drop needs at least one repetition")
        elif self.kind == "remove-few":
            if self.amount < 0 or int(self.amount) != self.amount:
                raise InvalidPerturbation(f"remove-few needs an integer threshold >= 0, got {self.amount}")
        else:
            raise InvalidPerturbation(f"unknown perturbation {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PerturbationSpec":
        """Parse ``extend:<k>``, ``drop:<p>:<seed>:<reps>`` or ``remove-few:<t>``."""
        parts = text.strip().split(":")
        kind = parts[0].lower()
        try:
            if kind == "extend" and len(parts) == 2:
                return cls("extend", int(parts[1]))
            if kind == "remove-few" and len(parts) == 2:
                return cls("remove-few", int(parts[1]))
            if kind == "drop" and 2 <= len(parts) <= 4:
                seed = int(parts[2]) if len(parts) > 2 else 0
                reps = int(parts[3]) if len(parts) > 3 else 1
                return cls("drop", float(parts[1]), seed, reps)
        except ValueError as exc:
            raise InvalidPerturbation(f"bad perturbation {text!r}: {exc}") from None
        raise InvalidPerturbation(f"bad perturbation {text!r}")

    def with_amount(self, amount) -> "PerturbationSpec":
        return PerturbationSpec(self.kind, amount, self.seed, self.repetitions)

    @property
    def is_random(self) -> bool:
        return self.kind == "drop"

    @property
    def runs(self) -> int:
        return self.repetitions if self.is_random else 1

    def apply(self, seg: Segment, repetition: int = 0) -> Segment:
        if self.kind == "extend":
            return extend_spans(seg, int(self.amount))
        if self.kind == "remove-few":
            return remove_if_few(seg, int(self.amount))
        rng = segment_stream(self.seed, seg.id, repetition)
        return drop_spans(seg, float(self.amount), rng)

    def apply_all(self, segments: Iterable[Segment], repetition: int = 0) -> list[Segment]:
        return [self.apply(s, repetition) for s in segments]

    def label(self) -> str:
        if self.kind == "drop":
            return f"drop:{self.amount:g}:{self.seed}:{self.repetitions}"
        return f"{self.kind}:{int(self.amount)}"


def perturb(segments: Iterable[Segment], spec: Optional[PerturbationSpec], repetition: int = 0) -> list[Segment]:
    if spec is None:
        return list(segments)
    return spec.apply_all(segments, repetition)
