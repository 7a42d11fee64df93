"""Line-delimited JSON datasets.

One record per line::

    {"id": "s1", "text": "...", "system": "sysA", "lang_pair": "en-de",
     "hypothesis": [{"start": 0, "end": 9, "severity": "major"}],
     "gold": [{"start": 4, "end": 9, "category": "accuracy"}]}

Offsets are 0-based and half-open over Unicode code points. A span record
may instead carry the erroneous substring as ``"text"`` (plus an optional
0-based ``"occurrence"``); its offsets are then recovered by string search.
Fields this module does not know about are kept and written back out.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import Any, Iterable, Optional, Union

from .core import (
    AnnotatedSpan,
    Dataset,
    Segment,
    Span,
    SpanMetaError,
    validate_dataset,
    validate_segment,
)

RECORD_FIELDS = ("id", "text", "system", "lang_pair", "hypothesis", "gold")
SPAN_FIELDS = ("start", "end", "severity", "category")


class ParseError(SpanMetaError):
    def __init__(self, line: int, cause: Union[str, Exception], source: str = ""):
        self.line = line
        self.cause = cause
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{where}: {cause}")


class NotFound(SpanMetaError):
    pass


class OccurrenceOutOfRange(SpanMetaError):
    pass


class AmbiguousSpanWarning(UserWarning):
    """The quoted text occurs more than once and no occurrence was given."""


def resolve_span_text(text: str, quoted: str, occurrence_hint: Optional[int] = None) -> Span:
    """Locate ``quoted`` inside ``text`` (case-sensitive).

    Returns the first occurrence, or occurrence number ``occurrence_hint``
    (0-based) when given. Occurrences may overlap. Emits
    :class:`AmbiguousSpanWarning` when the choice was not unique.
    """
    if not quoted:
        raise ValueError("quoted text must be non-empty")
    starts = []
    i = text.find(quoted)
    while i != -1:
        starts.append(i)
        i = text.find(quoted, i + 1)
    if not starts:
        raise NotFound(f"{quoted!r} not found in text")
    if occurrence_hint is None:
        if len(starts) > 1:
            warnings.warn(
                f"{quoted!r} occurs {len(starts)} times; using the first",
                AmbiguousSpanWarning,
                stacklevel=2,
            )
        start = starts[0]
    else:
        if not 0 <= occurrence_hint < len(starts):
            raise OccurrenceOutOfRange(
                f"occurrence {occurrence_hint} requested but {quoted!r} occurs {len(starts)} times"
            )
        start = starts[occurrence_hint]
    return Span(start, start + len(quoted))


def _parse_span(rec: Any, text: str, one_based: bool) -> AnnotatedSpan:
    if not isinstance(rec, dict):
        raise ValueError(f"span record must be an object, got {type(rec).__name__}")
    extra = {k: v for k, v in rec.items() if k not in SPAN_FIELDS}
    if "start" in rec or "end" in rec:
        start, end = rec.get("start"), rec.get("end")
        if not (isinstance(start, int) and isinstance(end, int)) or isinstance(start, bool):
            raise ValueError(f"span offsets must be integers, got start={start!r} end={end!r}")
        span = Span.from_one_based(start, end) if one_based else Span(start, end)
    elif isinstance(rec.get("text"), str):
        span = resolve_span_text(text, rec["text"], rec.get("occurrence"))
    else:
        raise ValueError("span record needs start/end offsets or a quoted 'text'")
    for label in ("severity", "category"):
        if rec.get(label) is not None and not isinstance(rec[label], str):
            raise ValueError(f"{label} must be a string")
    return AnnotatedSpan(span, rec.get("severity"), rec.get("category"), extra)


def parse_record(rec: Any, one_based: bool = False, default_system: Optional[str] = None) -> Segment:
    if not isinstance(rec, dict):
        raise ValueError("record must be a JSON object")
    for key in ("id", "text"):
        if not isinstance(rec.get(key), str):
            raise ValueError(f"record field {key!r} must be a string")
    text = rec["text"]
    sides = {}
    for side in ("hypothesis", "gold"):
        spans = rec.get(side, [])
        if not isinstance(spans, list):
            raise ValueError(f"{side!r} must be a list")
        sides[side] = tuple(_parse_span(s, text, one_based) for s in spans)
    return Segment(
        id=rec["id"],
        text=text,
        hypothesis=sides["hypothesis"],
        gold=sides["gold"],
        system=rec.get("system", default_system),
        lang_pair=rec.get("lang_pair"),
        extra={k: v for k, v in rec.items() if k not in RECORD_FIELDS},
    )


def read_segments(lines: Iterable[str], one_based: bool = False, default_system: Optional[str] = None, source: str = ""):
    seen = set()
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            seg = validate_segment(parse_record(rec, one_based, default_system))
        except (ValueError, SpanMetaError) as exc:
            raise ParseError(lineno, exc, source) from exc
        key = (seg.system, seg.id)
        if key in seen:
            raise ParseError(lineno, f"duplicate segment id {seg.id!r}", source)
        seen.add(key)
        out.append(seg)
    return out


def load_dataset(path, one_based_inclusive: bool = False, default_system: Optional[str] = None) -> Dataset:
    """Read and validate a dataset file; errors carry the offending line number."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        segments = read_segments(fh, one_based_inclusive, default_system, str(path))
    return validate_dataset(segments)


def _span_record(a: AnnotatedSpan, one_based: bool) -> dict:
    start, end = a.span.to_one_based() if one_based else (a.start, a.end)
    rec: dict[str, Any] = {"start": start, "end": end}
    if a.severity is not None:
        rec["severity"] = a.severity
    if a.category is not None:
        rec["category"] = a.category
    rec.update(a.extra)
    return rec


def segment_record(seg: Segment, one_based: bool = False) -> dict:
    rec: dict[str, Any] = {"id": seg.id, "text": seg.text}
    if seg.system is not None:
        rec["system"] = seg.system
    if seg.lang_pair is not None:
        rec["lang_pair"] = seg.lang_pair
    rec["hypothesis"] = [_span_record(a, one_based) for a in seg.hypothesis]
    rec["gold"] = [_span_record(a, one_based) for a in seg.gold]
    rec.update(seg.extra)
    return rec


def serialize(dataset: Iterable[Segment], one_based: bool = False) -> str:
    return "".join(
        json.dumps(segment_record(seg, one_based), ensure_ascii=False) + "\n" for seg in dataset
    )


def dump_dataset(dataset: Iterable[Segment], path, one_based: bool = False) -> None:
    Path(path).write_text(serialize(dataset, one_based), encoding="utf-8")
