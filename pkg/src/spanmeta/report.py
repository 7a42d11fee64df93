"""Report rows, rankings and their CSV / TSV / text-table / SVG renderings."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .core import SpanMetaError

HEADER = (
    "system", "measure", "tau", "averaging", "group",
    "precision", "recall", "f", "n_segments", "n_hyp_spans", "n_gold_spans",
)
SWEEP_HEADER = ("perturbation", "param", "f_min", "f_max")
FORMATS = ("csv", "tsv", "table", "svg")


class EmptyReport(SpanMetaError):
    def __init__(self):
        super().__init__("no rows to report")


def round_half_even(x: Fraction, digits: int = 4) -> str:
    """Decimal string of ``x`` rounded half-to-even at ``digits`` places, computed exactly."""
    x = Fraction(x)
    scale = 10**digits
    scaled = x * scale
    q, rem = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * rem
    if twice > scaled.denominator or (twice == scaled.denominator and q % 2 == 1):
        q += 1
    sign = "-" if q < 0 else ""
    q = abs(q)
    if digits == 0:
        return f"{sign}{q}"
    whole, frac = divmod(q, scale)
    return f"{sign}{whole}.{frac:0{digits}d}"


@dataclass(frozen=True)
class ReportRow:
    system: str
    measure: str
    tau: Optional[int]
    averaging: str
    group: str
    precision: Fraction
    recall: Fraction
    f: Fraction
    n_segments: int
    n_hyp_spans: int
    n_gold_spans: int
    perturbation: Optional[str] = None
    param: Optional[Fraction] = None
    f_min: Optional[Fraction] = None
    f_max: Optional[Fraction] = None

    @property
    def is_sweep(self) -> bool:
        return self.perturbation is not None

    def sort_key(self):
        return (
            self.group, self.measure, self.system, self.tau or 0,
            self.averaging, self.perturbation or "", self.param or 0,
        )

    def cells(self, digits: int, sweep: bool) -> list[str]:
        out = [
            self.system, self.measure, "" if self.tau is None else str(self.tau),
            self.averaging, self.group,
            round_half_even(self.precision, digits),
            round_half_even(self.recall, digits),
            round_half_even(self.f, digits),
            str(self.n_segments), str(self.n_hyp_spans), str(self.n_gold_spans),
        ]
        if sweep:
            out += [
                self.perturbation or "",
                "" if self.param is None else format_param(self.param),
                "" if self.f_min is None else round_half_even(self.f_min, digits),
                "" if self.f_max is None else round_half_even(self.f_max, digits),
            ]
        return out


def format_param(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{float(x):g}"


def _delimited(header: Sequence[str], body: Sequence[Sequence[str]], delimiter: str) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    w.writerows(body)
    return buf.getvalue().encode("utf-8")


def _pretty(header: Sequence[str], body: Sequence[Sequence[str]]) -> bytes:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_table(header: Sequence[str], body: Sequence[Sequence[str]], fmt: str) -> bytes:
    if fmt == "csv":
        return _delimited(header, body, ",")
    if fmt == "tsv":
        return _delimited(header, body, "\t")
    if fmt == "table":
        return _pretty(header, body)
    raise ValueError(f"format {fmt!r} cannot render a table")


def emit_report(rows: Sequence[ReportRow], fmt: str = "csv", digits: int = 4) -> bytes:
    if not rows:
        raise EmptyReport()
    rows = sorted(rows, key=ReportRow.sort_key)
    if fmt == "svg":
        return render_svg(rows)
    sweep = any(r.is_sweep for r in rows)
    header = HEADER + SWEEP_HEADER if sweep else HEADER
    return render_table(header, [r.cells(digits, sweep) for r in rows], fmt)


def render_svg(rows: Sequence[ReportRow], width: int = 640, height: int = 400) -> bytes:
    """F-score against the sweep parameter, one polyline per curve."""
    if not rows:
        raise EmptyReport()
    curves: dict[str, list[tuple[float, float]]] = {}
    for r in sorted(rows, key=ReportRow.sort_key):
        name = f"{r.system} {r.measure} {r.averaging}"
        if r.group != "ALL":
            name += f" [{r.group}]"
        x = float(r.param) if r.param is not None else float(len(curves.get(name, [])))
        curves.setdefault(name, []).append((x, float(r.f)))

    margin = 50
    xs = [x for pts in curves.values() for x, _ in pts]
    x_lo, x_hi = min(xs), max(xs)
    x_span = (x_hi - x_lo) or 1.0
    plot_w, plot_h = width - 2 * margin, height - 2 * margin

    def px(x, y):
        return (
            margin + (x - x_lo) / x_span * plot_w,
            height - margin - y * plot_h,
        )

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">parameter</text>',
        f'<text x="15" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {height / 2:.1f})">F</text>',
        f'<text x="{margin - 5}" y="{height - margin + 4}" text-anchor="end" font-size="10">0</text>',
        f'<text x="{margin - 5}" y="{margin + 4}" text-anchor="end" font-size="10">1</text>',
        f'<text x="{margin}" y="{height - margin + 15}" text-anchor="middle" font-size="10">{x_lo:g}</text>',
        f'<text x="{width - margin}" y="{height - margin + 15}" text-anchor="middle" font-size="10">{x_hi:g}</text>',
    ]
    for i, (name, pts) in enumerate(curves.items()):
        colour = palette[i % len(palette)]
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in (px(x, y) for x, y in pts))
        out.append(
            f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{coords}">'
            f"<title>{escape(name)}</title></polyline>"
        )
        out.append(
            f'<text x="{width - margin + 2}" y="{margin + 14 * i}" font-size="10" fill="{colour}">'
            f"{escape(name)}</text>"
        )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def rank_systems(rows: Sequence[ReportRow]) -> list[tuple[int, ReportRow]]:
    """Rank rows sharing one (measure, averaging, group): F desc, then P desc, then name."""
    keys = {(r.measure, r.averaging, r.group, r.perturbation, r.param) for r in rows}
    if len(keys) > 1:
        raise ValueError(f"rows mix several measure/averaging/group keys: {sorted(keys, key=str)}")
    ordered = sorted(rows, key=lambda r: (-r.f, -r.precision, r.system))
    return [(i, r) for i, r in enumerate(ordered, 1)]


def rank_table(rows: Sequence[ReportRow]) -> tuple[list[str], list[list[str]]]:
    """One rank column per (measure, averaging), one line per system, systems alphabetical."""
    columns: dict[tuple, list[ReportRow]] = {}
    for r in rows:
        columns.setdefault((r.measure, r.tau or 0, r.averaging), []).append(r)
    order = sorted(columns, key=lambda k: (k[2] != "micro", k[0], k[1]))
    ranks: dict[str, dict[tuple, int]] = {}
    for key in order:
        for rank, r in rank_systems(columns[key]):
            ranks.setdefault(r.system, {})[key] = rank
    header = ["system"] + [f"{m}:{tau}/{avg}" if tau else f"{m}/{avg}" for m, tau, avg in order]
    body = [
        [system] + [str(ranks[system].get(k, "")) for k in order]
        for system in sorted(ranks)
    ]
    return header, body
