import re
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spanmeta.report import (
    HEADER,
    EmptyReport,
    ReportRow,
    emit_report,
    rank_systems,
    rank_table,
    round_half_even,
)


def row(system="A", measure="mpp", tau=None, averaging="micro", group="ALL", p=F(1, 2), r=F(1, 2), f=F(1, 2), **kw):
    return ReportRow(system, measure, tau, averaging, group, p, r, f, 1, 2, 3, **kw)


def test_one_row_csv():
    out = emit_report([row(p=F(7, 9), r=F(1), f=F(7, 8))]).decode()
    assert out.splitlines() == [
        ",".join(HEADER),
        "A,mpp,,micro,ALL,0.7778,1.0000,0.8750,1,2,3",
    ]


def test_tsv_and_table():
    assert emit_report([row()], "tsv").decode().splitlines()[0] == "\t".join(HEADER)
    table = emit_report([row()], "table").decode().splitlines()
    assert table[0].split() == list(HEADER) and len(table) == 3


def test_empty_report():
    with pytest.raises(EmptyReport):
        emit_report([])


def test_mixed_groups_sorted():
    rows = [
        row("B", "mp", 3, group="en-de"), row("A", "mp", 1, group="en-de"),
        row("A", "em", group="ALL"), row("A", "mp", 1, group="ALL"), row("B", "em", group="ALL"),
    ]
    got = [(r[4], r[1], r[0], r[2]) for r in (l.split(",") for l in emit_report(rows).decode().splitlines()[1:])]
    assert got == [
        ("ALL", "em", "A", ""), ("ALL", "em", "B", ""), ("ALL", "mp", "A", "1"),
        ("en-de", "mp", "A", "1"), ("en-de", "mp", "B", "3"),
    ]


def test_sweep_columns_appended():
    out = emit_report([row(perturbation="drop", param=F(1, 4), f_min=F(0), f_max=F(1))]).decode().splitlines()
    assert out[0].endswith(",perturbation,param,f_min,f_max")
    assert out[1].endswith(",drop,0.25,0.0000,1.0000")


def test_svg_structure():
    rows = [
        row(system, measure="mp", tau=1, f=F(k, 20), perturbation="extend", param=F(k))
        for system in ("A", "B") for k in (0, 5, 10)
    ]
    svg = emit_report(rows, "svg")
    root = ET.fromstring(svg)
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 2
    assert all(len(pl.get("points").split()) == 3 for pl in lines)


class TestRounding:
    @pytest.mark.parametrize("x, digits, want", [
        (F(7, 9), 4, "0.7778"),
        (F(1), 4, "1.0000"),
        (F(0), 2, "0.00"),
        (F(1, 8), 2, "0.12"),
        (F(3, 8), 2, "0.38"),
        (F(5, 2), 0, "2"),
        (F(7, 2), 0, "4"),
        (F(2, 3), 0, "1"),
    ])
    def test_examples(self, x, digits, want):
        assert round_half_even(x, digits) == want

    @given(st.fractions(min_value=0, max_value=1), st.integers(0, 8))
    def test_error_bound(self, x, digits):
        s = round_half_even(x, digits)
        assert re.fullmatch(r"\d+" + (r"\.\d{%d}" % digits if digits else ""), s)
        assert abs(F(s) - x) <= F(1, 2 * 10**digits)


class TestRank:
    def test_by_f(self):
        rows = [row("a", f=F(9, 10)), row("b", f=F(1, 2)), row("c", f=F(7, 10))]
        ranks = {r.system: k for k, r in rank_systems(rows)}
        assert (ranks["a"], ranks["b"], ranks["c"]) == (1, 3, 2)

    def test_precision_breaks_tie(self):
        rows = [row("a", p=F(1, 2)), row("b", p=F(3, 4))]
        assert [r.system for _, r in rank_systems(rows)] == ["b", "a"]

    def test_name_breaks_full_tie(self):
        assert [r.system for _, r in rank_systems([row("z"), row("m")])] == ["m", "z"]

    def test_single(self):
        assert [k for k, _ in rank_systems([row()])] == [1]

    def test_mixed_keys_rejected(self):
        with pytest.raises(ValueError):
            rank_systems([row(measure="em"), row(measure="mpp")])

    def test_table_shape(self):
        rows = [
            row(f"sys{i:02d}", m, 1 if m == "mp" else None, avg, f=F(i, 13))
            for i in range(13) for m in ("em", "mp", "mpp") for avg in ("micro", "macro")
        ]
        header, body = rank_table(rows)
        assert header == ["system", "em/micro", "mp:1/micro", "mpp/micro", "em/macro", "mp:1/macro", "mpp/macro"]
        assert len(body) == 13
        assert body[12] == ["sys12"] + ["1"] * 6
