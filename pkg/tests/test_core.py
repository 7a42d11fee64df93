import pytest
from hypothesis import given
from hypothesis import strategies as st

from spanmeta.core import (
    Dataset,
    DuplicateSegmentId,
    EmptySpan,
    InvalidSegment,
    OutOfBounds,
    Segment,
    Span,
    overlap,
    span_length,
    union_length,
    validate_dataset,
    validate_segment,
)


@pytest.mark.parametrize("span, expected", [(Span(4, 9), 5), (Span(0, 1), 1), (Span(0, 25), 25)])
def test_span_length(span, expected):
    assert span_length(span) == expected == len(span)


@pytest.mark.parametrize(
    "a, b, inter, union",
    [
        (Span(0, 9), Span(4, 9), 5, 9),
        (Span(0, 3), Span(10, 15), 0, 8),
        (Span(2, 7), Span(2, 7), 5, 5),
    ],
)
def test_overlap_and_union(a, b, inter, union):
    assert overlap(a, b) == inter
    assert union_length(a, b) == union


def test_adjacent_spans_do_not_overlap():
    assert overlap(Span(0, 3), Span(3, 5)) == 0


def test_empty_and_inverted_spans_rejected():
    with pytest.raises(EmptySpan):
        Span(1, 1)
    with pytest.raises(EmptySpan):
        Span(3, 2)
    with pytest.raises(OutOfBounds):
        Span(-1, 2)


def test_one_based_conversion():
    assert Span.from_one_based(5, 9) == Span(4, 9)
    assert Span(4, 9).to_one_based() == (5, 9)
    assert len(Span.from_one_based(3, 3)) == 1


def test_validate_segment_ok():
    seg = Segment("a", "abc", hypothesis=[Span(0, 2)])
    assert validate_segment(seg) is seg


def test_validate_segment_reports_every_bad_span():
    seg = Segment("a", "abc", hypothesis=[Span(2, 5), Span(0, 1)], gold=[Span(0, 4)])
    with pytest.raises(InvalidSegment) as info:
        validate_segment(seg)
    problems = info.value.problems
    assert [type(p) for p in problems] == [OutOfBounds, OutOfBounds]
    assert problems[0].where == "a.hypothesis[0]"
    assert problems[1].where == "a.gold[0]"
    assert problems[0].text_len == 3


def test_gold_empty_span_cannot_be_built():
    with pytest.raises(EmptySpan):
        Segment("a", "abc", gold=[Span(1, 1)])


def test_duplicate_ids_rejected_within_system():
    a = Segment("x", "abc")
    with pytest.raises(DuplicateSegmentId):
        validate_dataset([a, Segment("x", "def")])
    # same id under different systems is fine
    ds = validate_dataset([a.replace(system="s1"), a.replace(system="s2")])
    assert isinstance(ds, Dataset) and len(ds) == 2


def test_duplicate_offsets_allowed():
    seg = Segment("a", "abcdef", hypothesis=[(0, 3), (0, 3)], gold=[(0, 3)])
    assert len(validate_segment(seg).hypothesis) == 2


def test_segment_labels_compare():
    from spanmeta.core import AnnotatedSpan

    a = AnnotatedSpan(Span(0, 1), "major", "accuracy")
    assert a != AnnotatedSpan(Span(0, 1), "minor", "accuracy")


spans = st.tuples(st.integers(0, 50), st.integers(1, 20)).map(lambda t: Span(t[0], t[0] + t[1]))


@given(spans, spans)
def test_overlap_properties(a, b):
    assert overlap(a, b) == overlap(b, a)
    assert overlap(a, a) == len(a)
    assert overlap(a, b) <= min(len(a), len(b))
    assert len(a) + len(b) == overlap(a, b) + union_length(a, b)


@given(st.text(min_size=1, max_size=40), st.data())
def test_offsets_independent_of_encoding(text, data):
    start = data.draw(st.integers(0, len(text) - 1))
    end = data.draw(st.integers(start + 1, len(text)))
    seg = Segment("u", text, hypothesis=[Span(start, end)])
    for enc in ("utf-8", "utf-16", "utf-32"):
        round_tripped = text.encode(enc, "surrogatepass").decode(enc, "surrogatepass")
        again = Segment("u", round_tripped, hypothesis=[Span(start, end)])
        assert len(again.text) == len(seg.text)
        assert again.text[start:end] == seg.text[start:end]
    validate_segment(seg)


def test_cjk_and_emoji_count_scalar_values():
    text = "這是錯誤🙂ok"
    seg = Segment("z", text, hypothesis=[Span(4, 5)], gold=[Span(0, 7)])
    validate_segment(seg)
    assert text[4:5] == "🙂"
    with pytest.raises(InvalidSegment):
        validate_segment(Segment("z", text, gold=[Span(0, len(text.encode("utf-8")))]))
