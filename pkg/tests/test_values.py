import pytest
from hypothesis import given
from hypothesis import strategies as st

from gqe.values import EdgeRef, VertexRef, equals, format_value, from_json, less_than, sort_key, to_json

atoms = st.one_of(
    st.none(), st.booleans(), st.integers(-5, 5), st.floats(-5, 5, allow_nan=False), st.text(max_size=3),
    st.builds(VertexRef, st.sampled_from(["1", "2", "a"])), st.builds(EdgeRef, st.sampled_from(["1", "10", "b"])),
)
values = st.recursive(atoms, lambda inner: st.lists(inner, max_size=3).map(tuple), max_leaves=6)


def test_kind_order():
    ordered = [False, True, -1, 0.5, 2, "a", "b", (1,), (1, 2), VertexRef("2"), VertexRef("10"), VertexRef("a"),
               EdgeRef("1"), None]
    assert sorted(reversed(ordered), key=sort_key) == ordered


def test_int_float_share_an_axis_but_bool_does_not():
    assert sort_key(1) == sort_key(1.0)
    assert sort_key(True) != sort_key(1)
    assert equals(1, 1.0) is True
    assert equals(True, 1) is False


@pytest.mark.parametrize("a, b, expected", [
    (None, 1, None), (1, None, None), ("a", 1, False), ((1, None), (1, 2), None), ((1, None), (2, 2), False),
    ((1, 2), (1, 2), True), (VertexRef("a"), VertexRef("a"), True), (VertexRef("a"), EdgeRef("a"), False),
])
def test_three_valued_equality(a, b, expected):
    assert equals(a, b) is expected


def test_less_than():
    assert less_than(1, 2.5) is True
    assert less_than("b", "a") is False
    assert less_than("a", 1) is None
    assert less_than(None, 1) is None
    assert less_than(VertexRef("1"), VertexRef("2")) is None


@given(values, values)
def test_sort_key_is_total_and_antisymmetric(a, b):
    ka, kb = sort_key(a), sort_key(b)
    assert (ka < kb) + (ka > kb) + (ka == kb) == 1


@given(values)
def test_equals_is_reflexive_without_nulls(v):
    result = equals(v, v)
    assert result is True or result is None


def test_json_round_trip_and_formatting():
    assert from_json([1, [None, "x"]]) == (1, (None, "x"))
    with pytest.raises(ValueError):
        from_json({"a": 1})
    assert to_json((VertexRef("a"), EdgeRef("1"), None)) == ["(:a)", "[:1]", None]
    assert format_value(None) == ""
    assert format_value(None, "∅") == "∅"
    assert format_value((1, None, "a")) == "[1, null, a]"
    assert format_value(True) == "true"
