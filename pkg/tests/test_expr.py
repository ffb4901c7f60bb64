from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dglift.expr import ExprSyntaxError, format_expr, names_in, parse_expr


def test_precedence_and_rationals():
    t = parse_expr("3/2*x + y*z - 1")
    assert format_expr(t) == "3/2*x + y*z - 1"
    assert names_in(t) == ["x", "y", "z"]


def test_powers_and_parentheses():
    t = parse_expr("x^2*(x + y)*z")
    assert t[1][0][1][1][0] == ("var", "x", 2)
    assert parse_expr(format_expr(t)) == t
    with pytest.raises(ExprSyntaxError):
        parse_expr("(x + y)^2")


@pytest.mark.parametrize("text, column", [("x y", 3), ("2x", 2), ("x +", 4), ("(x", 3), ("x $ y", 3)])
def test_syntax_errors_carry_a_column(text, column):
    with pytest.raises(ExprSyntaxError) as e:
        parse_expr(text)
    assert e.value.column == column


names = st.sampled_from(["x", "y1", "z_2", "e0"])
atoms = st.one_of(
    names,
    st.integers(1, 9).map(str),
    st.tuples(st.integers(1, 9), st.integers(2, 9)).map(lambda t: f"{t[0]}/{t[1]}"),
    st.tuples(names, st.integers(2, 4)).map(lambda t: f"{t[0]}^{t[1]}"),
)


def exprs():
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            st.tuples(inner, inner).map(lambda t: f"{t[0]}*{t[1]}"),
            st.tuples(inner, st.sampled_from([" + ", " - "]), inner).map("".join),
            inner.map(lambda s: f"({s})"),
        ),
        max_leaves=8,
    )


@given(exprs())
def test_format_then_parse_is_identity(text):
    t = parse_expr(text)
    assert parse_expr(format_expr(t)) == t
