import random

import pytest
from hypothesis import given, strategies as st

from oracles import from_kernel, word_algebra_of

from dglift.gca import DgAlgebra, mul, monomial_basis, normalize_monomial, partial_derivative, validate_dgca
from dglift.scalars import Field

QQ = Field()


def x1x2():
    return DgAlgebra(QQ, [("x1", 1), ("x2", 2)], {"x2": "x1"})


def ext_y():
    return DgAlgebra(QQ, [("y1", 1), ("y2", 1), ("x", 2)])


def test_normalize_examples():
    B = ext_y()
    assert normalize_monomial(B, []) == (1, (0, 0, 0))
    assert normalize_monomial(B, ["y2", "y1"]) == (-1, (1, 1, 0))
    assert normalize_monomial(B, ["y1", "y1"])[0] == 0


def test_odd_generators_anticommute():
    B = ext_y()
    y1, y2 = B.gen("y1"), B.gen("y2")
    assert y1 * y2 == -(y2 * y1)
    x = B.gen("x")
    assert mul(x + y1, x - y1) == x * x


def test_differential_of_square():
    B = x1x2()
    x2 = B.gen("x2")
    assert (x2 * x2).d() == B.parse("2*x1*x2")
    assert B.one().d() == B.zero()


def test_canonical_printing():
    B = DgAlgebra(QQ, [("y1", 1), ("y2", 1), ("x", 2)])
    p = B.parse("3/2*x^2*y1 - y1*y2")
    assert str(p) == "3/2*y1*x^2 - y1*y2"


def test_validate():
    assert validate_dgca(x1x2()).valid
    bad = DgAlgebra(QQ, [("x", 2)], {"x": "x"})
    rep = validate_dgca(bad)
    assert not rep.valid and rep.failures[0][0] == "degree"
    unsorted = DgAlgebra(QQ, [("x", 2), ("y", 1)])
    assert [f[0] for f in validate_dgca(unsorted).failures] == ["order"]


def test_monomial_basis_examples():
    assert monomial_basis(DgAlgebra(QQ, [("x", 2)]), 4) == [(2,)]
    B = DgAlgebra(QQ, [("y1", 1, True), ("y2", 1, True), ("x", 2)])
    assert [B.format_mono(m) for m in monomial_basis(B, 2)] == ["x", "y1*y2"]
    assert monomial_basis(B, 0) == [(0, 0, 0)]
    assert monomial_basis(B, -1) == []


def test_partial_derivative_signs():
    B = ext_y()
    p = B.gen("y1") * B.gen("y2")
    assert partial_derivative(B, "y1", p) == B.gen("y2")
    assert partial_derivative(B, "y2", p) == -B.gen("y1")
    A = DgAlgebra(QQ, [("a", 1, True), ("x", 2)])
    assert not partial_derivative(A, "x", A.gen("a"))
    with pytest.raises(ValueError):
        partial_derivative(A, "a", A.gen("a"))


# property tests on random algebras -------------------------------------------

ALGEBRAS = [
    x1x2(),
    ext_y(),
    DgAlgebra(QQ, [("y", 1, True), ("x", 2), ("z", 3)], {"x": "y"}),
    DgAlgebra(QQ, [("a", 1), ("b", 2), ("c", 4)], {"b": "a", "c": "a*b"}),
]
algebras = st.sampled_from(ALGEBRAS)


def test_property_algebras_are_valid():
    assert all(validate_dgca(B).valid for B in ALGEBRAS)


@given(algebras, st.integers(0, 10**6))
def test_laws(B, seed):
    rng = random.Random(seed)
    a, b, c = (B.random_element(rng, rng.randint(0, 6)) for _ in range(3))
    da, db = a.degree or 0, b.degree or 0
    assert a * b == b * a * (-1 if da * db % 2 else 1)
    assert (a * b) * c == a * (b * c)
    assert (a * b).d() == a.d() * b + a * b.d() * (-1 if da % 2 else 1)
    assert not a.d().d()
    if da % 2:
        assert not a * a


@given(algebras, st.integers(0, 10**6))
def test_agrees_with_word_oracle(B, seed):
    rng = random.Random(seed)
    W = word_algebra_of(B)
    a, b = (B.random_element(rng, rng.randint(0, 6)) for _ in range(2))
    assert from_kernel(a * b) == W.mul(from_kernel(a), from_kernel(b))
    assert from_kernel(a.d()) == W.d(from_kernel(a))
    for i in B.extension_indices:
        assert from_kernel(partial_derivative(B, i, a)) == W.partial(i, from_kernel(a))


@given(algebras, st.integers(0, 10**6))
def test_partial_derivative_is_a_derivation(B, seed):
    rng = random.Random(seed)
    a, b = (B.random_element(rng, rng.randint(0, 5)) for _ in range(2))
    for i in B.extension_indices:
        n = -B.degrees[i]
        da = a.degree or 0
        lhs = partial_derivative(B, i, a * b)
        rhs = partial_derivative(B, i, a) * b + a * partial_derivative(B, i, b) * (-1 if n * da % 2 else 1)
        assert lhs == rhs


@given(algebras, st.integers(0, 12))
def test_normalize_is_idempotent(B, n):
    for m in monomial_basis(B, n):
        word = [B.names[i] for i, e in enumerate(m) for _ in range(e)]
        assert normalize_monomial(B, word) == (1, m)
