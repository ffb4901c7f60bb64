import random

import pytest
from hypothesis import given, strategies as st

from corpus import fixture, random_instance
from oracles import EnvelopingOracle, from_kernel

from dglift.derivations import dual_basis
from dglift.dgmod import SemifreeModule
from dglift.enveloping import (
    DiagonalTarget,
    NotInIdealError,
    build_enveloping,
    build_omega,
    check_exact_sequence,
    diagonal_ideal_slice,
    project_J_to_omega,
    tensor_with,
    universal_derivation,
)
from dglift.gca import DgAlgebra
from dglift.scalars import Field

QQ = Field()


def test_doubling():
    env = build_enveloping(DgAlgebra(QQ, [("x", 2)]))
    assert env.Be.names == ("x", "x'")
    assert env.pi(env.Be.gen("x'")) == env.B.gen("x")
    env = build_enveloping(fixture("K2").B)
    assert env.Be.names == ("y", "x", "x'")
    assert env.Be.dimage("x'") == env.Be.gen("y")


def test_universal_derivation_examples():
    B = DgAlgebra(QQ, [("y", 1, True), ("x1", 2), ("x2", 4)], {"x2": "x1*y"})
    env = build_enveloping(B)
    assert not universal_derivation(env, B.gen("y"))
    assert str(universal_derivation(env, B.gen("x1"))) == "x1 - x1'"
    x1, x2 = B.gen("x1"), B.gen("x2")
    lhs = env.delta(x1 * x2)
    rhs = env.delta(x1) * env.R(x2) + env.L(x1) * env.delta(x2)
    assert lhs == rhs


def test_j_bases():
    env = build_enveloping(DgAlgebra(QQ, [("x", 2)]))
    assert [str(v) for v in env.J_basis(2)] == ["x - x'"]
    assert env.J_basis(0) == []
    sl = diagonal_ideal_slice(env, -2, 8)
    assert [sl.dim(k) for k in range(0, 9)] == [0, 0, 1, 0, 2, 0, 3, 0, 4]


@given(st.integers(0, 59))
def test_j_basis_routes_agree(seed):
    env = build_enveloping(random_instance(seed).B)
    for k in range(0, 7):
        a, b = env.J_basis(k), env.J_basis_t(k)
        assert len(a) == len(b) == len(env.Be.monomial_basis(k)) - len(env.B.monomial_basis(k))
        assert all(env.in_J(v) for v in b)


@given(st.integers(0, 59), st.integers(0, 10**6))
def test_membership_and_delta_properties(seed, rseed):
    B = random_instance(seed).B
    env = build_enveloping(B)
    rng = random.Random(rseed)
    b = B.random_element(rng, rng.randint(0, 6))
    assert not env.pi(env.delta(b))
    assert env.delta(b).d() == env.delta(b.d())
    for k in range(1, 6):
        for v in env.J_basis(k):
            m = env.membership(v)
            total = env.Be.zero()
            for i, c in m.items():
                total = total + c * env.delta(B.gen(i))
            assert total == v


def test_delta_matches_word_oracle():
    B = random_instance(7).B
    env = build_enveloping(B)
    oracle = EnvelopingOracle(B)
    rng = random.Random(1)
    for _ in range(50):
        b = B.random_element(rng, rng.randint(0, 6))
        assert from_kernel(env.delta(b)) == oracle.delta(from_kernel(b))


def test_membership_rejects_outside():
    env = build_enveloping(DgAlgebra(QQ, [("x", 2)]))
    with pytest.raises(NotInIdealError):
        env.membership(env.Be.gen("x"))
    om = build_omega(env)
    with pytest.raises(NotInIdealError):
        project_J_to_omega(om, env.Be.gen("x"))


def test_omega_examples():
    om = build_omega(build_enveloping(DgAlgebra(QQ, [("x", 2), ("z", 3)])))
    assert om.module.is_free
    om = build_omega(build_enveloping(fixture("K2").B))
    assert om.module.is_free
    om = build_omega(build_enveloping(fixture("x1x2").B))
    assert om.c == {(0, 1): om.B.one()}
    assert str(om.module.diff_image(1)) == "u[x1]"


@given(st.integers(0, 59), st.integers(0, 10**6))
def test_projection_is_a_chain_map_killing_j_squared(seed, rseed):
    B = random_instance(seed).B
    env = build_enveloping(B)
    om = build_omega(env)
    rng = random.Random(rseed)
    for i in B.extension_indices:
        assert project_J_to_omega(om, env.delta(B.gen(i))) == om.u(i)
    for k in range(1, 7):
        for v in env.J_basis(k):
            assert om.project(v.d()) == om.module.d(om.project(v))
    js = [v for k in range(1, 4) for v in env.J_basis(k)]
    if len(js) >= 2:
        a, b = rng.choice(js), rng.choice(js)
        assert not om.project(a * b)
    parts = dual_basis(B)
    b = B.random_element(rng, rng.randint(0, 6))
    want = om.module.zero()
    for k, i in enumerate(B.extension_indices):
        v = parts[k](b)
        if v:
            want = want + om.u(i, v)
    assert om.delta_bar(b) == want


def test_tensor_dimensions():
    I = fixture("K2")
    env = build_enveloping(I.B)
    N = I.module()
    S = tensor_with(N, DiagonalTarget(env))
    for d in range(0, 9):
        assert S.dim(d) == sum(len(env.J_basis(d - e)) for e in N.degrees if d - e >= 0)
    free = SemifreeModule(I.B, [("e", 2)])
    for d in range(0, 6):
        assert free.space.dim(d) == len(I.B.monomial_basis(d - 2))


@pytest.mark.parametrize("name", ["K1", "K2", "base-change", "x1x2", "free"])
def test_exact_sequence_on_fixtures(name):
    I = fixture(name)
    rep = check_exact_sequence(I.module(), build_enveloping(I.B), -2, 9)
    assert rep.valid


@given(st.integers(0, 59))
def test_exact_sequence_on_corpus(seed):
    I = random_instance(seed)
    assert check_exact_sequence(I.module(), build_enveloping(I.B), 0, 8).valid


def test_base_generators_first():
    with pytest.raises(ValueError):
        build_enveloping(DgAlgebra(QQ, [("x", 2), ("y", 3, True)]))
