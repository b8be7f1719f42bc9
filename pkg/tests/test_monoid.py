from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from suspla.fixtures import klein_four, nonlinear_monoid
from suspla.monoid import (
    DegreeWindow,
    InvalidBound,
    Monoid,
    MonoidError,
    cyclic_group,
    finite_monoid,
    free_rank1,
)


def test_free_multiplication_and_divisibility():
    m = free_rank1("Q")
    assert m.mul(2, 3) == 5
    assert m.divides(1, 3) and not m.divides(3, 1)
    assert m.is_linear() and not m.is_group()
    assert m.name(0) == "1" and m.name(1) == "Q" and m.name(3) == "Q^3"
    assert m.parse("Q^3") == 3 and m.parse("1") == 0


def test_cyclic_group():
    c2 = cyclic_group(2)
    s = c2.parse("s")
    assert c2.mul(s, s) == c2.one
    assert c2.is_group() and c2.is_linear()
    for a, b in itertools.product(c2.elements(), repeat=2):
        assert c2.divides(a, b)
    assert cyclic_group(3).is_linear()


def test_identity_is_neutral():
    for m in (cyclic_group(3), klein_four(), nonlinear_monoid()):
        for a in m.elements():
            assert m.mul(a, m.one) == a


def test_trivial_monoid():
    t = finite_monoid(["1"], [[0]], 0)
    assert t.is_group()
    assert list(t.enumerate_window(5)) == [0]


def test_three_element_idempotent_monoid_by_exhaustive_check():
    # {1, a, b} with a^2 = a, b^2 = b, ab = a: a divides b (a = a*b), b does not divide a
    m = finite_monoid(["1", "a", "b"], [[0, 1, 2], [1, 1, 1], [2, 1, 2]], 0)
    a, b = m.parse("a"), m.parse("b")
    assert m.divides(b, a) and not m.divides(a, b)
    assert m.is_linear() == all(
        m.divides(x, y) or m.divides(y, x) for x in m.elements() for y in m.elements()
    )
    assert m.is_linear()


def test_nonlinear_monoid():
    m = nonlinear_monoid()
    a, b = m.parse("a"), m.parse("b")
    assert not m.divides(a, b) and not m.divides(b, a)
    assert not m.is_linear()


def test_table_validation():
    with pytest.raises(MonoidError):
        finite_monoid(["1", "a"], [[0, 1], [0, 1]], 0)  # a*1 != a
    with pytest.raises(MonoidError):
        finite_monoid(["1", "a", "b"], [[0, 1, 2], [1, 1, 2], [2, 1, 2]], 0)  # ab != ba


def test_rank_two_free_rejected():
    with pytest.raises(MonoidError):
        Monoid.from_json({"kind": "free_rank2", "generators": ["a", "b"]})


def test_windows():
    m = free_rank1("Q")
    assert list(m.enumerate_window(3)) == [0, 1, 2, 3]
    assert list(cyclic_group(2).enumerate_window(7)) == [0, 1]
    with pytest.raises(InvalidBound):
        m.enumerate_window(-1)
    with pytest.raises(ValueError):
        DegreeWindow(m, (0, 2))


def test_json_round_trip():
    for m in (free_rank1("sigma"), cyclic_group(3), klein_four(), nonlinear_monoid()):
        assert Monoid.from_json(m.to_json()) == m


finite_monoids = st.sampled_from([cyclic_group(2), cyclic_group(3), klein_four(), nonlinear_monoid()])


@given(finite_monoids)
def test_divides_is_a_preorder(m):
    els = list(m.elements())
    for a in els:
        assert m.divides(a, a)
    for a, b, c in itertools.product(els, repeat=3):
        if m.divides(a, b) and m.divides(b, c):
            assert m.divides(a, c)


@given(finite_monoids)
def test_quotients_solve_the_division(m):
    for a, b in itertools.product(m.elements(), repeat=2):
        qs = m.quotients(a, b)
        assert all(m.mul(g, a) == b for g in qs)
        assert bool(qs) == m.divides(a, b)


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_free_monoid_laws(a, b, c):
    m = free_rank1()
    assert m.mul(a, b) == m.mul(b, a)
    assert m.mul(m.mul(a, b), c) == m.mul(a, m.mul(b, c))
    assert m.divides(a, b) == (a <= b)


@given(finite_monoids)
def test_group_divisibility_total(m):
    if m.is_group():
        assert all(m.divides(a, b) for a in m.elements() for b in m.elements())
