from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from sympy import GF as SGF
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, strategies as st

from suspla.linalg import (
    GF,
    QQ,
    KindMismatch,
    NotSubspace,
    Residue,
    format_scalar,
    full_space,
    kernel,
    parse_scalar,
    quotient_basis,
    rank,
    rref,
)

F = Fraction


def dense(rows, n):
    return sympy.Matrix([[sympy.Rational(r.get(j, 0)) for j in range(n)] for r in rows]) if rows else sympy.zeros(0, n)


def sparse_rows(draw_rows, n):
    return [{j: F(c) for j, c in enumerate(row) if c} for row in draw_rows]


matrices = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), max_size=6).map(lambda rows: (rows, n))
)


def test_empty_span():
    s = rref([], 3, QQ)
    assert s.rank == 0 and s.rows == ()


def test_forced_echelon_form():
    s = rref([{0: F(1)}, {0: F(1), 1: F(1)}], 3, QQ)
    assert s.rows == ({0: 1}, {1: 1})
    assert s.pivots == (0, 1)


def test_sym_square_relation_rank_matches_dense_elimination():
    # degree Q^2 block of Sym^2 over kN for a line x in degree Q with Q.x = 0:
    # columns (Q^2, empty), (Q, x), (1, x^2); relation Q*(x) - (Q.x) = Q*(x)
    rows = [{1: F(1)}]
    assert rank(rows, 3, QQ) == dense(rows, 3).rank() == 1


@given(matrices)
def test_rank_matches_sympy(data):
    rows, n = data
    sp = sparse_rows(rows, n)
    assert rank(sp, n, QQ) == dense(sp, n).rank()


@given(matrices)
def test_rref_matches_sympy_rref(data):
    rows, n = data
    sp = sparse_rows(rows, n)
    ours = rref(sp, n, QQ)
    ref, piv = dense(sp, n).rref()
    assert ours.pivots == tuple(piv)
    for i, row in enumerate(ours.rows):
        assert [row.get(j, 0) for j in range(n)] == [F(int(x.p), int(x.q)) for x in ref.row(i)]


@given(matrices, st.randoms(use_true_random=False))
def test_rref_is_idempotent_and_order_independent(data, rnd):
    rows, n = data
    sp = sparse_rows(rows, n)
    s = rref(sp, n, QQ)
    assert rref(list(s.rows), n, QQ) == s
    shuffled = list(sp)
    rnd.shuffle(shuffled)
    assert rref(shuffled, n, QQ) == s


@given(matrices)
def test_kernel_vectors_are_killed(data):
    rows, n = data
    sp = sparse_rows(rows, n)
    ker = kernel(sp, n, QQ)
    assert ker.rank + rank(sp, n, QQ) == n
    assert ker.rank == len(dense(sp, n).nullspace())
    for v in ker.rows:
        for r in sp:
            assert sum(c * v.get(j, 0) for j, c in r.items()) == 0


def test_kernel_examples():
    assert kernel([], 2, QQ).rank == 2
    assert kernel([{0: F(1)}, {1: F(1)}], 2, QQ).rank == 0


def test_kernel_of_primitive_system_for_group_algebra_c2():
    # unknown a = a0*e + a1*s, Q = e: Delta(a) - a(x)e - e(x)a over basis e(x)e, e(x)s, s(x)e, s(x)s
    rows = [{0: F(-1)}, {}, {}, {1: F(1)}]
    assert kernel(rows, 2, QQ).rank == 0


@given(matrices, st.lists(st.integers(-3, 3), min_size=7, max_size=7))
def test_quotient_normal_form_is_a_projection(data, vec):
    rows, n = data
    rel = rref(sparse_rows(rows, n), n, QQ)
    q = quotient_basis(full_space(n), rel)
    v = {j: F(c) for j, c in enumerate(vec[:n]) if c}
    nf = q.normal_form(v)
    assert q.normal_form(nf) == nf
    diff = dict(v)
    for k, c in nf.items():
        diff[k] = diff.get(k, 0) - c
    assert rel.contains({k: c for k, c in diff.items() if c})
    assert q.dim == n - rel.rank


def test_quotient_examples():
    assert quotient_basis(full_space(2), rref([], 2, QQ)).dim == 2
    assert quotient_basis(full_space(2), full_space(2)).dim == 0
    labels = ["a", "b", "c"]
    q = quotient_basis(full_space(3), rref([{0: F(1), 2: F(-1)}], 3, QQ), labels)
    assert q.representative_labels == ("b", "c")


def test_quotient_rejects_relations_outside_ambient():
    ambient = rref([{0: F(1)}], 2, QQ)
    with pytest.raises(NotSubspace):
        quotient_basis(ambient, rref([{1: F(1)}], 2, QQ))


def test_coordinates_outside_span():
    s = rref([{0: F(1)}], 2, QQ)
    with pytest.raises(NotSubspace):
        s.coordinates({1: F(1)})


def test_mixed_kinds_rejected():
    with pytest.raises(KindMismatch):
        rref([{0: F(1)}, {1: Residue(1, 5)}], 2)
    with pytest.raises(KindMismatch):
        Residue(1, 3) + Residue(1, 5)
    with pytest.raises(KindMismatch):
        Residue(1, 3) + F(1, 2)


def test_prime_field_arithmetic():
    f = GF(7)
    a = f(3)
    assert a * a.inverse() == f.one
    assert (a / 3) == f.one
    assert f(10) == f(3)
    assert -a == f(4)
    with pytest.raises(ValueError):
        GF(6)


@given(st.integers(2, 4), st.integers(1, 6), st.integers(0, 10**6))
def test_rank_over_prime_field_matches_sympy(pi, n, seed):
    p = [2, 3, 5, 7][pi - 1]
    rng = random.Random(seed)
    f = GF(p)
    rows = [[rng.randrange(p) for _ in range(n)] for _ in range(rng.randint(0, 5))]
    sp = [{j: f(c) for j, c in enumerate(r) if c} for r in rows]
    expected = 0
    if rows:
        expected = DomainMatrix([[SGF(p)(c) for c in r] for r in rows], (len(rows), n), SGF(p)).rank()
    assert rank(sp, n, f) == expected


def test_scalar_serialization():
    assert format_scalar(F(3, 6)) == "1/2"
    assert format_scalar(F(4, 2)) == "2"
    assert format_scalar(Residue(9, 7)) == "2"
    assert parse_scalar("-3/4") == F(-3, 4)
    assert parse_scalar("9", GF(7)) == Residue(2, 7)
    assert QQ.from_json(QQ.to_json()) == QQ
    assert GF(5).from_json(GF(5).to_json()) == GF(5)


def test_dense_and_sparse_paths_agree():
    rng = random.Random(3)
    n = 80
    rows = [{rng.randrange(n): F(rng.randint(-2, 2)) for _ in range(5)} for _ in range(30)]
    rows = [{k: c for k, c in r.items() if c} for r in rows]
    assert rank(rows, n, QQ) == dense(rows, n).rank()
    sub = rref(rows, n, QQ)
    ref, piv = dense(rows, n).rref()
    assert sub.pivots == tuple(piv)
