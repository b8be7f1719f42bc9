from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from suspla.bialgebra import (
    OVERFLOW,
    Indeterminate,
    Overflow,
    PresentedBialgebra,
    RigidStructure,
    check_bialgebra,
    check_pgc,
    delta_difference,
    dual_cyclic_group_algebra,
    gp_basis,
    gp_lie,
    group_algebra,
    grouplikes_of_dual_cyclic_group_algebra,
    is_cocommutative,
    is_gpg,
    is_left_sided,
    is_torsion_free_bialgebra,
    s_n,
    tensor_add,
)
from suspla.enveloping import build_W, build_Z
from suspla.fixtures import (
    free_shift_example,
    nontf_example,
    random_torsion,
    random_torsion_free,
)
from suspla.linalg import GF, QQ
from suspla.monoid import cyclic_group, finite_monoid, free_rank1
from suspla.suspensive import SuspensiveLieAlgebra

ONE = Fraction(1)


def sweedler():
    """Basis 1, g, p, gp with g^2 = 1, p^2 = 0, gp = -pg and p skew-primitive."""
    names = ["1", "g", "p", "gp"]
    mult = {}
    # g^a p^b * g^c p^d = (-1)^(b c) g^(a+c) p^(b+d)
    for i, j in itertools.product(range(4), repeat=2):
        a, b = i % 2, i // 2
        c, d = j % 2, j // 2
        if b + d > 1:
            continue
        sign = -1 if b * c else 1
        mult[(i, j)] = {((a + c) % 2) + 2 * (b + d): Fraction(sign)}
    comult = {
        0: {(0, 0): ONE},
        1: {(1, 1): ONE},
        2: {(2, 0): ONE, (1, 2): ONE},
        3: {(3, 1): ONE, (0, 3): ONE},
    }
    A = PresentedBialgebra(QQ, names, mult, comult, {0: ONE}, {0: ONE, 1: ONE})
    c2 = cyclic_group(2)
    rigid = RigidStructure(c2, c2.enumerate_window(), {0: {0: ONE}, 1: {1: ONE}})
    return A, rigid


def noncentral_grouplike():
    """Basis 1, g, x, gx; x primitive, g grouplike with g x g = -x, x^2 beyond the truncation."""
    names = ["1", "g", "x", "gx"]
    mult = {}
    for i, j in itertools.product(range(4), repeat=2):
        a, b = i % 2, i // 2
        c, d = j % 2, j // 2
        if b + d > 1:
            mult[(i, j)] = OVERFLOW
            continue
        sign = -1 if b * c else 1
        mult[(i, j)] = {((a + c) % 2) + 2 * (b + d): Fraction(sign)}
    comult = {
        0: {(0, 0): ONE},
        1: {(1, 1): ONE},
        2: {(2, 0): ONE, (0, 2): ONE},
        3: {(3, 1): ONE, (1, 3): ONE},
    }
    A = PresentedBialgebra(QQ, names, mult, comult, {0: ONE}, {0: ONE, 1: ONE})
    c2 = cyclic_group(2)
    rigid = RigidStructure(c2, c2.enumerate_window(), {0: {0: ONE}, 1: {1: ONE}})
    return A, rigid


def trivial_monoid():
    return finite_monoid(["1"], [[0]], 0)


def abelian_over_trivial(dim=3, cap=3):
    m = trivial_monoid()
    L = SuspensiveLieAlgebra(m, [f"x{k}" for k in range(dim)], [0] * dim, {}, {}, QQ)
    return build_W(L, m.enumerate_window(), lie_cap=cap)


# -- group algebras ------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_group_algebra_is_rigid_bialgebra(n):
    A, rigid = group_algebra(cyclic_group(n))
    assert check_bialgebra(A).passed
    assert rigid.check(A).passed
    assert is_cocommutative(A)
    for g in rigid.window:
        assert gp_basis(A, rigid, g).rank == 0
    assert is_gpg(A, rigid).value
    assert is_left_sided(A, rigid).value
    assert is_torsion_free_bialgebra(A, rigid).value
    assert check_pgc(A, rigid).value
    assert gp_lie(A, rigid).dim == 0


def test_truncated_free_monoid_algebra():
    A, rigid = group_algebra(free_rank1("Q"), QQ, 4)
    assert check_bialgebra(A).skipped > 0
    assert check_bialgebra(A).passed
    assert is_gpg(A, rigid).value
    with pytest.raises(Overflow):
        A.multiply({A.index("Q^3"): ONE}, {A.index("Q^2"): ONE})


def test_broken_counit_fails():
    A, _ = group_algebra(cyclic_group(2))
    broken = PresentedBialgebra(QQ, A.names, A.materialize(), A.comult, A.unit, {0: ONE})
    rep = check_bialgebra(broken)
    assert not rep.passed
    assert any(v["axiom"] == "counit" and v["witness"] == ["s"] for v in rep.violations)


def test_twisted_comultiplication_is_not_cocommutative():
    A, rigid = sweedler()
    assert check_bialgebra(A).passed
    assert not is_cocommutative(A)
    assert not is_gpg(A, rigid).value


# -- compatibility ---------------------------------------------------------------


def test_noncentral_grouplike_violates_compatibility():
    A, rigid = noncentral_grouplike()
    assert check_bialgebra(A).passed
    assert any(v["axiom"] == "central" for v in rigid.check(A).violations)
    assert list(gp_basis(A, rigid, 0).rows) == [{2: ONE}]
    assert list(gp_basis(A, rigid, 1).rows) == [{3: ONE}]
    verdict = check_pgc(A, rigid)
    assert not verdict.value
    w = verdict.witness
    assert {w["Q"], w["Q'"]} == {"e", "s"}
    # a = x in degree e (grouplike 1), a' = gx in degree s (grouplike g):
    # a g (x) a' + a' (x) a g - a' (x) g a - g a (x) a' = -4 gx (x) gx
    a, b = {2: ONE}, {3: ONE}
    one, g = {0: ONE}, {1: ONE}
    t = {}
    tensor_add(t, ONE, A.simple_tensor(A.multiply(a, g), A.multiply(one, b)))
    tensor_add(t, ONE, A.simple_tensor(A.multiply(one, b), A.multiply(a, g)))
    tensor_add(t, -ONE, A.simple_tensor(A.multiply(b, one), A.multiply(g, a)))
    tensor_add(t, -ONE, A.simple_tensor(A.multiply(g, a), A.multiply(b, one)))
    assert t == {(3, 3): Fraction(-4)}


def test_commutative_algebras_are_compatible():
    A, rigid = dual_cyclic_group_algebra(4)
    assert check_pgc(A, rigid).value


def test_compatibility_indeterminate_on_overflow():
    m = free_rank1("Q")
    names = ["1", "Q", "Q^2", "x"]
    mult = {}
    for i, j in itertools.product(range(4), repeat=2):
        if i == 0 or j == 0:
            mult[(i, j)] = {i + j: ONE}
        elif (i, j) == (1, 1):
            mult[(i, j)] = {2: ONE}
        else:
            mult[(i, j)] = OVERFLOW
    comult = {0: {(0, 0): ONE}, 1: {(1, 1): ONE}, 2: {(2, 2): ONE}, 3: {(3, 1): ONE, (1, 3): ONE}}
    A = PresentedBialgebra(QQ, names, mult, comult, {0: ONE}, {0: ONE, 1: ONE, 2: ONE}, [0, 1, 2, 1], m)
    rigid = RigidStructure(m, m.enumerate_window(2), {0: {0: ONE}, 1: {1: ONE}, 2: {2: ONE}})
    assert list(gp_basis(A, rigid, 1).rows) == [{3: ONE}]
    with pytest.raises(Indeterminate):
        check_pgc(A, rigid)
    with pytest.raises(Indeterminate):
        is_left_sided(A, rigid)


# -- envelopes ---------------------------------------------------------------------


def test_nontf_primitives():
    W = build_W(nontf_example(), 3)
    x = W.index("x")
    assert gp_basis(W, W.rigid, 0).rank == 0
    assert list(gp_basis(W, W.rigid, 1).rows) == [{x: ONE}]
    x2 = W.multiply({x: ONE}, {x: ONE})
    assert list(gp_basis(W, W.rigid, 2).rows) == [x2]
    P = gp_lie(W, W.rigid)
    assert [len(P.indices_in_degree(d)) for d in range(4)] == [0, 1, 1, 1]
    assert not is_torsion_free_bialgebra(W, W.rigid).value
    assert is_gpg(W, W.rigid).value


def test_nontf_s2_cross_term_vanishes():
    W = build_W(nontf_example(), 3)
    x = {W.index("x"): ONE}
    assert s_n(W, W.rigid, [(x, 1), (x, 1)]) == {}
    assert delta_difference(W, W.rigid, [(x, 1), (x, 1)]) == {}


def test_free_shift_envelope_is_not_left_sided():
    W = build_W(free_shift_example(5), 5, lie_cap=5)
    v = is_left_sided(W, W.rigid)
    assert not v.value
    assert v.witness["Q"] == "1" and v.witness["Q'"] == "1"


def test_envelope_of_torsion_quotient_is_left_sided():
    L = random_torsion(7)
    Z = build_Z(L, 3)
    assert is_left_sided(Z, Z.rigid).value
    assert is_gpg(Z, Z.rigid).value


def test_s2_over_trivial_monoid():
    W = abelian_over_trivial(2, 2)
    u, v = gp_basis(W, W.rigid, 0).rows
    expected = {}
    tensor_add(expected, ONE, W.simple_tensor(u, v))
    tensor_add(expected, ONE, W.simple_tensor(v, u))
    assert s_n(W, W.rigid, [(u, 0), (v, 0)]) == expected


def test_s3_matches_delta_difference():
    W = abelian_over_trivial(3, 3)
    prims = gp_basis(W, W.rigid, 0).rows
    for triple in itertools.product(prims, repeat=3):
        xs = [(t, 0) for t in triple]
        assert s_n(W, W.rigid, xs) == delta_difference(W, W.rigid, xs)


# -- duals of cyclic group algebras -------------------------------------------------


def test_dual_c3():
    A, rigid = dual_cyclic_group_algebra(3)
    assert check_bialgebra(A).passed
    assert is_cocommutative(A)
    assert gp_basis(A, rigid, 0).rank == 0
    assert not is_gpg(A, rigid).value
    assert grouplikes_of_dual_cyclic_group_algebra(3, QQ) == [{0: ONE, 1: ONE, 2: ONE}]


def test_dual_c2_grouplikes():
    gs = grouplikes_of_dual_cyclic_group_algebra(2, QQ)
    assert gs == [{0: ONE, 1: ONE}, {0: ONE, 1: -ONE}]
    A, _ = dual_cyclic_group_algebra(2)
    for v in gs:
        assert A.coproduct(v) == A.simple_tensor(v, v)
        assert A.counit_of(v) == 1


def test_dual_c3_over_f7_has_three_characters():
    F = GF(7)
    gs = grouplikes_of_dual_cyclic_group_algebra(3, F)
    assert len(gs) == 3
    A, _ = dual_cyclic_group_algebra(3, F)
    for v in gs:
        assert A.coproduct(v) == A.simple_tensor(v, v)


def test_dual_grouplike_count_matches_brute_force():
    # characters of C_n into F_p: the images z of the generator with z^n = 1
    for p in (5, 7, 11, 13):
        F = GF(p)
        for n in range(1, 7):
            expected = sum(1 for z in range(1, p) if pow(z, n, p) == 1)
            assert len(grouplikes_of_dual_cyclic_group_algebra(n, F)) == expected


# -- serialization --------------------------------------------------------------------


def test_json_round_trip():
    for A, rigid in (group_algebra(cyclic_group(3)), dual_cyclic_group_algebra(3), sweedler()):
        doc = json.loads(json.dumps(A.to_json(rigid)))
        B, r2 = PresentedBialgebra.from_json(doc)
        assert B.to_json(r2) == doc
    W = build_W(nontf_example(), 2)
    doc = json.loads(json.dumps(W.to_json()))
    B, r2 = PresentedBialgebra.from_json(doc)
    assert B.dim == W.dim and r2.check(B).passed


def test_eta_accepts_basis_names():
    A, rigid = group_algebra(cyclic_group(2))
    doc = A.to_json(rigid)
    doc["rigid"]["eta"] = {"e": "e", "s": "s"}
    B, r2 = PresentedBialgebra.from_json(doc)
    assert r2.eta == rigid.eta


# -- properties over the fixture corpus -------------------------------------------------


def _corpus(seed):
    rng = random.Random(seed)
    choice = rng.randrange(4)
    if choice == 0:
        L = random_torsion_free(seed, rng.choice(["C2", "C3"]))
        return build_W(L, None, lie_cap=2)
    if choice == 1:
        L = random_torsion_free(seed, "free", 3)
        return build_W(L, 3)
    if choice == 2:
        return build_Z(random_torsion(seed, 4), 4)
    return build_W(random_torsion(seed, 4), 4)


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_envelopes_are_rigid_gpg_cocommutative(seed):
    W = _corpus(seed)
    assert check_bialgebra(W).passed
    assert W.rigid.check(W).passed
    assert is_gpg(W, W.rigid).value
    assert is_cocommutative(W)


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_primitives_augment_to_zero_and_bracket_is_graded(seed):
    W = _corpus(seed)
    m = W.rigid.monoid
    for Q in W.rigid.window:
        for v in gp_basis(W, W.rigid, Q).rows:
            assert W.counit_of(v) == 0
    P = gp_lie(W, W.rigid)
    for (a, b), c in P.bracket_table.items():
        for k in c:
            assert P.degrees[k] == m.mul(P.degrees[a], P.degrees[b])


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_left_sided_implies_torsion(seed):
    W = _corpus(seed)
    if not is_left_sided(W, W.rigid).value:
        return
    m = W.rigid.monoid
    for Q in W.rigid.window:
        if m.mul(Q, Q) not in W.rigid.window:
            continue
        if m.inverse(Q) is not None:
            assert gp_basis(W, W.rigid, Q).rank == 0
        for v in gp_basis(W, W.rigid, Q).rows:
            assert W.multiply(W.rigid.of(Q), v) == {}


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.integers(2, 3))
def test_s_n_identity_on_fixture_primitives(seed, n):
    W = _corpus(seed)
    m = W.rigid.monoid
    prims = [(v, Q) for Q in W.rigid.window for v in gp_basis(W, W.rigid, Q).rows]
    rng = random.Random(seed)
    for _ in range(10):
        if not prims:
            break
        xs = [rng.choice(prims) for _ in range(n)]
        if m.prod(q for _, q in xs) not in W.rigid.window:
            continue
        try:
            lhs = s_n(W, W.rigid, xs)
            rhs = delta_difference(W, W.rigid, xs)
        except Overflow:
            continue
        assert lhs == rhs
