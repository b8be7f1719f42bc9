from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from suspla.fixtures import (
    free_shift_example,
    nontf_example,
    random_torsion,
    random_torsion_free,
)
from suspla.linalg import QQ
from suspla.monoid import cyclic_group, free_rank1
from suspla.suspensive import (
    SchemaError,
    SuspensiveLieAlgebra,
    SuspensiveMorphism,
    WindowTooSmall,
    check_suspensive,
    identity_morphism,
    torsion_flags,
    underlying_abelian,
    zero_lie_algebra,
)

ONE = Fraction(1)


def axioms(report):
    return {v["axiom"] for v in report.violations}


def test_free_shift_example_passes():
    assert check_suspensive(free_shift_example(5)).passed


def test_injected_bracket_breaks_grading():
    L = free_shift_example(3)
    bad = SuspensiveLieAlgebra(L.monoid, L.names, L.degrees, L.action, {(0, 1): {0: ONE}, (1, 0): {0: -ONE}}, QQ, 3)
    rep = check_suspensive(bad)
    assert not rep.passed
    assert "graded_bracket" in axioms(rep)
    witness = next(v for v in rep.violations if v["axiom"] == "graded_bracket")
    assert witness["witness"][:2] == ["x0", "x1"]


def test_nontf_example_passes_and_is_torsion():
    L = nontf_example()
    assert check_suspensive(L, 3).passed
    flags = torsion_flags(L, 3)
    assert flags.torsion and not flags.torsion_free
    assert flags.torsion_witness == {"degree": "Q", "element": [["x", "1"]]}


def test_group_fixtures_are_torsion_free():
    for kind in ("C2", "C3", "V4"):
        L = random_torsion_free(5, kind)
        assert torsion_flags(L).torsion_free


def test_zero_algebra_flags():
    z = zero_lie_algebra(cyclic_group(2))
    f = torsion_flags(z)
    assert f.torsion and f.torsion_free


def test_torsion_window_beyond_data():
    L = random_torsion(1)
    with pytest.raises(WindowTooSmall):
        torsion_flags(L, L.bound)


def test_action_violations_are_reported():
    m = free_rank1("Q")
    # Q . x lands in the wrong degree
    L = SuspensiveLieAlgebra(m, ["x", "y"], [1, 1], {1: {0: {1: ONE}}}, {}, QQ, 3)
    assert "action_grading" in axioms(check_suspensive(L))
    c2 = cyclic_group(2)
    s = c2.parse("s")
    # s . s . x = -x is not the identity action
    L = SuspensiveLieAlgebra(c2, ["x", "y"], [0, 1], {s: {0: {1: ONE}, 1: {0: -ONE}}}, {}, QQ)
    assert "action_associative" in axioms(check_suspensive(L))


def test_jacobi_and_bilinearity_violations():
    # sl2-like table with a wrong sign violates Jacobi
    names = ["e", "f", "h"]
    br = {
        (2, 0): {0: 2 * ONE}, (0, 2): {0: -2 * ONE},
        (2, 1): {1: -2 * ONE}, (1, 2): {1: 2 * ONE},
        (0, 1): {2: ONE}, (1, 0): {2: -ONE},
    }
    m = free_rank1()
    L = SuspensiveLieAlgebra(m, names, [0, 0, 0], {1: {}}, br, QQ, 0)
    assert check_suspensive(L, 0).passed
    br_bad = dict(br)
    br_bad[(2, 1)] = {1: 2 * ONE}
    br_bad[(1, 2)] = {1: -2 * ONE}
    L = SuspensiveLieAlgebra(m, names, [0, 0, 0], {1: {}}, br_bad, QQ, 0)
    assert "jacobi" in axioms(check_suspensive(L, 0))
    # Q . [x, y] = Q . z = u, but [Q . x, y] = 0
    m3 = free_rank1("Q")
    L = SuspensiveLieAlgebra(m3, ["x", "y", "z", "u"], [1, 1, 2, 3], {1: {2: {3: ONE}}},
                             {(0, 1): {2: ONE}, (1, 0): {2: -ONE}}, QQ, 3)
    rep = check_suspensive(L)
    assert axioms(rep) == {"kG_bilinear"}
    assert ["Q", "x", "y"] in [v["witness"] for v in rep.violations]


def test_antisymmetry_violation():
    m = free_rank1()
    L = SuspensiveLieAlgebra(m, ["x"], [1], {1: {}}, {(0, 0): {}}, QQ, 4)
    assert check_suspensive(L).passed
    L = SuspensiveLieAlgebra(m, ["x", "y"], [1, 2], {1: {}}, {(0, 0): {1: ONE}}, QQ, 4)
    assert "antisymmetry" in axioms(check_suspensive(L))


def test_underlying_abelian():
    L = random_torsion_free(2, "free")
    A = underlying_abelian(L)
    assert A.is_abelian()
    assert underlying_abelian(A).to_json() == A.to_json()
    assert underlying_abelian(free_shift_example(3)).to_json() == free_shift_example(3).to_json()


def test_json_round_trip():
    for L in (free_shift_example(4), nontf_example(), random_torsion_free(1, "C3"), random_torsion(3)):
        doc = json.loads(json.dumps(L.to_json()))
        assert SuspensiveLieAlgebra.from_json(doc).to_json() == L.to_json()


def test_schema_errors():
    with pytest.raises(SchemaError):
        SuspensiveLieAlgebra.from_json({"basis": []})
    with pytest.raises(SchemaError):
        SuspensiveLieAlgebra.from_json({"monoid": {"kind": "free_rank1", "generator": "Q"}, "basis": [{"name": "x"}]})
    with pytest.raises(SchemaError):
        SuspensiveLieAlgebra.from_json({
            "monoid": {"kind": "free_rank1", "generator": "Q"},
            "basis": [{"name": "x", "degree": "Q"}],
            "bracket": {"x|z": [["x", "1"]]},
        })


def test_morphisms_compose_and_check():
    L = random_torsion_free(4, "C2")
    ident = identity_morphism(L)
    assert ident.check().passed
    assert ident.is_isomorphism()
    twice = ident.compose(ident)
    assert twice.images == ident.images
    zero = SuspensiveMorphism(L, L, {})
    assert zero.check().passed
    assert zero.compose(ident).images == {}


@given(st.integers(0, 10**6), st.sampled_from(["C2", "C3", "V4", "free"]))
def test_random_torsion_free_fixtures_are_valid(seed, kind):
    L = random_torsion_free(seed, kind)
    assert check_suspensive(L).passed
    win = L.default_window()
    if not L.monoid.is_finite:
        win = L.monoid.enumerate_window(L.bound // 2)
    assert torsion_flags(L, win).torsion_free


@given(st.integers(0, 10**6))
def test_random_torsion_fixtures_are_valid(seed):
    L = random_torsion(seed)
    assert check_suspensive(L).passed
    assert torsion_flags(L, L.monoid.enumerate_window(L.bound // 2)).torsion


@given(st.integers(0, 10**6))
def test_torsion_free_is_monotone_in_window(seed):
    L = random_torsion(seed)
    flags = [torsion_flags(L, L.monoid.enumerate_window(b)).torsion_free for b in range(L.bound // 2 + 1)]
    assert all(a or not b for a, b in zip(flags, flags[1:]))
