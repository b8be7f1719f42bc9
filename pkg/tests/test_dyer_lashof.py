from __future__ import annotations

import itertools
import random
import threading
from math import comb

import pytest
from hypothesis import given, settings, strategies as st
from sympy import GF as SGF
from sympy.polys.matrices import DomainMatrix

from suspla.dyer_lashof import (
    CapExceeded,
    DLConfig,
    DLError,
    DyerLashof,
    NotApplicable,
    adem_step,
    binomial_mod_p,
    degree,
    excess,
    format_word,
    is_admissible,
    parse_word,
    verify_left_sided_e0,
)


def W(text, p=2):
    return parse_word(text, p)


# -- independent Adem evaluator ----------------------------------------------------------


def _binom(a, b):
    return comb(a, b) if 0 <= b <= a else 0


def oracle_adem(a, b, p):
    """Right-hand side of the relation for the pair a b, read off the printed sums."""
    (e1, r), (e2, s) = a, b
    out = {}

    def add(word, c):
        if any(i < 0 for _, i in word):
            return
        c %= p
        if c:
            out[word] = (out.get(word, 0) + c) % p

    for i in range(-3, r + s + 4):
        hi = r + s - i
        if p == 2:
            add(((0, hi), (0, i)), _binom(i - s - 1, 2 * i - r))
            continue
        sgn = (-1) ** ((r + i) % 2)
        c1 = _binom(p * i - (p - 1) * s - i - 1, p * i - r)
        c2 = _binom(p * i - (p - 1) * s - i, p * i - r)
        c3 = _binom(p * i - (p - 1) * s - i - 1, p * i - r - 1)
        if (e1, e2) == (0, 0):
            add(((0, hi), (0, i)), sgn * c1)
        elif (e1, e2) == (0, 1):
            add(((1, hi), (0, i)), sgn * c2)
            add(((0, hi), (1, i)), -sgn * c3)
        elif (e1, e2) == (1, 1):
            add(((1, hi), (1, i)), -sgn * c3)
        else:
            # Bockstein applied to the left factor of the Q^r Q^s relation
            add(((1, hi), (0, i)), sgn * c1)
    return {w: c for w, c in out.items() if c}


def oracle_rewritable(a, b, p):
    r, s = a[1], b[1]
    if p == 2:
        return r > 2 * s
    return r >= p * s if b[0] else r > p * s


@pytest.mark.parametrize("p", [2, 3, 5])
def test_adem_step_matches_independent_evaluator(p):
    gens = [(e, i) for i in range(13) for e in ((0,) if p == 2 else (0, 1))]
    count = 0
    for a, b in itertools.product(gens, repeat=2):
        if not oracle_rewritable(a, b, p):
            with pytest.raises(NotApplicable):
                adem_step((a, b), p)
            continue
        count += 1
        assert adem_step((a, b), p) == oracle_adem(a, b, p), (a, b)
    assert count >= 42


def test_binomial_convention():
    assert binomial_mod_p(-1, -1, 2) == 0
    assert binomial_mod_p(3, 5, 2) == 0
    for a in range(0, 40):
        for b in range(0, a + 1):
            for p in (2, 3, 5, 7):
                assert binomial_mod_p(a, b, p) == comb(a, b) % p


# -- named values ------------------------------------------------------------------------


def test_excess_values():
    assert excess(W("Q5"), 2) == 5
    assert excess(W("Q2 Q1"), 2) == 1
    assert excess(W("Q1 Q2"), 2) == -1
    assert excess((), 2) == float("inf")
    # 2*1 - 1 - (2*1*2 - 0) at p = 3
    assert excess(W("bQ1 Q1", 3), 3) == -3


def test_admissibility():
    assert is_admissible(W("Q2 Q2"), 2)
    assert not is_admissible(W("Q3 Q1"), 2)
    assert is_admissible(W("Q7"), 2)


def test_q3_q1_vanishes():
    assert adem_step((W("Q3")[0], W("Q1")[0]), 2) == {}


def test_q4_q1():
    # i = 2: C(0, 0) = 1; i = 3: C(1, 2) = 0
    assert adem_step(W("Q4 Q1"), 2) == {W("Q3 Q2"): 1}
    assert adem_step(W("Q4 Q1"), 2) == oracle_adem(*W("Q4 Q1"), 2)


def test_admissible_pair_not_rewritten():
    with pytest.raises(NotApplicable):
        adem_step(W("Q2 Q1"), 2)


def test_normalize_examples():
    R = DyerLashof(DLConfig(p=2, e=0))
    assert R.normalize("Q2 Q1").to_json() == [["Q2 Q1", 1]]
    assert not R.normalize("Q0 Q1")
    # Q^n Q^0: Q1 Q0 = 0, Q2 Q0 = Q1 Q1, Q3 Q0 = Q1 Q2 (excess -1, so 0 in R(0))
    assert R.rewrite("Q1 Q0") == {}
    assert R.rewrite("Q2 Q0") == {W("Q1 Q1"): 1}
    assert R.rewrite("Q3 Q0") == {W("Q1 Q2"): 1}
    assert R.normalize("Q2 Q0").to_json() == [["Q1 Q1", 1]]
    assert not R.normalize("Q3 Q0")
    for n in (1, 2, 3):
        for w, _ in R.normalize(f"Q{n} Q0").terms:
            assert all(i > 0 for _, i in w)
    # R(-inf) keeps the negative-excess word
    assert DyerLashof(DLConfig(p=2, e=-10)).normalize("Q3 Q0").to_json() == [["Q1 Q2", 1]]


def test_multiply_examples():
    R = DyerLashof(DLConfig(p=2, e=0))
    assert R.multiply("1", "Q3 Q1").to_json() == R.normalize("Q3 Q1").to_json()
    assert R.multiply("Q0", "Q0").to_json() == [["Q0 Q0", 1]]
    assert R.multiply("Q1", "Q1").to_json() == [["Q1 Q1", 1]]
    assert R.multiply("Q3", "Q1").to_json() == []


def test_coproduct_examples():
    R2 = DyerLashof(DLConfig(p=2))
    assert R2.coproduct("Q0") == {(W("Q0"), W("Q0")): 1}
    assert R2.coproduct("Q1") == {(W("Q0"), W("Q1")): 1, (W("Q1"), W("Q0")): 1}
    R3 = DyerLashof(DLConfig(p=3))
    # bQ0 has excess -1 and vanishes in R(0)
    assert R3.coproduct("bQ1") == {(W("Q0", 3), W("bQ1", 3)): 1, (W("bQ1", 3), W("Q0", 3)): 1}


def test_augmentation():
    R = DyerLashof(DLConfig(p=2))
    assert R.augment("1") == 1
    assert R.augment("Q0") == 1
    assert R.augment("Q2") == 0
    assert R.augment("Q0 Q0") == 1


def test_basis_examples():
    R = DyerLashof(DLConfig(p=2, e=0))
    assert [format_word(w) for w in R.basis_in_degree(0)] == ["1", "Q0", "Q0 Q0", "Q0 Q0 Q0", "Q0 Q0 Q0 Q0"]
    assert W("Q1") in R.basis_in_degree(1)
    assert [format_word(w) for w in R.basis_in_degree(3)] == ["Q3", "Q2 Q1"]
    with pytest.raises(CapExceeded):
        R.basis_in_degree(25)


def test_k_adic_and_e0_examples():
    R = DyerLashof(DLConfig(p=2))
    assert R.k_adic_level("Q0") == 0
    assert R.k_adic_level("Q2") == 1
    assert R.k_adic_level("Q1 Q1") == 2
    for n in (1, 2, 3, 4):
        assert not R.e0_multiply(f"Q{n}", "Q0")
        assert not R.multiply("Q0", f"Q{n}")
    prod = R.e0_multiply("Q1", "Q1")
    assert prod and prod.filtration == 2 and prod.degree == 2


def test_left_sided_in_associated_graded():
    rep3 = verify_left_sided_e0(3, 16)
    assert rep3.passed and rep3.checked > 0
    rep2 = verify_left_sided_e0(2, 10)
    assert rep2.passed
    assert ["Q1", "Q1", "Q1 Q1"] in rep2.equal_degree_nonzero


def test_grouplike_central_in_associated_graded():
    for p, top in ((2, 10), (3, 16)):
        R = DyerLashof(DLConfig(p=p))
        for d in range(1, top + 1):
            for w in R.basis_in_degree(d):
                left = R.e0_multiply({((0, 0),): 1}, {w: 1})
                right = R.e0_multiply({w: 1}, {((0, 0),): 1})
                assert left.element == right.element
                assert not left


def test_errors():
    R = DyerLashof(DLConfig(p=2, cap=6))
    with pytest.raises(CapExceeded):
        R.normalize("Q4 Q3")
    with pytest.raises(DLError):
        parse_word("bQ1", 2)
    with pytest.raises(DLError):
        parse_word("P3", 3)
    with pytest.raises(DLError):
        DLConfig(p=4)
    with pytest.raises(DLError):
        DyerLashof(DLConfig(p=2, e=-1)).k_adic_level("Q1")


def test_word_syntax_round_trip():
    for text in ("1", "Q3 Q1", "bQ2 Q0 bQ1"):
        assert format_word(parse_word(text, 3)) == text


# -- rank oracle for basis counts ----------------------------------------------------------


def _words(p, d, length):
    gens = []
    top = d + length + 1
    for i in range(top + 1):
        for e in (0,) if p == 2 else (0, 1):
            g = (e, i)
            if degree((g,), p) <= d + length:
                gens.append(g)
    lo = min(degree((g,), p) for g in gens)
    out = []

    def grow(w, deg):
        if len(w) == length:
            if deg == d:
                out.append(w)
            return
        left = length - len(w) - 1
        for g in gens:
            gd = degree((g,), p)
            if deg + gd + lo * left <= d:
                grow(w + (g,), deg + gd)

    grow((), 0)
    return out


def oracle_dimension(p, d, length, e=0):
    """dim of R(e) in (degree d, word length) from the free algebra modulo relations.

    Relations and the excess ideal both preserve word length, so the
    computation is exact one length at a time.
    """
    cols = _words(p, d, length)
    if not cols:
        return 0
    pos = {w: k for k, w in enumerate(cols)}
    rows = []
    for w in cols:
        bad = any(excess(w[a:b], p) < e for a in range(length) for b in range(a + 1, length + 1))
        if bad:
            rows.append({pos[w]: 1})
            continue
        for k in range(length - 1):
            if not oracle_rewritable(w[k], w[k + 1], p):
                continue
            row = {pos[w]: 1}
            for pair, c in oracle_adem(w[k], w[k + 1], p).items():
                v = w[:k] + pair + w[k + 2 :]
                row[pos[v]] = (row.get(pos[v], 0) - c) % p
            rows.append({k2: c for k2, c in row.items() if c % p})
    K = SGF(p)
    dense = [[K(r.get(c, 0)) for c in range(len(cols))] for r in rows if r]
    rank = DomainMatrix(dense, (len(dense), len(cols)), K).rank() if dense else 0
    return len(cols) - rank


@pytest.mark.parametrize("p,top", [(2, 9), (3, 20)])
def test_basis_counts_match_rank_oracle(p, top):
    R = DyerLashof(DLConfig(p=p))
    for d in range(1, top + 1):
        basis = R.basis_in_degree(d)
        by_len = {}
        for w in basis:
            by_len[len(w)] = by_len.get(len(w), 0) + 1
        longest = max(by_len, default=0)
        for length in range(1, longest + 3):
            assert oracle_dimension(p, d, length) == by_len.get(length, 0), (d, length)


# -- rewriting properties ------------------------------------------------------------------


def random_word(rng, p, cap):
    gens = [(e, i) for i in range(0, 8) for e in ((0,) if p == 2 else (0, 1))]
    w = []
    for _ in range(rng.randint(1, 5)):
        g = rng.choice(gens)
        if degree(tuple(w) + (g,), p) <= cap and degree(tuple(w) + (g,), p) >= 0:
            w.append(g)
    return tuple(w)


@pytest.mark.parametrize("p", [2, 3])
def test_rewriting_confluent_on_random_words(p):
    rng = random.Random(p)
    R = DyerLashof(DLConfig(p=p, e=-100, cap=24))
    for _ in range(300):
        w = random_word(rng, p, 24)
        left = R.rewrite({w: 1}, "leftmost")
        right = R.rewrite({w: 1}, "rightmost")
        assert left == right, format_word(w)
        assert all(is_admissible(v, p) for v in left)
        assert all(degree(v, p) == degree(w, p) for v in left)


def _tensor3(R, t, side):
    out = {}
    for (a, b), c in t.items():
        if side == "left":
            for (x, y), d in R.coproduct({a: 1}).items():
                key = (x, y, b)
                out[key] = (out.get(key, 0) + c * d) % R.p
        else:
            for (x, y), d in R.coproduct({b: 1}).items():
                key = (a, x, y)
                out[key] = (out.get(key, 0) + c * d) % R.p
    return {k: c for k, c in out.items() if c}


@pytest.mark.parametrize("p", [2, 3])
def test_coassociative_on_generators(p):
    R = DyerLashof(DLConfig(p=p))
    for e in (0,) if p == 2 else (0, 1):
        for i in range(0, 7):
            g = ((e, i),)
            if degree(g, p) > 24:
                continue
            t = R.coproduct({g: 1})
            assert _tensor3(R, t, "left") == _tensor3(R, t, "right")


@settings(max_examples=40)
@given(st.sampled_from([2, 3]), st.integers(0, 10**6))
def test_coproduct_multiplicative_and_coassociative(p, seed):
    rng = random.Random(seed)
    R = DyerLashof(DLConfig(p=p, cap=24))
    w = random_word(rng, p, 24)
    lhs = R.coproduct({w: 1})
    assert lhs == R.normalize_tensor(R.coproduct_unreduced({w: 1}))
    assert _tensor3(R, lhs, "left") == _tensor3(R, lhs, "right")


def test_concurrent_use_matches_serial():
    words = [random_word(random.Random(k), 3, 24) for k in range(60)]
    serial = [DyerLashof(DLConfig(p=3)).normalize({w: 1}).terms for w in words]
    shared = DyerLashof(DLConfig(p=3))
    results = [None] * len(words)

    def work(k):
        results[k] = shared.normalize({words[k]: 1}).terms

    threads = [threading.Thread(target=work, args=(k,)) for k in range(len(words))]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == serial
