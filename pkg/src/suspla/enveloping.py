"""Truncated universal rigid envelopes W(L) and Z(L), Lie filtration and symmetric powers over kG."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .bialgebra import (
    OVERFLOW,
    Indeterminate,
    Overflow,
    PresentedBialgebra,
    RigidStructure,
    gp_basis,
    tensor_add,
)
from .linalg import axpy, canonical, full_space, quotient_basis, rref
from .monoid import DegreeWindow
from .suspensive import (
    SuspensiveLieAlgebra,
    SuspensiveMorphism,
    SuspensiveVectorSpace,
    WindowTooSmall,
    check_suspensive,
    torsion_flags,
)

__all__ = [
    "InvalidLieAlgebra",
    "NonTorsionInput",
    "TruncatedEnvelope",
    "straighten",
    "build_W",
    "build_Z",
    "canonical_inclusion",
    "lie_filtration_level",
    "assoc_graded",
    "sym_power_kG",
    "default_lie_cap",
    "monomial_name",
]


class InvalidLieAlgebra(ValueError):
    """The input fails the suspensive Lie algebra axioms."""

    def __init__(self, report) -> None:
        first = report.violations[0]
        super().__init__(f"{first['axiom']} fails at {first['witness']}")
        self.report = report


class NonTorsionInput(UserWarning):
    """Z(L) was requested for a Lie algebra that is not torsion."""


# -- PBW straightening in U(L) -------------------------------------------------


class Straightener:
    """Rewrites words in U(L) to weakly increasing words via xy -> yx + [x, y]."""

    def __init__(self, L: SuspensiveLieAlgebra) -> None:
        self.L = L
        self._memo: dict = {}

    def __call__(self, word: tuple) -> dict:
        hit = self._memo.get(word)
        if hit is not None:
            return hit
        k = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
        one = self.L.field.one
        if k is None:
            out = {word: one}
        else:
            out: dict = {}
            a, x, y, b = word[:k], word[k], word[k + 1], word[k + 2 :]
            for w, c in self(a + (y, x) + b).items():
                axpy(out, c, {w: one})
            for z, c in self.L.bracket_basis(x, y).items():
                for w, e in self(a + (z,) + b).items():
                    axpy(out, c * e, {w: one})
            out = canonical(out)
        self._memo[word] = out
        return out


def straighten(L: SuspensiveLieAlgebra, word: Sequence[int]) -> dict:
    return Straightener(L)(tuple(word))


# -- helpers -------------------------------------------------------------------


def monomial_name(L: SuspensiveVectorSpace, g, word: tuple) -> str:
    m = L.monoid
    parts = [] if g == m.one else [m.name(g)]
    for i, grp in itertools.groupby(word):
        n = len(list(grp))
        parts.append(L.names[i] if n == 1 else f"{L.names[i]}^{n}")
    return "*".join(parts) if parts else m.name(m.one)


def _window(L: SuspensiveVectorSpace, window) -> DegreeWindow:
    m = L.monoid
    if window is None:
        win = L.default_window()
    elif isinstance(window, DegreeWindow):
        win = window
    else:
        win = m.enumerate_window(int(window))
    if L.bound is not None and win.bound is not None and win.bound > L.bound:
        raise WindowTooSmall(
            f"window {win.describe()} exceeds the stored data (complete up to {m.name(L.bound)})"
        )
    return win


def _word_degree(L: SuspensiveVectorSpace, word: tuple):
    return L.monoid.prod(L.degrees[i] for i in word)


def _words(L: SuspensiveVectorSpace, win: DegreeWindow, cap: int) -> list:
    """Weakly increasing words of length <= cap whose degree lies in the window."""
    letters = [i for i in range(L.dim) if L.degrees[i] in win]
    out = [()]
    frontier = [()]
    for _ in range(cap):
        nxt = []
        for w in frontier:
            start = w[-1] if w else 0
            for i in letters:
                if i < start:
                    continue
                v = w + (i,)
                if _word_degree(L, v) in win:
                    nxt.append(v)
        out.extend(nxt)
        frontier = nxt
    return out


def default_lie_cap(L: SuspensiveVectorSpace, window=None) -> int:
    """Longest word length with a monomial in the window.

    Unbounded (and an error) when a letter sits in the identity degree or
    the monoid is finite with L nonzero; pass an explicit cap then.
    """
    win = _window(L, window)
    m = L.monoid
    letters = [i for i in range(L.dim) if L.degrees[i] in win]
    if not letters:
        return 0
    if m.is_finite or any(L.degrees[i] == m.one for i in letters):
        raise ValueError("Lie length is unbounded in this window; pass lie_cap explicitly")
    low = min(L.degrees[i] for i in letters)
    return win.bound // low


def _pref_key(L: SuspensiveVectorSpace, mono: tuple):
    g, word = mono
    return (len(word), word, L.monoid.sort_key(g))


@dataclass
class _Block:
    degree: object
    columns: list
    position: dict
    quotient: object
    basis_ids: list


class TruncatedEnvelope(PresentedBialgebra):
    """W(L) or Z(L) on a degree window, truncated at Lie length ``lie_cap``.

    Each basis element is the class of a monomial ``(g, word)``; ``levels``
    records the word length, which is the Lie filtration level of the class.
    """

    def __init__(self, L, window, lie_cap, kind, names, degrees, reps, levels, comult, counit, rigid, mult_fn):
        super().__init__(
            L.field, names, None, comult, {reps.index((L.monoid.one, ())): L.field.one}, counit,
            degrees, L.monoid, mult_fn=mult_fn,
        )
        self.source = L
        self.window = window
        self.lie_cap = lie_cap
        self.kind = kind
        self.reps = tuple(reps)
        self.levels = tuple(levels)
        self.rigid = rigid
        self.bi_ideal_ok = True
        self.ideal_dims: dict = {}

    def filtration_subspace(self, n: int):
        return rref([{i: self.field.one} for i in range(self.dim) if self.levels[i] <= n], self.dim, self.field)

    def to_json(self, rigid=None) -> dict:
        doc = super().to_json(rigid or self.rigid)
        doc["filtration"] = {self.names[i]: self.levels[i] for i in range(self.dim)}
        doc["truncation"] = {
            "kind": self.kind,
            "window": self.window.to_json(),
            "lie_cap": self.lie_cap,
        }
        return doc

    def dims_by_degree(self) -> dict:
        out = {}
        for g in self.window:
            out[self.monoid.name(g)] = len(self.block(g))
        return out

    def bigraded_dims(self) -> dict:
        out: dict = {}
        for i in range(self.dim):
            key = (self.degrees[i], self.levels[i])
            out[key] = out.get(key, 0) + 1
        return out

    def as_suspensive_space(self) -> SuspensiveVectorSpace:
        """Underlying space with the action of G by multiplication with grouplikes."""
        m = self.monoid
        gens = list(m.elements()) if m.is_finite else [1]
        action = {}
        for g in gens:
            table = {}
            for i in range(self.dim):
                if m.mul(g, self.degrees[i]) in self.window:
                    table[i] = self.multiply(self.rigid.eta[g], {i: self.field.one})
            action[g] = table
        bound = None if m.is_finite else self.window.bound
        return SuspensiveVectorSpace(m, self.names, self.degrees, action, self.field, bound)


class _WBuilder:
    def __init__(self, L: SuspensiveLieAlgebra, win: DegreeWindow, cap: int) -> None:
        self.L = L
        self.win = win
        self.cap = cap
        self.m = L.monoid
        self.S = Straightener(L)
        self.one = L.field.one

    def build(self):
        L, m, win, cap = self.L, self.m, self.win, self.cap
        words = _words(L, win, cap)
        self.words = words
        monos: dict = {d: [] for d in win}
        for w in words:
            e = _word_degree(L, w)
            for d in win:
                for g in m.quotients(e, d):
                    if g in win:
                        monos[d].append((g, w))
        rel_rows: dict = {d: [] for d in win}
        blocks = {}
        for d in win:
            cols = sorted(set(monos[d]), key=lambda t: _pref_key(L, t), reverse=True)
            blocks[d] = (cols, {c: k for k, c in enumerate(cols)})
        gens = [g for g in (m.elements() if m.is_finite else [1]) if g != m.one]
        for ell in range(L.dim):
            for w in words:
                if len(w) + 1 > cap:
                    continue
                for g in gens:
                    e = m.mul(g, _word_degree(L, (ell,) + w))
                    if e not in win:
                        continue
                    rel: dict = {}
                    for v, c in self.S((ell,) + w).items():
                        axpy(rel, c, {(g, v): self.one})
                    for z, c in L.act_basis(g, ell).items():
                        for v, a in self.S((z,) + w).items():
                            axpy(rel, -c * a, {(m.one, v): self.one})
                    rel = canonical(rel)
                    if not rel:
                        continue
                    for d in win:
                        for h in m.quotients(e, d):
                            cols, pos = blocks[d]
                            row = {}
                            for (g2, v), c in rel.items():
                                row[pos[(m.mul(h, g2), v)]] = c
                            rel_rows[d].append(row)
        self.blocks = {}
        names, degrees, reps, levels = [], [], [], []
        for d in win:
            cols, pos = blocks[d]
            rels = rref(rel_rows[d], len(cols), L.field)
            q = quotient_basis(full_space(len(cols), self.one), rels, cols)
            labels = sorted(q.representative_labels, key=lambda t: _pref_key(L, t))
            ids = []
            for g, w in labels:
                ids.append(len(names))
                names.append(monomial_name(L, g, w))
                degrees.append(d)
                reps.append((g, w))
                levels.append(len(w))
            self.blocks[d] = _Block(d, cols, pos, q, ids)
        self.names, self.degrees, self.reps, self.levels = names, degrees, reps, levels
        self.rep_index = {r: i for i, r in enumerate(reps)}
        return self

    def normal_form(self, combo: Mapping) -> dict:
        """Class of a combination of monomials, in envelope coordinates."""
        by_block: dict = {}
        m = self.m
        for (g, w), c in combo.items():
            if len(w) > self.cap:
                raise Overflow("word longer than the Lie cap")
            d = m.mul(g, _word_degree(self.L, w))
            if d not in self.win:
                raise Overflow("degree outside the window")
            blk = self.blocks[d]
            axpy(by_block.setdefault(d, {}), c, {blk.position[(g, w)]: self.one})
        out: dict = {}
        for d, v in by_block.items():
            blk = self.blocks[d]
            nf = blk.quotient.normal_form(v)
            for k, c in nf.items():
                out[self.rep_index[blk.columns[k]]] = c
        return canonical(out)

    def product(self, i: int, j: int):
        (g1, w1), (g2, w2) = self.reps[i], self.reps[j]
        g = self.m.mul(g1, g2)
        if len(w1) + len(w2) > self.cap:
            return OVERFLOW
        if self.m.mul(g, _word_degree(self.L, w1 + w2)) not in self.win:
            return OVERFLOW
        combo = {(g, v): c for v, c in self.S(w1 + w2).items()}
        return self.normal_form(combo)

    def coproduct(self, i: int) -> dict:
        g, w = self.reps[i]
        m, L = self.m, self.L
        out: dict = {}
        n = len(w)
        for mask in range(1 << n):
            left_word = tuple(w[k] for k in range(n) if not mask >> k & 1)
            right_word = tuple(w[k] for k in range(n) if mask >> k & 1)
            gl = m.mul(g, m.prod(L.degrees[w[k]] for k in range(n) if mask >> k & 1))
            gr = m.mul(g, m.prod(L.degrees[w[k]] for k in range(n) if not mask >> k & 1))
            a = self.normal_form({(gl, left_word): self.one})
            b = self.normal_form({(gr, right_word): self.one})
            for x, c in a.items():
                for y, e in b.items():
                    tensor_add(out, c * e, {(x, y): self.one})
        return out


def _validate(L: SuspensiveLieAlgebra, win: DegreeWindow) -> None:
    report = check_suspensive(L, win)
    if not report.passed:
        raise InvalidLieAlgebra(report)


def build_W(L: SuspensiveLieAlgebra, window=None, lie_cap: int | None = None, validate: bool = True) -> TruncatedEnvelope:
    """The universal rigid envelope of L, degreewise on the window, words up to ``lie_cap``."""
    win = _window(L, window)
    if validate:
        _validate(L, win)
    cap = default_lie_cap(L, win) if lie_cap is None else int(lie_cap)
    if cap < 0:
        raise ValueError("lie_cap must be nonnegative")
    b = _WBuilder(L, win, cap).build()
    m = L.monoid
    comult = {i: b.coproduct(i) for i in range(len(b.reps))}
    counit = {i: L.field.one for i, (g, w) in enumerate(b.reps) if not w}
    eta = {g: {b.rep_index[(g, ())]: L.field.one} for g in win}
    rigid = RigidStructure(m, win, eta)
    W = TruncatedEnvelope(L, win, cap, "W", b.names, b.degrees, b.reps, b.levels, comult, counit, rigid, b.product)
    W._builder = b
    return W


def canonical_inclusion(L: SuspensiveLieAlgebra, W: TruncatedEnvelope) -> SuspensiveMorphism:
    """L into Lie level 1 of W(L), as a map of suspensive vector spaces."""
    space = W.as_suspensive_space()
    b = W._builder
    images = {}
    for i in range(L.dim):
        if L.degrees[i] in W.window and W.lie_cap >= 1:
            images[i] = b.normal_form({(L.monoid.one, (i,)): L.field.one})
    return SuspensiveMorphism(L, space, images)


def lie_filtration_level(W: TruncatedEnvelope, element: Mapping) -> int:
    """Least n with the element in the n-th filtration stage."""
    v = canonical(element)
    return max((W.levels[i] for i in v), default=0)


def assoc_graded(W: TruncatedEnvelope) -> PresentedBialgebra:
    """Associated graded of the Lie filtration, on the same basis."""

    def top(v: Mapping, n: int) -> dict:
        return {i: c for i, c in v.items() if W.levels[i] == n}

    def product(i: int, j: int):
        n = W.levels[i] + W.levels[j]
        if n > W.lie_cap:
            return OVERFLOW
        v = W.product_basis(i, j)
        if v is OVERFLOW:
            return OVERFLOW
        return top(v, n)

    comult = {}
    for i in range(W.dim):
        n = W.levels[i]
        comult[i] = {(a, b): c for (a, b), c in W.comult.get(i, {}).items() if W.levels[a] + W.levels[b] == n}
    names = [f"{nm}" for nm in W.names]
    G = PresentedBialgebra(W.field, names, None, comult, W.unit, W.counit, W.degrees, W.monoid, mult_fn=product)
    G.levels = W.levels
    return G


def sym_power_kG(L: SuspensiveVectorSpace, n: int, window=None) -> dict:
    """Dimensions per degree of the n-th symmetric power of L over kG.

    Monomials g * l_1...l_n modulo h*g*(l_1...l_n) = h*l_1...(g.l_i)...l_n.
    """
    win = _window(L, window)
    m = L.monoid
    one = L.field.one
    if n == 0:
        return {d: 1 for d in win}
    m = L.monoid
    letters = [i for i in range(L.dim) if L.degrees[i] in win]
    words = []
    for w in itertools.combinations_with_replacement(letters, n):
        if _word_degree(L, w) in win:
            words.append(w)
    blocks: dict = {d: [] for d in win}
    for w in words:
        e = _word_degree(L, w)
        for d in win:
            for g in m.quotients(e, d):
                blocks[d].append((g, w))
    pos = {d: {t: k for k, t in enumerate(sorted(set(v), key=lambda t: (t[1], t[0])))} for d, v in blocks.items()}
    rows: dict = {d: [] for d in win}
    gens = [g for g in (m.elements() if m.is_finite else [1]) if g != m.one]
    for w in words:
        e0 = _word_degree(L, w)
        for g in gens:
            e = m.mul(g, e0)
            if e not in win:
                continue
            for k in range(n):
                rel: dict = {(g, w): one}
                for z, c in L.act_basis(g, w[k]).items():
                    v = tuple(sorted(w[:k] + (z,) + w[k + 1 :]))
                    axpy(rel, -c, {(m.one, v): one})
                rel = canonical(rel)
                if not rel:
                    continue
                for d in win:
                    for h in m.quotients(e, d):
                        rows[d].append({pos[d][(m.mul(h, g2), v)]: c for (g2, v), c in rel.items()})
    return {d: len(pos[d]) - rref(rows[d], len(pos[d]), L.field).rank for d in win}


# -- Z(L) ------------------------------------------------------------------------


def build_Z(L: SuspensiveLieAlgebra, window=None, lie_cap: int | None = None, W: TruncatedEnvelope | None = None) -> TruncatedEnvelope:
    """Quotient of W(L) by the ideal generated by l1*l2 (|l1| divides |l2|) and Q*l (l a Q-primitive)."""
    W = W if W is not None else build_W(L, window, lie_cap)
    win = W.window
    m = L.monoid
    one = W.field.one
    flags = torsion_flags(L, _decidable(L, win))
    if not flags.torsion:
        warnings.warn(
            f"Lie algebra is not torsion (witness {flags.nontorsion_witness})", NonTorsionInput, stacklevel=2
        )
    gp = {q: gp_basis(W, W.rigid, q).rows for q in win}
    seeds = []
    skipped = 0
    for q1, q2 in itertools.product(win, repeat=2):
        if not m.divides(q1, q2) or m.mul(q1, q2) not in win:
            continue
        for a in gp[q1]:
            for b in gp[q2]:
                try:
                    seeds.append(W.multiply(a, b))
                except Overflow:
                    skipped += 1
    for q in win:
        if m.mul(q, q) not in win:
            continue
        for a in gp[q]:
            try:
                seeds.append(W.multiply(W.rigid.eta[q], a))
            except Overflow:
                skipped += 1
    ideal = rref(seeds, W.dim, W.field)
    frontier = list(ideal.rows)
    while frontier:
        new = []
        for r in frontier:
            rdeg = W.degrees[next(iter(r))]
            for i in range(W.dim):
                b = {i: one}
                for left, right in ((b, r), (r, b)):
                    try:
                        p = W.multiply(left, right)
                    except Overflow:
                        if m.mul(W.degrees[i], rdeg) in win:
                            skipped += 1
                        continue
                    red = ideal.reduce(p)
                    if red:
                        new.append(red)
        if not new:
            break
        grown = rref(list(ideal.rows) + new, W.dim, W.field)
        if grown.rank == ideal.rank:
            break
        frontier = [ideal.reduce(v) for v in new]
        frontier = [v for v in frontier if v]
        ideal = grown
    if skipped:
        raise Indeterminate(f"{skipped} ideal products leave the Lie truncation; raise lie_cap")
    return _quotient_envelope(W, ideal, "Z")


def _decidable(L: SuspensiveVectorSpace, win: DegreeWindow) -> DegreeWindow:
    keep = [q for q in win if L.knows_degree(L.monoid.mul(q, q))]
    return DegreeWindow(L.monoid, tuple(keep))


def _quotient_envelope(W: TruncatedEnvelope, ideal, kind: str) -> TruncatedEnvelope:
    """The quotient bialgebra W / ideal, with representatives among W's basis."""
    one = W.field.one
    # order W's basis so that preferred representatives come last (non-pivot)
    order = sorted(range(W.dim), key=lambda i: (W.levels[i], W.reps[i][1], W.monoid.sort_key(W.reps[i][0])), reverse=True)
    col = {i: k for k, i in enumerate(order)}
    rows = [{col[i]: c for i, c in r.items()} for r in ideal.rows]
    rel = rref(rows, W.dim, W.field)
    q = quotient_basis(full_space(W.dim, one), rel, order)
    kept = sorted(q.representative_labels, key=lambda i: (W.degrees[i], W.levels[i], W.reps[i][1], W.monoid.sort_key(W.reps[i][0])))
    kept = sorted(kept, key=lambda i: list(W.window).index(W.degrees[i]))
    new_index = {i: k for k, i in enumerate(kept)}

    def project(v: Mapping) -> dict:
        nf = q.normal_form({col[i]: c for i, c in v.items()})
        return canonical({new_index[order[k]]: c for k, c in nf.items()})

    comult = {}
    for k, i in enumerate(kept):
        t: dict = {}
        for (a, b), c in W.comult.get(i, {}).items():
            pa, pb = project({a: one}), project({b: one})
            for x, e in pa.items():
                for y, f in pb.items():
                    tensor_add(t, c * e * f, {(x, y): one})
        comult[k] = t
    counit = {k: W.counit[i] for k, i in enumerate(kept) if W.counit.get(i)}

    def product(a: int, b: int):
        v = W.product_basis(kept[a], kept[b])
        if v is OVERFLOW:
            return OVERFLOW
        return project(v)

    eta = {g: project(v) for g, v in W.rigid.eta.items()}
    rigid = RigidStructure(W.monoid, W.window, eta)
    reps = [W.reps[i] for i in kept]
    Z = TruncatedEnvelope(
        W.source, W.window, W.lie_cap, kind, [W.names[i] for i in kept], [W.degrees[i] for i in kept],
        reps, [W.levels[i] for i in kept], comult, counit, rigid, product,
    )
    Z.parent = W
    Z.project = project
    Z.ideal = ideal
    Z.ideal_dims = {W.monoid.name(g): sum(1 for p in ideal.pivots if W.degrees[p] == g) for g in W.window}
    bad = []
    for r in ideal.rows:
        if W.counit_of(r):
            bad.append("counit")
            break
        t = W.coproduct(r)
        img: dict = {}
        for (a, b), c in t.items():
            for x, e in project({a: one}).items():
                for y, f in project({b: one}).items():
                    tensor_add(img, c * e * f, {(x, y): one})
        if img:
            bad.append("coproduct")
            break
    Z.bi_ideal_ok = not bad
    Z._builder = W._builder
    return Z
