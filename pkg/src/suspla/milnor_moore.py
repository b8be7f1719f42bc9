"""The adjunction between suspensive Lie algebras and rigid bialgebras, and its equivalence checks."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Mapping

from .bialgebra import (
    GPLieAlgebra,
    Overflow,
    PresentedBialgebra,
    RigidStructure,
    gp_basis,
    gp_lie,
    is_gpg,
    is_left_sided,
    tensor_add,
)
from .enveloping import NonTorsionInput, TruncatedEnvelope, build_W, build_Z, canonical_inclusion
from .linalg import axpy, canonical, kernel, rank
from .monoid import DegreeWindow
from .suspensive import (
    CheckReport,
    SuspensiveLieAlgebra,
    SuspensiveMorphism,
    torsion_flags,
)

__all__ = [
    "PreconditionFailed",
    "NotTorsionFree",
    "NotCharacteristicZero",
    "NonLinearMonoid",
    "NonTorsionInput",
    "BialgebraMorphism",
    "MMReport",
    "unit_map",
    "extend_lie_map",
    "restrict_to_primitives",
    "counit_map",
    "envelope_projection",
    "verify_mm_torsion_free",
    "verify_mm_left_sided",
    "check_gp_injectivity_criterion",
    "equivariant_endomorphisms",
    "sample_lie_endomorphisms",
    "same_lie_map",
]


class PreconditionFailed(ValueError):
    """An input outside the hypotheses of a check; ``witness`` says why."""

    def __init__(self, message: str, witness=None) -> None:
        super().__init__(message)
        self.witness = witness


class NotTorsionFree(PreconditionFailed):
    pass


class NotCharacteristicZero(PreconditionFailed):
    pass


class NonLinearMonoid(PreconditionFailed):
    pass


class BialgebraMorphism:
    """A linear map between presented bialgebras, given on basis elements.

    ``domain_rigid`` and ``codomain_rigid`` are the rigid unit maps the
    morphism must intertwine.
    """

    def __init__(
        self,
        domain: PresentedBialgebra,
        codomain: PresentedBialgebra,
        images: Mapping,
        domain_rigid: RigidStructure,
        codomain_rigid: RigidStructure,
    ) -> None:
        self.domain = domain
        self.codomain = codomain
        self.images = {i: canonical(v) for i, v in images.items() if canonical(v)}
        self.domain_rigid = domain_rigid
        self.codomain_rigid = codomain_rigid

    def apply(self, v: Mapping) -> dict:
        out: dict = {}
        for i, c in v.items():
            axpy(out, c, self.images.get(i, {}))
        return canonical(out)

    def apply_tensor(self, t: Mapping) -> dict:
        out: dict = {}
        for (i, j), c in t.items():
            a, b = self.images.get(i), self.images.get(j)
            if a and b:
                tensor_add(out, c, self.codomain.simple_tensor(a, b))
        return out

    def matrix(self, d) -> list:
        """Rows are images of the domain block of degree ``d`` in codomain block coordinates."""
        dst = self.codomain.block(d)
        pos = {j: k for k, j in enumerate(dst)}
        return [{pos[j]: c for j, c in self.images.get(i, {}).items()} for i in self.domain.block(d)]

    def degrees(self) -> list:
        return list(self.domain_rigid.window)

    def degree_report(self) -> list:
        m = self.domain_rigid.monoid
        out = []
        for d in self.degrees():
            r = rank(self.matrix(d), len(self.codomain.block(d)), self.codomain.field)
            a, b = len(self.domain.block(d)), len(self.codomain.block(d))
            out.append({"degree": m.name(d), "source_dim": a, "target_dim": b, "rank": r,
                        "injective": r == a, "surjective": r == b})
        return out

    def is_injective(self) -> bool:
        return all(e["injective"] for e in self.degree_report())

    def is_surjective(self) -> bool:
        return all(e["surjective"] for e in self.degree_report())

    def is_isomorphism(self) -> bool:
        return all(e["injective"] and e["surjective"] for e in self.degree_report())

    def level_report(self) -> list:
        """Bijectivity on each filtration stage, when both sides carry Lie levels."""
        A, B = self.domain, self.codomain
        if not (isinstance(A, TruncatedEnvelope) and isinstance(B, TruncatedEnvelope)):
            return []
        out = []
        for n in range(min(A.lie_cap, B.lie_cap) + 1):
            src = [i for i in range(A.dim) if A.levels[i] <= n]
            tgt = B.filtration_subspace(n)
            inside = all(tgt.contains(self.images.get(i, {})) for i in src)
            r = rank([self.images.get(i, {}) for i in src], B.dim, B.field)
            out.append({"level": n, "source_dim": len(src), "target_dim": tgt.rank,
                        "rank": r, "preserves_filtration": inside})
        return out

    def check(self) -> CheckReport:
        """Unital, counital, degree-preserving, rigid, comultiplicative and in-window multiplicative."""
        A, B = self.domain, self.codomain
        m = self.domain_rigid.monoid
        report = CheckReport(self.domain_rigid.window.to_json())
        if self.apply(A.unit) != B.unit:
            report.add("unital", [], "unit is not preserved")
        for i in range(A.dim):
            img = self.images.get(i, {})
            if B.counit_of(img) != A.field.one * A.counit.get(i, 0):
                report.add("counital", [A.names[i]])
            if A.is_graded and B.is_graded and img and B.vector_degree(img) != A.degrees[i]:
                report.add("degree", [A.names[i]])
            if self.apply_tensor(A.comult.get(i, {})) != B.coproduct(img):
                report.add("comultiplicative", [A.names[i]])
        for g in self.domain_rigid.window:
            if g in self.codomain_rigid.eta and self.apply(self.domain_rigid.eta[g]) != self.codomain_rigid.eta[g]:
                report.add("rigid", [m.name(g)])
        skipped = 0
        for i, j in itertools.product(range(A.dim), repeat=2):
            try:
                lhs = self.apply(A.multiply({i: A.field.one}, {j: A.field.one}))
                rhs = B.multiply(self.images.get(i, {}), self.images.get(j, {}))
            except Overflow:
                skipped += 1
                continue
            if lhs != rhs:
                report.add("multiplicative", [A.names[i], A.names[j]])
        report.skipped = skipped
        return report

    def same_as(self, other: "BialgebraMorphism") -> bool:
        return all(self.images.get(i, {}) == other.images.get(i, {}) for i in range(self.domain.dim))


@dataclass
class MMReport:
    """Outcome of an equivalence check on one fixture, with the truncation it covers."""

    kind: str
    verdict: bool
    window: list
    lie_cap: int
    per_degree_dims: dict = dc_field(default_factory=dict)
    witnesses: list = dc_field(default_factory=list)
    seed: int | None = None

    def __bool__(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": "pass" if self.verdict else "fail",
            "window": self.window,
            "lie_cap": self.lie_cap,
            "per_degree_dims": self.per_degree_dims,
            "witnesses": self.witnesses,
            "seed": self.seed,
        }


# -- the adjunction ---------------------------------------------------------------


def _into_gp(P: GPLieAlgebra, x: Mapping, Q) -> dict:
    if not x:
        return {}
    return P.coordinates(x, Q)


def unit_map(L: SuspensiveLieAlgebra, W: TruncatedEnvelope, P: GPLieAlgebra | None = None) -> SuspensiveMorphism:
    """L into the generalized primitives of W(L), in gp coordinates."""
    if P is None:
        P = gp_lie(W, W.rigid, W.window)
    inc = canonical_inclusion(L, W)
    images = {i: _into_gp(P, v, L.degrees[i]) for i, v in inc.images.items()}
    return SuspensiveMorphism(L, P, images)


def extend_lie_map(f: SuspensiveMorphism, W: TruncatedEnvelope | None = None, lie_cap: int | None = None) -> BialgebraMorphism:
    """The bialgebra map out of W(L) sending (g, l1...ln) to eta(g) f(l1)...f(ln)."""
    L, P = f.domain, f.codomain
    if not isinstance(P, GPLieAlgebra):
        raise TypeError("the codomain must be the generalized primitives of a bialgebra")
    A, rigid = P.ambient, P.rigid
    if W is None:
        W = build_W(L, P.window, lie_cap)
    if W.source is not L:
        raise ValueError("envelope was built from a different Lie algebra")
    lifted = {i: P.embed(f.images.get(i, {})) for i in range(L.dim)}
    images = {}
    for k, (g, word) in enumerate(W.reps):
        try:
            images[k] = A.multiply_many([rigid.of(g)] + [lifted[i] for i in word])
        except Overflow:
            raise Overflow(f"image of {W.names[k]} needs a product outside the target truncation") from None
    return BialgebraMorphism(W, A, images, W.rigid, rigid)


def restrict_to_primitives(h: BialgebraMorphism, P: GPLieAlgebra | None = None) -> SuspensiveMorphism:
    """The Lie map L -> GP(A) obtained by restricting h: W(L) -> A along L -> W(L)."""
    W = h.domain
    if not isinstance(W, TruncatedEnvelope) or W.kind != "W":
        raise TypeError("restriction needs a morphism out of an envelope W(L)")
    L = W.source
    if P is None:
        P = gp_lie(h.codomain, h.codomain_rigid, W.window)
    inc = canonical_inclusion(L, W)
    images = {i: _into_gp(P, h.apply(v), L.degrees[i]) for i, v in inc.images.items()}
    return SuspensiveMorphism(L, P, images)


def same_lie_map(f: SuspensiveMorphism, g: SuspensiveMorphism) -> bool:
    """Equality of two maps into generalized primitives, compared in the ambient bialgebra."""
    if f.domain is not g.domain:
        return False
    P, R = f.codomain, g.codomain
    for i in range(f.domain.dim):
        a = P.embed(f.images.get(i, {})) if isinstance(P, GPLieAlgebra) else f.images.get(i, {})
        b = R.embed(g.images.get(i, {})) if isinstance(R, GPLieAlgebra) else g.images.get(i, {})
        if a != b:
            return False
    return True


def counit_map(A: PresentedBialgebra, rigid: RigidStructure, window=None, lie_cap: int | None = None) -> BialgebraMorphism:
    """The natural map W(GP(A)) -> A."""
    P = gp_lie(A, rigid, window)
    if lie_cap is None and isinstance(A, TruncatedEnvelope):
        lie_cap = A.lie_cap
    W = build_W(P, P.window, lie_cap)
    ident = SuspensiveMorphism(P, P, {i: {i: A.field.one} for i in range(P.dim)})
    return extend_lie_map(ident, W)


def envelope_projection(W: TruncatedEnvelope, Z: TruncatedEnvelope) -> BialgebraMorphism:
    """The quotient map W(L) -> Z(L)."""
    return BialgebraMorphism(W, Z, {i: Z.project({i: W.field.one}) for i in range(W.dim)}, W.rigid, Z.rigid)


# -- equivalence checks -----------------------------------------------------------


def _require_char_zero(L: SuspensiveLieAlgebra) -> None:
    if L.field.characteristic != 0:
        raise NotCharacteristicZero(f"the field has characteristic {L.field.characteristic}")


def _describe_element(L: SuspensiveLieAlgebra, witness: dict) -> str:
    terms = witness["element"]
    if len(terms) == 1 and str(terms[0][1]) == "1":
        text = terms[0][0]
    else:
        text = " + ".join(f"{c}*{n}" for n, c in terms)
    return f"torsion element {text} in degree {witness['degree']}"


def verify_mm_torsion_free(L: SuspensiveLieAlgebra, window=None, lie_cap: int | None = None, seed: int | None = None) -> MMReport:
    """Unit map L -> GP(W L) and counit map W(GP(W L)) -> W L are isomorphisms on the truncation."""
    _require_char_zero(L)
    W = build_W(L, window, lie_cap)
    win = W.window
    m = L.monoid
    decidable = DegreeWindow(m, tuple(q for q in win if L.knows_degree(m.mul(q, q))))
    flags = torsion_flags(L, decidable)
    if not flags.torsion_free:
        raise NotTorsionFree(_describe_element(L, flags.torsion_witness), flags.torsion_witness)
    P = gp_lie(W, W.rigid, win)
    u = unit_map(L, W, P)
    c = extend_lie_map(SuspensiveMorphism(P, P, {i: {i: L.field.one} for i in range(P.dim)}), build_W(P, win, W.lie_cap, validate=False))
    report = MMReport("torsion_free", True, win.to_json(), W.lie_cap, seed=seed)
    counit_rows = {e["degree"]: e for e in c.degree_report()}
    for e in u.degree_report(win):
        ce = counit_rows[e["degree"]]
        report.per_degree_dims[e["degree"]] = {
            "L": e["source_dim"], "GP": e["target_dim"], "unit_rank": e["rank"],
            "W": ce["target_dim"], "W_GP": ce["source_dim"], "counit_rank": ce["rank"],
        }
        if not (e["injective"] and e["surjective"]):
            report.verdict = False
            report.witnesses.append({"map": "unit", **e})
        if not (ce["injective"] and ce["surjective"]):
            report.verdict = False
            report.witnesses.append({"map": "counit", **ce})
    for e in c.level_report():
        if e["rank"] != e["target_dim"] or e["source_dim"] != e["rank"] or not e["preserves_filtration"]:
            report.verdict = False
            report.witnesses.append({"map": "counit", **e})
    return report


def verify_mm_left_sided(L: SuspensiveLieAlgebra, window=None, lie_cap: int | None = None, seed: int | None = None) -> MMReport:
    """Z(L) is left-sided and gpg, and L -> GP(Z L) is an isomorphism on the truncation."""
    _require_char_zero(L)
    m = L.monoid
    if not m.is_linear():
        a, b = _incomparable_pair(m)
        raise NonLinearMonoid(f"{m.name(a)} and {m.name(b)} do not divide each other",
                              {"Q": m.name(a), "Q'": m.name(b)})
    W = build_W(L, window, lie_cap)
    win = W.window
    decidable = DegreeWindow(m, tuple(q for q in win if L.knows_degree(m.mul(q, q))))
    flags = torsion_flags(L, decidable)
    if not flags.torsion:
        w = flags.nontorsion_witness
        raise NonTorsionInput(f"element {w['element']} in degree {w['degree']} is not torsion")
    Z = build_Z(L, win, W.lie_cap, W=W)
    report = MMReport("left_sided", True, win.to_json(), W.lie_cap, seed=seed)
    ls = is_left_sided(Z, Z.rigid)
    gpg = is_gpg(Z, Z.rigid)
    if not ls:
        report.verdict = False
        report.witnesses.append({"property": "left_sided", "witness": ls.witness})
    if not gpg:
        report.verdict = False
        report.witnesses.append({"property": "gpg", "witness": gpg.witness})
    if not Z.bi_ideal_ok:
        report.verdict = False
        report.witnesses.append({"property": "bi_ideal", "witness": None})
    P = gp_lie(Z, Z.rigid, win)
    inc = canonical_inclusion(L, W)
    u = SuspensiveMorphism(L, P, {i: _into_gp(P, Z.project(v), L.degrees[i]) for i, v in inc.images.items()})
    for e in u.degree_report(win):
        report.per_degree_dims[e["degree"]] = {
            "L": e["source_dim"], "GP": e["target_dim"], "rank": e["rank"],
            "W": len(W.block(m.parse(e["degree"]))), "Z": len(Z.block(m.parse(e["degree"]))),
        }
        if not (e["injective"] and e["surjective"]):
            report.verdict = False
            report.witnesses.append({"map": "unit", **e})
    return report


def _incomparable_pair(m) -> tuple:
    for a, b in itertools.combinations(list(m.elements()), 2):
        if not m.divides(a, b) and not m.divides(b, a):
            return a, b
    raise AssertionError("monoid is linear")


@dataclass
class InjectivityReport:
    agree: bool
    map_injective: bool
    gp_injective: bool
    domain_gpg: bool
    per_degree: list

    def __bool__(self) -> bool:
        return self.agree

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.agree else "fail",
            "map_injective": self.map_injective,
            "gp_injective": self.gp_injective,
            "domain_gpg": self.domain_gpg,
            "per_degree": self.per_degree,
        }


def check_gp_injectivity_criterion(h: BialgebraMorphism) -> InjectivityReport:
    """Compare injectivity of h with injectivity of its restriction to generalized primitives."""
    A, B = h.domain, h.codomain
    gpg = is_gpg(A, h.domain_rigid)
    if not gpg:
        raise PreconditionFailed("domain is not generated by grouplikes and generalized primitives", gpg.witness)
    m = h.domain_rigid.monoid
    per = []
    gp_inj = True
    for e in h.degree_report():
        Q = m.parse(e["degree"])
        prim = gp_basis(A, h.domain_rigid, Q).rows
        images = [h.apply(x) for x in prim]
        r = rank(images, B.dim, B.field)
        ok = r == len(prim)
        gp_inj = gp_inj and ok
        per.append({**e, "gp_dim": len(prim), "gp_rank": r, "gp_injective": ok})
    map_inj = all(e["injective"] for e in per)
    return InjectivityReport(map_inj == gp_inj, map_inj, gp_inj, True, per)


# -- sampling Lie maps ------------------------------------------------------------


def equivariant_endomorphisms(L: SuspensiveLieAlgebra, window=None) -> list:
    """A basis of the degree-preserving linear maps L -> L commuting with the action.

    Each map is returned as ``{i: image vector}``.
    """
    win = L.default_window() if window is None else window
    m = L.monoid
    unknowns = []
    for d in L.populated_degrees():
        idx = L.indices_in_degree(d)
        unknowns.extend((i, j) for i in idx for j in idx)
    pos = {u: k for k, u in enumerate(unknowns)}
    eqs = []
    for g in L.action_generators():
        for i in range(L.dim):
            target = m.mul(g, L.degrees[i])
            if target not in win or not L.knows_degree(target):
                continue
            # f(g.e_i) - g.f(e_i) = 0, coordinate by coordinate
            rows: dict = {}
            for j, c in L.act_basis(g, i).items():
                for k in L.indices_in_degree(target):
                    axpy(rows.setdefault(k, {}), c, {pos[(j, k)]: L.field.one})
            for j in L.indices_in_degree(L.degrees[i]):
                for k, c in L.act_basis(g, j).items():
                    axpy(rows.setdefault(k, {}), -c, {pos[(i, j)]: L.field.one})
            eqs.extend(r for r in rows.values() if canonical(r))
    ker = kernel(eqs, len(unknowns), L.field)
    out = []
    for row in ker.rows:
        f: dict = {}
        for u, c in row.items():
            i, j = unknowns[u]
            f.setdefault(i, {})[j] = c
        out.append(f)
    return out


def _is_lie_map(L: SuspensiveLieAlgebra, f: dict, win) -> bool:
    m = L.monoid

    def ap(v):
        out: dict = {}
        for i, c in v.items():
            axpy(out, c, f.get(i, {}))
        return canonical(out)

    for i, j in itertools.product(range(L.dim), repeat=2):
        d = m.mul(L.degrees[i], L.degrees[j])
        if d not in win or not L.knows_degree(d):
            continue
        if ap(L.bracket_basis(i, j)) != L.bracket(f.get(i, {}), f.get(j, {})):
            return False
    return True


def sample_lie_endomorphisms(L: SuspensiveLieAlgebra, rng: random.Random, count: int, window=None, tries: int = 40) -> list:
    """Random Lie endomorphisms of L; always includes zero and the identity."""
    win = L.default_window() if window is None else window
    one = L.field.one
    found = [{}, {i: {i: one} for i in range(L.dim)}]
    basis = equivariant_endomorphisms(L, win)
    attempts = 0
    while len(found) < count and basis and attempts < tries:
        attempts += 1
        f: dict = {}
        for b in basis:
            c = rng.choice([-1, 0, 1, 2])
            if not c:
                continue
            for i, v in b.items():
                axpy(f.setdefault(i, {}), one * c, v)
        f = {i: canonical(v) for i, v in f.items() if canonical(v)}
        if _is_lie_map(L, f, win):
            found.append(f)
    return found[:count]
