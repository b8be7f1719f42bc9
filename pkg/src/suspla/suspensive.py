"""Monoid-graded vector spaces with a grading-compatible monoid action, and Lie algebras on them."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .linalg import QQ, Field, axpy, canonical, format_scalar, kernel, parse_scalar, rank, vec_scale
from .monoid import DegreeWindow, Monoid, MonoidError

__all__ = [
    "SchemaError",
    "WindowTooSmall",
    "SuspensiveVectorSpace",
    "SuspensiveLieAlgebra",
    "SuspensiveMorphism",
    "CheckReport",
    "TorsionFlags",
    "check_suspensive",
    "torsion_flags",
    "underlying_abelian",
    "zero_lie_algebra",
    "identity_morphism",
]


class SchemaError(ValueError):
    """Input document does not match the expected shape."""


class WindowTooSmall(ValueError):
    """A requested computation needs degrees outside the available data."""


@dataclass
class CheckReport:
    """Outcome of an axiom check; each violation names the axiom and a witness."""

    window: list
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, axiom: str, witness, detail: str = "") -> None:
        self.violations.append({"axiom": axiom, "witness": list(witness), "detail": detail})

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "window": self.window,
            "violations": self.violations,
        }


class SuspensiveVectorSpace:
    """Finite basis, each vector carrying a monoid degree, with a degree-raising action.

    ``action`` maps a monoid element to ``{basis index: sparse vector}``;
    missing basis indices map to zero.  For the free monoid on one
    generator only the generator's action (element ``1``) is stored and
    powers are composed on demand.  ``bound`` marks data that is a
    truncation of a larger object to degrees ``<= bound``.
    """

    def __init__(
        self,
        monoid: Monoid,
        names: Sequence[str],
        degrees: Sequence[int],
        action: Mapping | None = None,
        field: Field = QQ,
        bound: int | None = None,
    ) -> None:
        if len(names) != len(degrees):
            raise SchemaError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise SchemaError("duplicate basis names")
        if bound is not None and monoid.is_finite:
            raise SchemaError("a truncation bound only applies to the free monoid")
        self.monoid = monoid
        self.field = field
        self.names = tuple(names)
        self.degrees = tuple(monoid.check(d) for d in degrees)
        self.bound = bound
        if bound is not None and any(d > bound for d in self.degrees):
            raise SchemaError("basis element above the truncation bound")
        self._index = {n: i for i, n in enumerate(self.names)}
        self.action = {}
        for g, table in (action or {}).items():
            g = monoid.check(g)
            if not monoid.is_finite and g != 1:
                raise SchemaError("for the free monoid only the generator action is stored")
            self.action[g] = {i: canonical(v) for i, v in table.items() if canonical(v)}
        self._power_memo: dict = {}

    # -- bookkeeping -------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown basis element {name!r}") from None

    def indices_in_degree(self, d) -> list:
        return [i for i, e in enumerate(self.degrees) if e == d]

    def dim_in_degree(self, d) -> int:
        return sum(1 for e in self.degrees if e == d)

    def populated_degrees(self) -> list:
        return sorted(set(self.degrees))

    def default_window(self) -> DegreeWindow:
        m = self.monoid
        if m.is_finite:
            return m.enumerate_window()
        if self.bound is not None:
            return m.enumerate_window(self.bound)
        return m.enumerate_window(max(self.degrees, default=0))

    def knows_degree(self, d) -> bool:
        """True when the stored data is complete in degree ``d``."""
        return self.bound is None or d <= self.bound

    def format_vector(self, v: Mapping) -> list:
        return [[self.names[i], format_scalar(c)] for i, c in sorted(canonical(v).items())]

    # -- action ------------------------------------------------------------

    def act_basis(self, g, i: int) -> dict:
        m = self.monoid
        if g == m.one:
            if g in self.action:
                return dict(self.action[g].get(i, {}))
            return {i: self.field.one}
        if m.is_finite:
            if g not in self.action:
                raise SchemaError(f"no action recorded for {m.name(g)}")
            return dict(self.action[g].get(i, {}))
        key = (g, i)
        hit = self._power_memo.get(key)
        if hit is None:
            gen = self.action.get(1, {})
            v = {i: self.field.one}
            for _ in range(g):
                nxt: dict = {}
                for j, c in v.items():
                    axpy(nxt, c, gen.get(j, {}))
                v = canonical(nxt)
                if not v:
                    break
            hit = v
            self._power_memo[key] = hit
        return dict(hit)

    def act(self, g, v: Mapping) -> dict:
        out: dict = {}
        for i, c in v.items():
            axpy(out, c, self.act_basis(g, i))
        return canonical(out)

    def action_generators(self) -> list:
        m = self.monoid
        return list(m.elements()) if m.is_finite else [1]


class SuspensiveLieAlgebra(SuspensiveVectorSpace):
    """A suspensive vector space with a Lie bracket given by structure constants.

    ``bracket`` maps ordered index pairs ``(i, j)`` to sparse vectors;
    missing pairs are zero.
    """

    def __init__(self, monoid, names, degrees, action=None, bracket=None, field=QQ, bound=None):
        super().__init__(monoid, names, degrees, action, field, bound)
        self.bracket_table = {}
        for (i, j), v in (bracket or {}).items():
            v = canonical(v)
            if v:
                self.bracket_table[(i, j)] = v

    def bracket_basis(self, i: int, j: int) -> dict:
        return dict(self.bracket_table.get((i, j), {}))

    def bracket(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                w = self.bracket_table.get((i, j))
                if w:
                    axpy(out, a * b, w)
        return canonical(out)

    def is_abelian(self) -> bool:
        return not self.bracket_table

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        m = self.monoid
        doc = {
            "monoid": m.to_json(),
            "field": self.field.to_json(),
            "basis": [{"name": n, "degree": m.name(d)} for n, d in zip(self.names, self.degrees)],
            "action": {
                m.name(g): {
                    self.names[i]: self.format_vector(v) for i, v in sorted(table.items()) if v
                }
                for g, table in sorted(self.action.items())
            },
            "bracket": {
                f"{self.names[i]}|{self.names[j]}": self.format_vector(v)
                for (i, j), v in sorted(self.bracket_table.items())
                if i < j or (i > j and self.bracket_table.get((j, i)) != vec_scale(-1, v))
            },
        }
        if self.bound is not None:
            doc["window"] = self.bound
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "SuspensiveLieAlgebra":
        if not isinstance(doc, Mapping):
            raise SchemaError("document must be an object")
        try:
            monoid = Monoid.from_json(doc["monoid"])
        except KeyError:
            raise SchemaError("missing 'monoid'") from None
        except (MonoidError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad monoid: {exc}") from exc
        try:
            fld = Field.from_json(doc.get("field", {"kind": "Q"}))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad field: {exc}") from exc
        basis = doc.get("basis")
        if not isinstance(basis, list):
            raise SchemaError("'basis' must be a list")
        names, degrees = [], []
        for entry in basis:
            if not isinstance(entry, Mapping) or "name" not in entry or "degree" not in entry:
                raise SchemaError(f"bad basis entry {entry!r}")
            names.append(str(entry["name"]))
            try:
                degrees.append(monoid.parse(entry["degree"]))
            except (MonoidError, ValueError) as exc:
                raise SchemaError(str(exc)) from exc
        index = {n: i for i, n in enumerate(names)}

        def vec(terms) -> dict:
            if not isinstance(terms, list):
                raise SchemaError(f"expected a list of [name, scalar] pairs, got {terms!r}")
            out: dict = {}
            for t in terms:
                if not isinstance(t, (list, tuple)) or len(t) != 2:
                    raise SchemaError(f"bad term {t!r}")
                name, c = t
                if name not in index:
                    raise SchemaError(f"unknown basis element {name!r}")
                try:
                    s = parse_scalar(c, fld)
                except (ValueError, ZeroDivisionError) as exc:
                    raise SchemaError(f"bad scalar {c!r}") from exc
                axpy(out, s, {index[name]: fld.one})
            return out

        action = {}
        for gname, table in (doc.get("action") or {}).items():
            try:
                g = monoid.parse(gname)
            except (MonoidError, ValueError) as exc:
                raise SchemaError(str(exc)) from exc
            if not isinstance(table, Mapping):
                raise SchemaError("action tables must be objects")
            action[g] = {}
            for src, terms in table.items():
                if src not in index:
                    raise SchemaError(f"unknown basis element {src!r}")
                action[g][index[src]] = vec(terms)
        if monoid.is_finite and names:
            missing = [monoid.names[g] for g in monoid.elements() if g != monoid.one and g not in action]
            if missing:
                raise SchemaError(f"no action given for {', '.join(missing)}")

        bracket = {}
        for key, terms in (doc.get("bracket") or {}).items():
            parts = key.split("|")
            if len(parts) != 2 or parts[0] not in index or parts[1] not in index:
                raise SchemaError(f"bad bracket key {key!r}")
            bracket[(index[parts[0]], index[parts[1]])] = vec(terms)
        for (i, j), v in list(bracket.items()):
            if (j, i) not in bracket:
                bracket[(j, i)] = vec_scale(-1, v)

        bound = doc.get("window")
        if bound is not None and (not isinstance(bound, int) or bound < 0):
            raise SchemaError("'window' must be a nonnegative integer")
        return cls(monoid, names, degrees, action, bracket, fld, bound)


def zero_lie_algebra(monoid: Monoid, field: Field = QQ) -> SuspensiveLieAlgebra:
    return SuspensiveLieAlgebra(monoid, [], [], {}, {}, field)


def underlying_abelian(L: SuspensiveLieAlgebra) -> SuspensiveLieAlgebra:
    """Same grading and action, zero bracket."""
    return SuspensiveLieAlgebra(L.monoid, L.names, L.degrees, L.action, {}, L.field, L.bound)


def _window_for(L: SuspensiveVectorSpace, window) -> DegreeWindow:
    if window is None:
        return L.default_window()
    if isinstance(window, DegreeWindow):
        return window
    return L.monoid.enumerate_window(int(window))


def check_suspensive(L: SuspensiveLieAlgebra, window=None) -> CheckReport:
    """Check every axiom on the window; violations carry witness triples."""
    win = _window_for(L, window)
    m = L.monoid
    report = CheckReport(win.to_json())

    def in_win(d) -> bool:
        return d in win and L.knows_degree(d)

    gens = L.action_generators()
    for g in gens:
        for i in range(L.dim):
            h = L.degrees[i]
            if h not in win:
                continue
            img = L.act_basis(g, i)
            target = m.mul(g, h)
            bad = [j for j in img if L.degrees[j] != target]
            if bad:
                report.add("action_grading", [m.name(g), L.names[i], L.names[bad[0]]],
                           f"expected degree {m.name(target)}")
    if m.one in L.action:
        for i in range(L.dim):
            if L.act_basis(m.one, i) != {i: L.field.one}:
                report.add("action_unital", [m.name(m.one), L.names[i]], "identity does not act trivially")
    if m.is_finite:
        for g, h in itertools.product(m.elements(), repeat=2):
            for i in range(L.dim):
                lhs = L.act(g, L.act_basis(h, i))
                rhs = L.act_basis(m.mul(g, h), i)
                if lhs != rhs:
                    report.add("action_associative", [m.name(g), m.name(h), L.names[i]])

    for (i, j), v in sorted(L.bracket_table.items()):
        target = m.mul(L.degrees[i], L.degrees[j])
        bad = [k for k in v if L.degrees[k] != target]
        if bad:
            report.add("graded_bracket", [L.names[i], L.names[j], L.names[bad[0]]],
                       f"expected degree {m.name(target)}")

    for i in range(L.dim):
        for j in range(i, L.dim):
            if not in_win(m.mul(L.degrees[i], L.degrees[j])):
                continue
            s = canonical({k: a for k, a in L.bracket_basis(i, j).items()})
            t = L.bracket_basis(j, i)
            if s != canonical(vec_scale(-1, t)):
                report.add("antisymmetry", [L.names[i], L.names[j]])

    for i, j, k in itertools.combinations_with_replacement(range(L.dim), 3):
        d = m.prod([L.degrees[i], L.degrees[j], L.degrees[k]])
        if not in_win(d):
            continue
        for a, b, c in {(i, j, k), (j, k, i), (k, i, j)}:
            x, y, z = {a: L.field.one}, {b: L.field.one}, {c: L.field.one}
            total: dict = {}
            axpy(total, L.field.one, L.bracket(x, L.bracket(y, z)))
            axpy(total, L.field.one, L.bracket(y, L.bracket(z, x)))
            axpy(total, L.field.one, L.bracket(z, L.bracket(x, y)))
            if canonical(total):
                report.add("jacobi", [L.names[a], L.names[b], L.names[c]])
                break

    for g in gens:
        if g == m.one:
            continue
        for i in range(L.dim):
            for j in range(L.dim):
                d = m.mul(g, m.mul(L.degrees[i], L.degrees[j]))
                if not in_win(d):
                    continue
                x, y = {i: L.field.one}, {j: L.field.one}
                mid = L.act(g, L.bracket(x, y))
                left = L.bracket(L.act(g, x), y)
                right = L.bracket(x, L.act(g, y))
                if left != mid or right != mid:
                    report.add("kG_bilinear", [m.name(g), L.names[i], L.names[j]])
    return report


@dataclass
class TorsionFlags:
    torsion_free: bool
    torsion: bool
    window: list
    torsion_witness: dict | None = None
    nontorsion_witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "torsion_free": self.torsion_free,
            "torsion": self.torsion,
            "window": self.window,
            "torsion_witness": self.torsion_witness,
            "nontorsion_witness": self.nontorsion_witness,
        }


def _degree_map_rows(L: SuspensiveVectorSpace, g, src: list, dst: list) -> list:
    """Rows of the matrix of (g . -) : span(src) -> span(dst), one row per target coordinate."""
    pos = {j: k for k, j in enumerate(dst)}
    rows = [dict() for _ in dst]
    for col, i in enumerate(src):
        for j, c in L.act_basis(g, i).items():
            rows[pos[j]][col] = c
    return rows


def torsion_flags(L: SuspensiveVectorSpace, window=None) -> TorsionFlags:
    """Whether (Q . -): L_Q -> L_{Q^2} is injective, resp. zero, for every Q in the window.

    The map is read off the stored data, so it is decidable whenever the
    data is complete in degree Q^2; for truncated data with Q^2 above the
    truncation bound, :class:`WindowTooSmall` is raised.
    """
    win = _window_for(L, window)
    m = L.monoid
    tf, tor = True, True
    tw = nw = None
    for q in win:
        src = L.indices_in_degree(q)
        if not src:
            continue
        q2 = m.mul(q, q)
        if not L.knows_degree(q2):
            raise WindowTooSmall(f"degree {m.name(q2)} lies beyond the stored data")
        dst = L.indices_in_degree(q2)
        rows = _degree_map_rows(L, q, src, dst)
        ker = kernel(rows, len(src), L.field)
        if ker.rank and tw is None:
            vec = {src[k]: c for k, c in ker.rows[0].items()}
            tw = {"degree": m.name(q), "element": L.format_vector(vec)}
        if ker.rank:
            tf = False
        if ker.rank < len(src):
            tor = False
            if nw is None:
                for i in src:
                    if L.act_basis(q, i):
                        nw = {"degree": m.name(q), "element": L.names[i]}
                        break
    return TorsionFlags(tf, tor, win.to_json(), tw, nw)


class SuspensiveMorphism:
    """A degree-preserving linear map given on basis elements."""

    def __init__(self, domain: SuspensiveVectorSpace, codomain: SuspensiveVectorSpace, images: Mapping):
        if domain.monoid != codomain.monoid:
            raise SchemaError("morphism between different monoids")
        self.domain = domain
        self.codomain = codomain
        self.images = {i: canonical(v) for i, v in images.items() if canonical(v)}

    def apply(self, v: Mapping) -> dict:
        out: dict = {}
        for i, c in v.items():
            axpy(out, c, self.images.get(i, {}))
        return canonical(out)

    def compose(self, first: "SuspensiveMorphism") -> "SuspensiveMorphism":
        """``self`` after ``first``."""
        if first.codomain is not self.domain:
            raise SchemaError("morphisms are not composable")
        return SuspensiveMorphism(
            first.domain, self.codomain, {i: self.apply(v) for i, v in first.images.items()}
        )

    def check(self, window=None) -> CheckReport:
        dom, cod = self.domain, self.codomain
        win = _window_for(dom, window)
        m = dom.monoid
        report = CheckReport(win.to_json())
        for i, v in self.images.items():
            bad = [j for j in v if cod.degrees[j] != dom.degrees[i]]
            if bad:
                report.add("degree", [dom.names[i], cod.names[bad[0]]])
        for g in dom.action_generators():
            for i in range(dom.dim):
                if m.mul(g, dom.degrees[i]) not in win or not dom.knows_degree(m.mul(g, dom.degrees[i])):
                    continue
                if self.apply(dom.act_basis(g, i)) != cod.act(g, self.images.get(i, {})):
                    report.add("action", [m.name(g), dom.names[i]])
        if isinstance(dom, SuspensiveLieAlgebra) and isinstance(cod, SuspensiveLieAlgebra):
            for i in range(dom.dim):
                for j in range(dom.dim):
                    d = m.mul(dom.degrees[i], dom.degrees[j])
                    if d not in win or not dom.knows_degree(d):
                        continue
                    lhs = self.apply(dom.bracket_basis(i, j))
                    rhs = cod.bracket(self.images.get(i, {}), self.images.get(j, {}))
                    if lhs != rhs:
                        report.add("bracket", [dom.names[i], dom.names[j]])
        return report

    def rank_in_degree(self, d) -> int:
        src = self.domain.indices_in_degree(d)
        dst = self.codomain.indices_in_degree(d)
        pos = {j: k for k, j in enumerate(dst)}
        rows = [{pos[j]: c for j, c in self.images.get(i, {}).items()} for i in src]
        return rank(rows, len(dst), self.codomain.field)

    def degree_report(self, window=None) -> list:
        win = _window_for(self.domain, window)
        m = self.domain.monoid
        out = []
        for d in win:
            r = self.rank_in_degree(d)
            a = self.domain.dim_in_degree(d)
            b = self.codomain.dim_in_degree(d)
            out.append(
                {"degree": m.name(d), "source_dim": a, "target_dim": b, "rank": r,
                 "injective": r == a, "surjective": r == b}
            )
        return out

    def is_injective(self, window=None) -> bool:
        return all(e["injective"] for e in self.degree_report(window))

    def is_surjective(self, window=None) -> bool:
        return all(e["surjective"] for e in self.degree_report(window))

    def is_isomorphism(self, window=None) -> bool:
        return all(e["injective"] and e["surjective"] for e in self.degree_report(window))


def identity_morphism(L: SuspensiveVectorSpace) -> SuspensiveMorphism:
    return SuspensiveMorphism(L, L, {i: {i: L.field.one} for i in range(L.dim)})
