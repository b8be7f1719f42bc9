"""Bialgebras presented by structure constants, rigid unit maps and generalized primitives."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Callable, Mapping, Sequence

from .linalg import (
    QQ,
    Field,
    NotSubspace,
    Subspace,
    axpy,
    canonical,
    format_scalar,
    kernel,
    parse_scalar,
    rref,
)
from .monoid import DegreeWindow, Monoid, MonoidError
from .suspensive import CheckReport, SchemaError, SuspensiveLieAlgebra, WindowTooSmall, torsion_flags

__all__ = [
    "Overflow",
    "Indeterminate",
    "NotClosedUnderBracket",
    "OVERFLOW",
    "Verdict",
    "PresentedBialgebra",
    "RigidStructure",
    "GPLieAlgebra",
    "check_bialgebra",
    "is_cocommutative",
    "gp_basis",
    "check_pgc",
    "gp_lie",
    "is_gpg",
    "is_left_sided",
    "is_torsion_free_bialgebra",
    "decidable_torsion_window",
    "s_n",
    "delta_difference",
    "grouplikes_of_dual_cyclic_group_algebra",
    "group_algebra",
    "dual_cyclic_group_algebra",
    "tensor_add",
    "format_tensor",
]


class Overflow(ArithmeticError):
    """A product whose value lies outside the stored truncation."""


class Indeterminate(RuntimeError):
    """A check could not be decided because needed products overflow."""


class NotClosedUnderBracket(ValueError):
    """Generalized primitives are not closed under the commutator."""


class _OverflowMarker:
    def __repr__(self) -> str:
        return "OVERFLOW"


OVERFLOW = _OverflowMarker()


@dataclass
class Verdict:
    """A boolean outcome with an optional witness and the number of skipped cases."""

    value: bool
    witness: object = None
    skipped: int = 0
    window: list = dc_field(default_factory=list)

    def __bool__(self) -> bool:
        return self.value

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.value else "fail",
            "witness": self.witness,
            "skipped": self.skipped,
            "window": self.window,
        }


def tensor_add(dst: dict, c, src: Mapping) -> dict:
    for k, a in src.items():
        v = dst.get(k)
        v = a * c if v is None else v + a * c
        if v:
            dst[k] = v
        else:
            dst.pop(k, None)
    return dst


class PresentedBialgebra:
    """A bialgebra on a finite basis given by structure constants.

    ``mult`` maps ``(i, j)`` to a sparse vector or :data:`OVERFLOW`;
    absent pairs multiply to zero.  A callable ``mult_fn(i, j)`` may be
    given instead for tables computed on demand.  ``comult`` maps each
    index to ``{(j, k): scalar}``.  ``degrees`` (optional) are monoid
    elements.
    """

    def __init__(
        self,
        field: Field,
        names: Sequence[str],
        mult: Mapping | None,
        comult: Mapping,
        unit: Mapping,
        counit: Mapping,
        degrees: Sequence | None = None,
        monoid: Monoid | None = None,
        mult_fn: Callable | None = None,
    ) -> None:
        if len(set(names)) != len(names):
            raise SchemaError("duplicate basis names")
        if degrees is not None and len(degrees) != len(names):
            raise SchemaError("degrees and names differ in length")
        self.field = field
        self.names = tuple(names)
        self._index = {n: i for i, n in enumerate(self.names)}
        self._mult = dict(mult or {})
        self._mult_fn = mult_fn
        self.comult = {i: {k: c for k, c in t.items() if c} for i, t in comult.items()}
        self.unit = canonical(unit)
        self.counit = {i: c for i, c in counit.items() if c}
        self.degrees = tuple(degrees) if degrees is not None else None
        self.monoid = monoid

    # -- basics --------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def is_graded(self) -> bool:
        return self.degrees is not None

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown basis element {name!r}") from None

    def basis_vector(self, i: int) -> dict:
        return {i: self.field.one}

    def block(self, d) -> list:
        if self.degrees is None:
            return list(range(self.dim))
        return [i for i, e in enumerate(self.degrees) if e == d]

    def vector_degree(self, v: Mapping):
        if self.degrees is None:
            return None
        ds = {self.degrees[i] for i in v}
        return ds.pop() if len(ds) == 1 else None

    def product_basis(self, i: int, j: int):
        key = (i, j)
        if key in self._mult:
            return self._mult[key]
        if self._mult_fn is not None:
            val = self._mult_fn(i, j)
            val = val if val is OVERFLOW else canonical(val)
            self._mult[key] = val
            return val
        return {}

    def product_defined(self, i: int, j: int) -> bool:
        return self.product_basis(i, j) is not OVERFLOW

    def multiply(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                w = self.product_basis(i, j)
                if w is OVERFLOW:
                    raise Overflow(f"{self.names[i]} * {self.names[j]} leaves the truncation")
                axpy(out, a * b, w)
        return canonical(out)

    def multiply_many(self, vectors: Sequence[Mapping]) -> dict:
        out = dict(self.unit)
        for v in vectors:
            out = self.multiply(out, v)
        return out

    def coproduct(self, u: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            tensor_add(out, a, self.comult.get(i, {}))
        return out

    def counit_of(self, u: Mapping):
        total = self.field.zero
        for i, a in u.items():
            c = self.counit.get(i)
            if c:
                total = total + a * c
        return total

    def tensor_multiply(self, s: Mapping, t: Mapping) -> dict:
        out: dict = {}
        for (a, b), c in s.items():
            for (x, y), d in t.items():
                left = self.product_basis(a, x)
                right = self.product_basis(b, y)
                if left is OVERFLOW or right is OVERFLOW:
                    raise Overflow("tensor product leaves the truncation")
                for i, p in left.items():
                    for j, q in right.items():
                        tensor_add(out, c * d * p * q, {(i, j): self.field.one})
        return out

    def simple_tensor(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                tensor_add(out, a * b, {(i, j): self.field.one})
        return out

    def materialize(self) -> dict:
        """Full multiplication table (computing lazily defined entries)."""
        for i in range(self.dim):
            for j in range(self.dim):
                self.product_basis(i, j)
        return {k: v for k, v in self._mult.items() if v is OVERFLOW or v}

    def format_vector(self, v: Mapping) -> list:
        return [[self.names[i], format_scalar(c)] for i, c in sorted(canonical(v).items())]

    # -- serialization -------------------------------------------------------

    def to_json(self, rigid: "RigidStructure | None" = None) -> dict:
        table = self.materialize()
        doc = {
            "field": self.field.to_json(),
            "basis": [
                {"name": n} if self.degrees is None else {"name": n, "degree": self.monoid.name(d)}
                for n, d in zip(self.names, self.degrees or [None] * self.dim)
            ],
            "unit": self.format_vector(self.unit),
            "counit": {self.names[i]: format_scalar(c) for i, c in sorted(self.counit.items())},
            "mult": {
                f"{self.names[i]}|{self.names[j]}": "overflow" if v is OVERFLOW else self.format_vector(v)
                for (i, j), v in sorted(table.items())
            },
            "comult": {
                self.names[i]: [
                    [self.names[a], self.names[b], format_scalar(c)] for (a, b), c in sorted(t.items())
                ]
                for i, t in sorted(self.comult.items())
                if t
            },
        }
        if rigid is not None:
            doc["rigid"] = rigid.to_json(self)
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> tuple:
        """Parse a document; returns ``(bialgebra, rigid or None)``."""
        if not isinstance(doc, Mapping):
            raise SchemaError("document must be an object")
        try:
            fld = Field.from_json(doc.get("field", {"kind": "Q"}))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad field: {exc}") from exc
        rigid_doc = doc.get("rigid")
        monoid = None
        if rigid_doc is not None:
            try:
                monoid = Monoid.from_json(rigid_doc["monoid"])
            except (KeyError, MonoidError, TypeError) as exc:
                raise SchemaError(f"bad rigid monoid: {exc}") from exc
        basis = doc.get("basis")
        if not isinstance(basis, list) or not basis:
            raise SchemaError("'basis' must be a nonempty list")
        names = []
        degrees = []
        for entry in basis:
            if not isinstance(entry, Mapping) or "name" not in entry:
                raise SchemaError(f"bad basis entry {entry!r}")
            names.append(str(entry["name"]))
            if "degree" in entry:
                if monoid is None:
                    raise SchemaError("degrees need a rigid monoid")
                try:
                    degrees.append(monoid.parse(entry["degree"]))
                except (MonoidError, ValueError) as exc:
                    raise SchemaError(str(exc)) from exc
        if degrees and len(degrees) != len(names):
            raise SchemaError("either every basis element has a degree or none does")
        index = {n: i for i, n in enumerate(names)}

        def scalar(c):
            try:
                return parse_scalar(c, fld)
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                raise SchemaError(f"bad scalar {c!r}") from exc

        def vec(terms) -> dict:
            if isinstance(terms, str):
                if terms not in index:
                    raise SchemaError(f"unknown basis element {terms!r}")
                return {index[terms]: fld.one}
            if not isinstance(terms, list):
                raise SchemaError(f"bad vector {terms!r}")
            out: dict = {}
            for t in terms:
                if not isinstance(t, (list, tuple)) or len(t) != 2 or t[0] not in index:
                    raise SchemaError(f"bad term {t!r}")
                axpy(out, scalar(t[1]), {index[t[0]]: fld.one})
            return out

        if "unit" not in doc or "comult" not in doc or "counit" not in doc:
            raise SchemaError("missing unit, counit or comult")
        unit = vec(doc["unit"])
        counit = {}
        for n, c in (doc.get("counit") or {}).items():
            if n not in index:
                raise SchemaError(f"unknown basis element {n!r}")
            counit[index[n]] = scalar(c)
        mult = {}
        for key, terms in (doc.get("mult") or {}).items():
            parts = key.split("|")
            if len(parts) != 2 or parts[0] not in index or parts[1] not in index:
                raise SchemaError(f"bad mult key {key!r}")
            mult[(index[parts[0]], index[parts[1]])] = OVERFLOW if terms == "overflow" else vec(terms)
        comult = {}
        for n, terms in (doc.get("comult") or {}).items():
            if n not in index or not isinstance(terms, list):
                raise SchemaError(f"bad comult entry {n!r}")
            t: dict = {}
            for e in terms:
                if not isinstance(e, (list, tuple)) or len(e) != 3 or e[0] not in index or e[1] not in index:
                    raise SchemaError(f"bad comult term {e!r}")
                tensor_add(t, scalar(e[2]), {(index[e[0]], index[e[1]]): fld.one})
            comult[index[n]] = t
        A = cls(fld, names, mult, comult, unit, counit, degrees or None, monoid)
        rigid = None
        if rigid_doc is not None:
            eta = {}
            for gname, target in (rigid_doc.get("eta") or {}).items():
                try:
                    g = monoid.parse(gname)
                except (MonoidError, ValueError) as exc:
                    raise SchemaError(str(exc)) from exc
                eta[g] = vec(target)
            try:
                window = DegreeWindow(monoid, tuple(eta))
            except ValueError as exc:
                raise SchemaError(f"rigid unit map domain: {exc}") from exc
            rigid = RigidStructure(monoid, window, eta)
        return A, rigid


@dataclass
class RigidStructure:
    """The rigid unit map: window elements of a monoid to grouplike vectors."""

    monoid: Monoid
    window: DegreeWindow
    eta: dict

    def __post_init__(self) -> None:
        missing = [g for g in self.window if g not in self.eta]
        if missing:
            raise SchemaError(f"rigid unit map undefined on {self.monoid.name(missing[0])}")

    def of(self, g) -> dict:
        try:
            return dict(self.eta[g])
        except KeyError:
            raise WindowTooSmall(f"{self.monoid.name(g)} is outside the window") from None

    def to_json(self, A: PresentedBialgebra) -> dict:
        return {
            "monoid": self.monoid.to_json(),
            "eta": {self.monoid.name(g): A.format_vector(v) for g, v in sorted(self.eta.items())},
        }

    def check(self, A: PresentedBialgebra) -> CheckReport:
        m = self.monoid
        report = CheckReport(self.window.to_json())
        one = A.field.one
        for g in self.window:
            x = self.eta[g]
            if A.coproduct(x) != A.simple_tensor(x, x):
                report.add("grouplike", [m.name(g)], "coproduct is not x (x) x")
            if A.counit_of(x) != one:
                report.add("grouplike", [m.name(g)], "counit is not 1")
            if A.is_graded and A.vector_degree(x) != g:
                report.add("degree", [m.name(g)], "image not in its own degree")
        if self.eta.get(m.one) != A.unit:
            report.add("unital", [m.name(m.one)], "identity does not map to the unit")
        for g, h in itertools.product(self.window, repeat=2):
            gh = m.mul(g, h)
            if gh not in self.window:
                continue
            try:
                if A.multiply(self.eta[g], self.eta[h]) != self.eta[gh]:
                    report.add("multiplicative", [m.name(g), m.name(h)])
            except Overflow:
                pass
        for g in self.window:
            x = self.eta[g]
            for i in range(A.dim):
                b = A.basis_vector(i)
                try:
                    if A.multiply(x, b) != A.multiply(b, x):
                        report.add("central", [m.name(g), A.names[i]])
                except Overflow:
                    pass
        vecs = [self.eta[g] for g in self.window]
        if rref(vecs, A.dim, A.field).rank != len(vecs):
            report.add("injective", [], "grouplike images are linearly dependent")
        listed = {tuple(sorted(v.items())) for v in vecs}
        for i in basis_grouplikes(A):
            if tuple(sorted(A.basis_vector(i).items())) not in listed:
                report.add("exhaustive", [A.names[i]], "grouplike basis element not in the image")
        return report


def basis_grouplikes(A: PresentedBialgebra) -> list:
    """Basis elements b with coproduct b (x) b and counit 1."""
    one = A.field.one
    return [
        i
        for i in range(A.dim)
        if A.comult.get(i) == {(i, i): one} and A.counit.get(i) == one
    ]


def check_bialgebra(A: PresentedBialgebra) -> CheckReport:
    """Bialgebra axioms on the stored basis, skipping products that overflow."""
    report = CheckReport([])
    one = A.field.one
    n = A.dim
    report.skipped = 0
    for i in range(n):
        b = A.basis_vector(i)
        d = A.coproduct(b)
        left: dict = {}
        right: dict = {}
        for (x, y), c in d.items():
            axpy(left, c * A.counit.get(x, A.field.zero), {y: one})
            axpy(right, c * A.counit.get(y, A.field.zero), {x: one})
        if canonical(left) != b or canonical(right) != b:
            report.add("counit", [A.names[i]])
        lhs: dict = {}
        rhs: dict = {}
        for (x, y), c in d.items():
            for (u, v), e in A.comult.get(x, {}).items():
                tensor_add(lhs, c * e, {(u, v, y): one})
            for (u, v), e in A.comult.get(y, {}).items():
                tensor_add(rhs, c * e, {(x, u, v): one})
        if lhs != rhs:
            report.add("coassociative", [A.names[i]])
        if A.is_graded:
            g = A.degrees[i]
            if any(A.degrees[x] != g or A.degrees[y] != g for (x, y) in d):
                report.add("diagonal_degree", [A.names[i]])
    u = A.unit
    if A.coproduct(u) != A.simple_tensor(u, u) or A.counit_of(u) != one:
        report.add("unit_grouplike", [])
    skipped = 0
    for i in range(n):
        b = A.basis_vector(i)
        try:
            if A.multiply(u, b) != b or A.multiply(b, u) != b:
                report.add("unital", [A.names[i]])
        except Overflow:
            skipped += 1
    for i, j in itertools.product(range(n), repeat=2):
        if not A.product_defined(i, j):
            skipped += 1
            continue
        x, y = A.basis_vector(i), A.basis_vector(j)
        xy = A.multiply(x, y)
        try:
            if A.coproduct(xy) != A.tensor_multiply(A.coproduct(x), A.coproduct(y)):
                report.add("coproduct_multiplicative", [A.names[i], A.names[j]])
        except Overflow:
            skipped += 1
        if A.counit_of(xy) != A.counit_of(x) * A.counit_of(y):
            report.add("counit_multiplicative", [A.names[i], A.names[j]])
    for i, j, k in itertools.product(range(n), repeat=3):
        x, y, z = A.basis_vector(i), A.basis_vector(j), A.basis_vector(k)
        try:
            if A.multiply(A.multiply(x, y), z) != A.multiply(x, A.multiply(y, z)):
                report.add("associative", [A.names[i], A.names[j], A.names[k]])
        except Overflow:
            skipped += 1
    report.skipped = skipped
    return report


def is_cocommutative(A: PresentedBialgebra) -> bool:
    for i in range(A.dim):
        t = A.comult.get(i, {})
        if {(y, x): c for (x, y), c in t.items()} != t:
            return False
    return True


def _window(rigid: RigidStructure, window) -> DegreeWindow:
    if window is None:
        return rigid.window
    if isinstance(window, DegreeWindow):
        win = window
    else:
        win = rigid.monoid.enumerate_window(int(window))
    for g in win:
        if g not in rigid.eta:
            raise WindowTooSmall(f"{rigid.monoid.name(g)} is outside the rigid window")
    return win


def gp_basis(A: PresentedBialgebra, rigid: RigidStructure, Q) -> Subspace:
    """Canonical basis of the Q-primitives, as vectors in the ambient basis."""
    if Q not in rigid.eta:
        raise WindowTooSmall(f"{rigid.monoid.name(Q)} is outside the window")
    q = rigid.eta[Q]
    cols = A.block(Q)
    images = []
    for i in cols:
        b = A.basis_vector(i)
        t = dict(A.coproduct(b))
        tensor_add(t, -A.field.one, A.simple_tensor(b, q))
        tensor_add(t, -A.field.one, A.simple_tensor(q, b))
        images.append(t)
    keys = sorted(set().union(*images)) if images else []
    pos = {k: r for r, k in enumerate(keys)}
    rows = [dict() for _ in keys]
    for c, t in enumerate(images):
        for k, a in t.items():
            rows[pos[k]][c] = a
    ker = kernel(rows, len(cols), A.field)
    vectors = [{cols[c]: a for c, a in r.items()} for r in ker.rows]
    return rref(vectors, A.dim, A.field)


def check_pgc(A: PresentedBialgebra, rigid: RigidStructure, window=None) -> Verdict:
    """Primitive-grouplike compatibility on all pairs of primitives in the window."""
    win = _window(rigid, window)
    m = rigid.monoid
    bases = {q: gp_basis(A, rigid, q) for q in win}
    skipped = 0
    for Q, Q2 in itertools.product(win, repeat=2):
        if A.is_graded and m.mul(Q, Q2) not in win:
            continue
        q, q2 = rigid.eta[Q], rigid.eta[Q2]
        for a in bases[Q].rows:
            for b in bases[Q2].rows:
                try:
                    t: dict = {}
                    one = A.field.one
                    tensor_add(t, one, A.simple_tensor(A.multiply(a, q2), A.multiply(q, b)))
                    tensor_add(t, one, A.simple_tensor(A.multiply(q, b), A.multiply(a, q2)))
                    tensor_add(t, -one, A.simple_tensor(A.multiply(b, q), A.multiply(q2, a)))
                    tensor_add(t, -one, A.simple_tensor(A.multiply(q2, a), A.multiply(b, q)))
                except Overflow:
                    skipped += 1
                    continue
                if t:
                    witness = {
                        "Q": m.name(Q),
                        "Q'": m.name(Q2),
                        "a": A.format_vector(a),
                        "a'": A.format_vector(b),
                    }
                    return Verdict(False, witness, skipped, win.to_json())
    if skipped:
        raise Indeterminate(f"{skipped} compatibility cases need products outside the truncation")
    return Verdict(True, None, 0, win.to_json())


class GPLieAlgebra(SuspensiveLieAlgebra):
    """The generalized primitives of a rigid bialgebra as a suspensive Lie algebra.

    ``vectors[k]`` is basis element ``k`` written in the ambient basis.
    """

    def __init__(self, ambient, rigid, window, names, degrees, vectors, action, bracket, bound):
        super().__init__(rigid.monoid, names, degrees, action, bracket, ambient.field, bound)
        self.ambient = ambient
        self.rigid = rigid
        self.window = window
        self.vectors = tuple(vectors)

    def embed(self, v: Mapping) -> dict:
        out: dict = {}
        for k, c in v.items():
            axpy(out, c, self.vectors[k])
        return canonical(out)

    def coordinates(self, x: Mapping, Q) -> dict:
        """Coordinates of an ambient Q-primitive on this basis."""
        idx = self.indices_in_degree(Q)
        span = rref([self.vectors[k] for k in idx], self.ambient.dim, self.field)
        try:
            coords = span.coordinates(x)
        except NotSubspace:
            raise NotClosedUnderBracket("vector is not a generalized primitive of the expected degree")
        return {idx[r]: c for r, c in coords.items()}


def _gp_name(A: PresentedBialgebra, m: Monoid, Q, k: int, v: Mapping, used: set) -> str:
    if len(v) == 1:
        (i, c), = v.items()
        if c == A.field.one and A.names[i] not in used:
            return A.names[i]
    name = f"gp[{m.name(Q)}]{k}"
    while name in used:
        name += "'"
    return name


def gp_lie(A: PresentedBialgebra, rigid: RigidStructure, window=None) -> GPLieAlgebra:
    """Generalized primitives in the window with the commutator bracket and grouplike action."""
    win = _window(rigid, window)
    m = rigid.monoid
    names, degrees, vectors = [], [], []
    used: set = set()
    bases = {}
    for Q in win:
        sub = gp_basis(A, rigid, Q)
        bases[Q] = sub
        for k, v in enumerate(sub.rows):
            nm = _gp_name(A, m, Q, k, v, used)
            used.add(nm)
            names.append(nm)
            degrees.append(Q)
            vectors.append(dict(v))
    by_degree: dict = {}
    for k, d in enumerate(degrees):
        by_degree.setdefault(d, []).append(k)

    def coords(x: Mapping, Q) -> dict:
        if not x:
            return {}
        if Q not in bases:
            return None
        idx = by_degree.get(Q, [])
        try:
            c = bases[Q].coordinates(x)
        except NotSubspace:
            raise NotClosedUnderBracket(
                f"element {A.format_vector(x)} is not a {m.name(Q)}-primitive"
            ) from None
        return {idx[r]: a for r, a in c.items()}

    action: dict = {}
    gens = list(m.elements()) if m.is_finite else [1]
    for g in gens:
        if g == m.one:
            continue
        table = {}
        for k, v in enumerate(vectors):
            target = m.mul(g, degrees[k])
            if target not in win:
                continue
            try:
                img = A.multiply(rigid.eta[g], v)
            except Overflow:
                raise Indeterminate(f"action of {m.name(g)} on {names[k]} leaves the truncation") from None
            table[k] = coords(img, target)
        action[g] = table
    bracket: dict = {}
    for a, b in itertools.product(range(len(vectors)), repeat=2):
        target = m.mul(degrees[a], degrees[b])
        if target not in win:
            continue
        try:
            comm = dict(A.multiply(vectors[a], vectors[b]))
            axpy(comm, -A.field.one, A.multiply(vectors[b], vectors[a]))
        except Overflow:
            raise Indeterminate(f"bracket of {names[a]} and {names[b]} leaves the truncation") from None
        c = coords(canonical(comm), target)
        if c:
            bracket[(a, b)] = c
    bound = None if m.is_finite else win.bound
    return GPLieAlgebra(A, rigid, win, names, degrees, vectors, action, bracket, bound)


def is_gpg(A: PresentedBialgebra, rigid: RigidStructure, window=None) -> Verdict:
    """Whether grouplikes and generalized primitives generate the stored space."""
    win = _window(rigid, window)
    gens = [rigid.eta[g] for g in win]
    for Q in win:
        gens.extend(gp_basis(A, rigid, Q).rows)
    gens = [g for g in gens if g]
    span = rref([A.unit] + gens, A.dim, A.field)
    frontier = list(span.rows)
    skipped = 0
    while frontier and span.rank < A.dim:
        new = []
        for s in frontier:
            for g in gens:
                try:
                    prod = A.multiply(s, g)
                except Overflow:
                    skipped += 1
                    continue
                r = span.reduce(prod)
                if r:
                    new.append(r)
        if not new:
            break
        grown = rref(list(span.rows) + new, A.dim, A.field)
        frontier = [r for r in new if r]
        if grown.rank == span.rank:
            break
        span = grown
    if span.rank == A.dim:
        return Verdict(True, None, skipped, win.to_json())
    if skipped:
        raise Indeterminate("generation could not be decided: products leave the truncation")
    missing = [A.names[i] for i in range(A.dim) if span.reduce(A.basis_vector(i))]
    return Verdict(False, {"not_generated": missing[:5], "span_dim": span.rank, "dim": A.dim}, 0, win.to_json())


def is_left_sided(A: PresentedBialgebra, rigid: RigidStructure, window=None) -> Verdict:
    """xy = 0 for x a Q-primitive, y a Q'-primitive and Q dividing Q'."""
    win = _window(rigid, window)
    m = rigid.monoid
    bases = {q: gp_basis(A, rigid, q) for q in win}
    skipped = 0
    for Q, Q2 in itertools.product(win, repeat=2):
        if not m.divides(Q, Q2):
            continue
        if A.is_graded and m.mul(Q, Q2) not in win:
            continue
        for x in bases[Q].rows:
            for y in bases[Q2].rows:
                try:
                    prod = A.multiply(x, y)
                except Overflow:
                    skipped += 1
                    continue
                if prod:
                    witness = {
                        "Q": m.name(Q),
                        "Q'": m.name(Q2),
                        "x": A.format_vector(x),
                        "y": A.format_vector(y),
                        "xy": A.format_vector(prod),
                    }
                    return Verdict(False, witness, skipped, win.to_json())
    if skipped:
        raise Indeterminate("left-sidedness undecided: products leave the truncation")
    return Verdict(True, None, 0, win.to_json())


def decidable_torsion_window(L: SuspensiveLieAlgebra, window: DegreeWindow) -> DegreeWindow:
    """Largest sub-window on which (Q . -): L_Q -> L_{Q^2} is read off complete data."""
    m = L.monoid
    keep = [q for q in window if L.knows_degree(m.mul(q, q))]
    return DegreeWindow(m, tuple(keep))


def is_torsion_free_bialgebra(A: PresentedBialgebra, rigid: RigidStructure, window=None) -> Verdict:
    L = gp_lie(A, rigid, window)
    sub = decidable_torsion_window(L, L.window)
    flags = torsion_flags(L, sub)
    return Verdict(flags.torsion_free, flags.torsion_witness, 0, sub.to_json())


def _tensor_of_products(A: PresentedBialgebra, left: list, right: list) -> dict:
    return A.simple_tensor(A.multiply_many(left), A.multiply_many(right))


def s_n(A: PresentedBialgebra, rigid: RigidStructure, xs: Sequence[tuple]) -> dict:
    """Subset sum over proper nonempty U of (prod x(U, i)) (x) (prod x(U', i)).

    ``xs`` is a sequence of ``(vector, Q)`` with the vector a Q-primitive;
    x(U, i) is the grouplike of degree Q_i when i lies in U and x_i
    otherwise.
    """
    n = len(xs)
    out: dict = {}
    for size in range(1, n):
        for U in itertools.combinations(range(n), size):
            us = set(U)
            left = [rigid.of(q) if i in us else v for i, (v, q) in enumerate(xs)]
            right = [v if i in us else rigid.of(q) for i, (v, q) in enumerate(xs)]
            tensor_add(out, A.field.one, _tensor_of_products(A, left, right))
    return out


def delta_difference(A: PresentedBialgebra, rigid: RigidStructure, xs: Sequence[tuple]) -> dict:
    """Delta(prod x_i) - |prod| (x) prod - prod (x) |prod|."""
    m = rigid.monoid
    prod = A.multiply_many([v for v, _ in xs])
    g = rigid.of(m.prod(q for _, q in xs))
    out = dict(A.coproduct(prod))
    tensor_add(out, -A.field.one, A.simple_tensor(g, prod))
    tensor_add(out, -A.field.one, A.simple_tensor(prod, g))
    return out


def format_tensor(A: PresentedBialgebra, t: Mapping) -> list:
    return [[A.names[a], A.names[b], format_scalar(c)] for (a, b), c in sorted(t.items())]


# -- standard examples -------------------------------------------------------


def group_algebra(monoid: Monoid, field: Field = QQ, window=None) -> tuple:
    """The monoid algebra kG (restricted to a window) with its identity rigid structure."""
    win = monoid.enumerate_window(window or 0) if not isinstance(window, DegreeWindow) else window
    elems = list(win)
    pos = {g: k for k, g in enumerate(elems)}
    one = field.one
    mult = {}
    for a, b in itertools.product(elems, repeat=2):
        c = monoid.mul(a, b)
        mult[(pos[a], pos[b])] = {pos[c]: one} if c in pos else OVERFLOW
    comult = {pos[g]: {(pos[g], pos[g]): one} for g in elems}
    counit = {pos[g]: one for g in elems}
    names = [monoid.name(g) for g in elems]
    A = PresentedBialgebra(field, names, mult, comult, {pos[monoid.one]: one}, counit, elems, monoid)
    rigid = RigidStructure(monoid, win, {g: {pos[g]: one} for g in elems})
    return A, rigid


def dual_cyclic_group_algebra(n: int, field: Field = QQ) -> tuple:
    """Functions on the cyclic group of order n, with the trivial rigid structure."""
    from .monoid import finite_monoid

    one = field.one
    names = [f"d{k}" for k in range(n)]
    mult = {(k, k): {k: one} for k in range(n)}
    comult = {k: {(i, (k - i) % n): one for i in range(n)} for k in range(n)}
    unit = {k: one for k in range(n)}
    counit = {0: one}
    A = PresentedBialgebra(field, names, mult, comult, unit, counit)
    trivial = finite_monoid(["1"], [[0]], 0)
    rigid = RigidStructure(trivial, trivial.enumerate_window(), {0: unit})
    return A, rigid


def grouplikes_of_dual_cyclic_group_algebra(n: int, field: Field = QQ) -> list:
    """Grouplikes of the dual of k[C_n]: the characters, one per n-th root of unity in k."""
    if n < 1:
        raise ValueError("n must be positive")
    if field.kind == "Q":
        # rational roots of x^n - 1 divide the constant term
        roots = [r for r in (field(1), field(-1)) if r**n == 1]
    else:
        roots = [field(x) for x in range(1, field.p) if pow(x, n, field.p) == 1]
    out = []
    for z in roots:
        v = {}
        acc = field.one
        for k in range(n):
            v[k] = acc
            acc = acc * z
        out.append(v)
    return out
