"""Exact scalars and deterministic sparse linear algebra.

Vectors are plain ``dict`` objects mapping a column index to a nonzero
scalar.  Rationals are :class:`fractions.Fraction`; prime-field residues
are :class:`Residue`.  Every routine here returns canonical reduced
row-echelon data, so results never depend on the order of the input rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce as _fold
from math import gcd
from typing import Iterable, Mapping, Sequence, Union

__all__ = [
    "KindMismatch",
    "NotSubspace",
    "Residue",
    "Field",
    "QQ",
    "GF",
    "Scalar",
    "SparseVector",
    "Subspace",
    "Quotient",
    "scalar_kind",
    "format_scalar",
    "parse_scalar",
    "vec_add",
    "vec_scale",
    "vec_sub",
    "axpy",
    "canonical",
    "rref",
    "kernel",
    "quotient_basis",
    "full_space",
    "rank",
]

DENSE_CUTOFF = 64


class KindMismatch(TypeError):
    """Scalars from different fields met in one computation."""


class NotSubspace(ValueError):
    """A relation vector does not lie in the ambient subspace."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True, slots=True)
class Residue:
    """An element of the prime field F_p, stored as 0 <= value < p."""

    value: int
    p: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.p:
            object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.p != self.p:
                raise KindMismatch(f"F_{self.p} and F_{other.p} scalars mixed")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other
        if isinstance(other, Fraction):
            raise KindMismatch(f"rational and F_{self.p} scalars mixed")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue((self.value + o) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue((self.value - o) % self.p, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue((o - self.value) % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue((self.value * o) % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue((-self.value) % self.p, self.p)

    def inverse(self) -> "Residue":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return Residue(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * Residue(o % self.p, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Residue(o % self.p, self.p) * self.inverse()

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, Residue):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.p))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.p})"


Scalar = Union[Fraction, Residue]
SparseVector = dict


@dataclass(frozen=True)
class Field:
    """Ground field: the rationals (``kind='Q'``) or F_p (``kind='Fp'``)."""

    kind: str
    p: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("Q", "Fp"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "Fp" and not _is_prime(self.p):
            raise ValueError(f"F_p needs a prime p, got {self.p}")
        if self.kind == "Q" and self.p != 0:
            raise ValueError("the rationals carry no prime")

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    def __call__(self, x) -> Scalar:
        if self.kind == "Q":
            if isinstance(x, Residue):
                raise KindMismatch("F_p scalar used over the rationals")
            return Fraction(x)
        if isinstance(x, Residue):
            if x.p != self.p:
                raise KindMismatch(f"F_{x.p} scalar used over F_{self.p}")
            return x
        if isinstance(x, Fraction):
            if x.denominator == 1:
                return Residue(x.numerator % self.p, self.p)
            return Residue(x.numerator % self.p, self.p) / (x.denominator % self.p)
        return Residue(int(x) % self.p, self.p)

    def parse(self, text: str) -> Scalar:
        return parse_scalar(text, self)

    def to_json(self) -> dict:
        return {"kind": "Q"} if self.kind == "Q" else {"kind": "Fp", "p": self.p}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Field":
        if doc.get("kind") == "Q":
            return QQ
        if doc.get("kind") == "Fp":
            return GF(int(doc["p"]))
        raise ValueError(f"bad field document {doc!r}")

    def __str__(self) -> str:
        return "Q" if self.kind == "Q" else f"F_{self.p}"


QQ = Field("Q")


def GF(p: int) -> Field:
    return Field("Fp", p)


def scalar_kind(x) -> tuple:
    if isinstance(x, Residue):
        return ("Fp", x.p)
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return ("Q", 0)
    raise KindMismatch(f"not a scalar: {x!r}")


def format_scalar(x: Scalar) -> str:
    if isinstance(x, Residue):
        return str(x.value)
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(text, fld: Field = QQ) -> Scalar:
    if isinstance(text, int):
        return fld(text)
    text = str(text).strip()
    if fld.kind == "Q":
        return Fraction(text)
    return fld(Fraction(text))


# --- vector helpers -------------------------------------------------------


def canonical(v: Mapping[int, Scalar]) -> SparseVector:
    """Drop zeros and order the entries by index."""
    return {k: v[k] for k in sorted(v) if v[k]}


def axpy(dst: dict, c: Scalar, src: Mapping, ) -> dict:
    """In place: dst += c * src, removing entries that cancel."""
    if not c:
        return dst
    for k, a in src.items():
        s = dst.get(k)
        t = a * c if s is None else s + a * c
        if t:
            dst[k] = t
        elif s is not None:
            del dst[k]
    return dst


def vec_add(u: Mapping, v: Mapping) -> SparseVector:
    out = dict(u)
    axpy(out, 1, v)
    return canonical(out)


def vec_sub(u: Mapping, v: Mapping) -> SparseVector:
    out = dict(u)
    axpy(out, -1, v)
    return canonical(out)


def vec_scale(c: Scalar, v: Mapping) -> SparseVector:
    if not c:
        return {}
    return canonical({k: a * c for k, a in v.items()})


def _check_kinds(rows: Iterable[Mapping], fld: Field | None) -> tuple | None:
    kind = None
    if fld is not None:
        kind = ("Q", 0) if fld.kind == "Q" else ("Fp", fld.p)
    for r in rows:
        for a in r.values():
            k = scalar_kind(a)
            if kind is None:
                kind = k
            elif k != kind:
                raise KindMismatch(f"scalar kinds {kind} and {k} mixed")
    return kind


def _clear_denominators(row: Mapping) -> dict:
    dens = [a.denominator for a in row.values() if isinstance(a, Fraction) and a.denominator != 1]
    if not dens:
        return {k: Fraction(a) for k, a in row.items()}
    m = _fold(lambda x, y: x * y // gcd(x, y), dens, 1)
    return {k: Fraction(a * m) for k, a in row.items()}


# --- subspaces ------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A span in reduced row-echelon form.

    ``rows[i]`` has a 1 in column ``pivots[i]`` and every pivot column is
    zero in all other rows.
    """

    rows: tuple
    pivots: tuple
    dim: int

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Mapping) -> SparseVector:
        """Subtract the span's pivot components; the result vanishes on pivots."""
        out = dict(v)
        for p, r in zip(self.pivots, self.rows):
            c = out.get(p)
            if c:
                axpy(out, -c, r)
        return canonical(out)

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)

    def coordinates(self, v: Mapping) -> SparseVector:
        """Coefficients of ``v`` on ``rows``; raises if ``v`` is outside the span."""
        if self.reduce(v):
            raise NotSubspace("vector is not in the span")
        return {i: v[p] for i, p in enumerate(self.pivots) if v.get(p)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.pivots == other.pivots
            and all(canonical(a) == canonical(b) for a, b in zip(self.rows, other.rows))
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.pivots))


def full_space(dim: int, one: Scalar = Fraction(1)) -> Subspace:
    return Subspace(tuple({i: one} for i in range(dim)), tuple(range(dim)), dim)


def _rref_sparse(rows: Sequence[Mapping]) -> dict:
    pivot_rows: dict[int, dict] = {}
    for src in rows:
        r = dict(src)
        for p in [c for c in r if c in pivot_rows]:
            c = r.get(p)
            if c:
                axpy(r, -c, pivot_rows[p])
        if not r:
            continue
        lead = min(r)
        inv = 1 / r[lead]
        r = {k: a * inv for k, a in r.items()}
        for q, other in pivot_rows.items():
            c = other.get(lead)
            if c:
                axpy(other, -c, r)
        pivot_rows[lead] = r
    return pivot_rows


def _rref_dense(rows: Sequence[Mapping], ncols: int, zero) -> dict:
    mat = []
    for src in rows:
        line = [zero] * ncols
        for k, a in src.items():
            line[k] = a
        mat.append(line)
    pivot_rows: dict[int, list] = {}
    order: list[int] = []
    r = 0
    for col in range(ncols):
        sel = None
        for i in range(r, len(mat)):
            if mat[i][col]:
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [a * inv for a in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                c = mat[i][col]
                mat[i] = [a - c * b for a, b in zip(mat[i], mat[r])]
        order.append(col)
        r += 1
        if r == len(mat):
            break
    for i, col in enumerate(order):
        pivot_rows[col] = {k: a for k, a in enumerate(mat[i]) if a}
    return pivot_rows


def rref(rows: Iterable[Mapping], ambient_dim: int, field: Field | None = None) -> Subspace:
    """Canonical reduced row-echelon basis of the span of ``rows``.

    Pivoting is on the leftmost nonzero column.  Rational rows are scaled
    to integer rows first; blocks narrower than 64 columns use a dense
    elimination.
    """
    rows = [r for r in rows if any(r.values())]
    kind = _check_kinds(rows, field)
    for r in rows:
        for k in r:
            if not 0 <= k < ambient_dim:
                raise IndexError(f"column {k} outside ambient dimension {ambient_dim}")
    if kind == ("Q", 0):
        rows = [_clear_denominators(r) for r in rows]
    if not rows:
        return Subspace((), (), ambient_dim)
    if ambient_dim < DENSE_CUTOFF:
        zero = Fraction(0) if kind == ("Q", 0) else Residue(0, kind[1])
        piv = _rref_dense(rows, ambient_dim, zero)
    else:
        piv = _rref_sparse(rows)
    keys = sorted(piv)
    return Subspace(tuple(canonical(piv[k]) for k in keys), tuple(keys), ambient_dim)


def rank(rows: Iterable[Mapping], ambient_dim: int, field: Field | None = None) -> int:
    return rref(rows, ambient_dim, field).rank


def kernel(matrix: Sequence[Mapping], domain_dim: int, field: Field | None = None) -> Subspace:
    """Null space of the map whose rows are ``matrix`` (columns = domain)."""
    kind = _check_kinds(matrix, field)
    echelon = rref(matrix, domain_dim, field)
    if kind is None:
        one = field.one if field is not None else Fraction(1)
    else:
        one = Fraction(1) if kind[0] == "Q" else Residue(1, kind[1])
    pivots = set(echelon.pivots)
    basis = []
    for f in range(domain_dim):
        if f in pivots:
            continue
        v = {f: one}
        for p, r in zip(echelon.pivots, echelon.rows):
            c = r.get(f)
            if c:
                v[p] = -c
        basis.append(v)
    out = rref(basis, domain_dim, field)
    assert echelon.rank + out.rank == domain_dim
    return out


@dataclass(frozen=True)
class Quotient:
    """``ambient / relations`` with canonical coset representatives."""

    ambient: Subspace
    relations: Subspace
    basis: Subspace
    labels: tuple | None = dc_field(default=None)

    @property
    def dim(self) -> int:
        return self.basis.rank

    @property
    def representatives(self) -> tuple:
        return self.basis.rows

    @property
    def representative_labels(self) -> tuple:
        if self.labels is None:
            return tuple(self.basis.pivots)
        return tuple(self.labels[p] for p in self.basis.pivots)

    def normal_form(self, v: Mapping) -> SparseVector:
        return self.relations.reduce(v)

    def coordinates(self, v: Mapping) -> SparseVector:
        """Coordinates of the class of ``v`` on :attr:`representatives`."""
        nf = self.normal_form(v)
        return {i: nf[p] for i, p in enumerate(self.basis.pivots) if nf.get(p)}


def quotient_basis(ambient: Subspace, relations: Subspace, labels: Sequence | None = None) -> Quotient:
    """Coset representatives for ``ambient / relations``.

    The representatives are supported off the pivot columns of
    ``relations``; for a full ambient space they are exactly the non-pivot
    coordinate vectors.  Raises :class:`NotSubspace` if ``relations`` is
    not contained in ``ambient``.
    """
    if ambient.dim != relations.dim:
        raise NotSubspace("ambient and relations live in different dimensions")
    for r in relations.rows:
        if not ambient.contains(r):
            raise NotSubspace(f"relation {r} is not in the ambient subspace")
    reduced = [relations.reduce(r) for r in ambient.rows]
    basis = rref(reduced, ambient.dim)
    return Quotient(ambient, relations, basis, tuple(labels) if labels is not None else None)
