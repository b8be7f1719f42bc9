"""Commutative monoids used as gradings: finite tables and the free monoid on one generator."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping, Sequence

__all__ = [
    "MonoidError",
    "InvalidBound",
    "Monoid",
    "DegreeWindow",
    "finite_monoid",
    "free_rank1",
    "cyclic_group",
    "product_table",
]

MonoidElement = int


class MonoidError(ValueError):
    """Malformed monoid data (table not commutative, associative or unital)."""


class InvalidBound(ValueError):
    """Negative window bound."""


@dataclass(frozen=True)
class Monoid:
    """A commutative monoid.

    ``kind`` is ``"finite_table"`` (elements are indices into ``names``)
    or ``"free_rank1"`` (elements are exponents of ``generator``).
    """

    kind: str
    names: tuple = ()
    identity: int = 0
    table: tuple = ()
    generator: str = "Q"

    def __post_init__(self) -> None:
        if self.kind == "finite_table":
            self._validate_table()
        elif self.kind == "free_rank1":
            if not self.generator or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", self.generator):
                raise MonoidError(f"bad generator name {self.generator!r}")
        else:
            raise MonoidError(f"unsupported monoid kind {self.kind!r}")

    def _validate_table(self) -> None:
        n = len(self.names)
        if n == 0:
            raise MonoidError("a monoid has at least one element")
        if len(set(self.names)) != n:
            raise MonoidError("duplicate element names")
        if not 0 <= self.identity < n:
            raise MonoidError("identity index out of range")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise MonoidError("table must be n x n")
        t = self.table
        for a in range(n):
            for b in range(n):
                if not 0 <= t[a][b] < n:
                    raise MonoidError(f"table entry {t[a][b]} out of range")
        e = self.identity
        for a in range(n):
            if t[e][a] != a or t[a][e] != a:
                raise MonoidError(f"identity fails on {self.names[a]}")
            for b in range(n):
                if t[a][b] != t[b][a]:
                    raise MonoidError(f"not commutative at ({self.names[a]}, {self.names[b]})")
                for c in range(n):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        raise MonoidError(
                            f"not associative at ({self.names[a]}, {self.names[b]}, {self.names[c]})"
                        )

    # -- basic structure ---------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite_table"

    @property
    def one(self) -> MonoidElement:
        return self.identity if self.is_finite else 0

    def elements(self) -> range:
        if not self.is_finite:
            raise ValueError("free monoid has infinitely many elements")
        return range(len(self.names))

    def check(self, a: MonoidElement) -> MonoidElement:
        if self.is_finite:
            if not 0 <= a < len(self.names):
                raise ValueError(f"element id {a} out of range")
        elif a < 0:
            raise ValueError(f"negative exponent {a}")
        return a

    def mul(self, a: MonoidElement, b: MonoidElement) -> MonoidElement:
        self.check(a)
        self.check(b)
        if self.is_finite:
            return self.table[a][b]
        return a + b

    def prod(self, items) -> MonoidElement:
        out = self.one
        for x in items:
            out = self.mul(out, x)
        return out

    def power(self, a: MonoidElement, n: int) -> MonoidElement:
        out = self.one
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def divides(self, q: MonoidElement, q2: MonoidElement) -> bool:
        """True iff g*q == q2 for some g."""
        self.check(q)
        self.check(q2)
        if not self.is_finite:
            return q <= q2
        return any(self.table[g][q] == q2 for g in self.elements())

    def quotients(self, q: MonoidElement, q2: MonoidElement) -> list:
        """All g with g*q == q2."""
        if not self.is_finite:
            return [q2 - q] if q <= q2 else []
        return [g for g in self.elements() if self.table[g][q] == q2]

    def is_linear(self) -> bool:
        if not self.is_finite:
            return True
        return all(
            self.divides(a, b) or self.divides(b, a) for a in self.elements() for b in self.elements()
        )

    def inverse(self, a: MonoidElement):
        if not self.is_finite:
            return 0 if a == 0 else None
        for g in self.elements():
            if self.table[a][g] == self.identity:
                return g
        return None

    def is_group(self) -> bool:
        if not self.is_finite:
            return False
        return all(self.inverse(a) is not None for a in self.elements())

    def enumerate_window(self, bound: int = 0) -> "DegreeWindow":
        if bound < 0:
            raise InvalidBound(f"window bound must be >= 0, got {bound}")
        if self.is_finite:
            return DegreeWindow(self, tuple(self.elements()))
        return DegreeWindow(self, tuple(range(bound + 1)))

    # -- names -------------------------------------------------------------

    def name(self, a: MonoidElement) -> str:
        self.check(a)
        if self.is_finite:
            return self.names[a]
        if a == 0:
            return "1"
        if a == 1:
            return self.generator
        return f"{self.generator}^{a}"

    def parse(self, text) -> MonoidElement:
        if self.is_finite:
            if isinstance(text, int):
                return self.check(text)
            if text in self.names:
                return self.names.index(text)
            raise MonoidError(f"unknown monoid element {text!r}")
        if isinstance(text, int):
            return self.check(text)
        s = str(text).strip()
        if s in ("1", ""):
            return 0
        g = re.escape(self.generator)
        m = re.fullmatch(rf"{g}(?:\^?(\d+))?", s)
        if not m:
            raise MonoidError(f"cannot parse {text!r} as a power of {self.generator}")
        return int(m.group(1)) if m.group(1) is not None else 1

    def sort_key(self, a: MonoidElement):
        return a

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.is_finite:
            return {
                "kind": "finite_table",
                "elements": list(self.names),
                "identity": self.identity,
                "table": [list(r) for r in self.table],
            }
        return {"kind": "free_rank1", "generator": self.generator}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Monoid":
        kind = doc.get("kind")
        if kind == "finite_table":
            names = tuple(str(x) for x in doc["elements"])
            table = tuple(tuple(int(x) for x in row) for row in doc["table"])
            return cls("finite_table", names, int(doc["identity"]), table)
        if kind == "free_rank1":
            return cls("free_rank1", generator=str(doc.get("generator", "Q")))
        if kind in ("free", "free_rank2", "free_commutative"):
            raise MonoidError("free commutative monoids of rank >= 2 are not supported")
        raise MonoidError(f"unsupported monoid kind {kind!r}")

    @cached_property
    def _hash(self) -> int:
        return hash((self.kind, self.names, self.identity, self.table, self.generator))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class DegreeWindow:
    """A finite divisor-closed set of monoid elements containing the identity."""

    monoid: Monoid
    elements: tuple

    def __post_init__(self) -> None:
        m = self.monoid
        elems = tuple(sorted(set(m.check(e) for e in self.elements)))
        object.__setattr__(self, "elements", elems)
        if m.one not in elems:
            raise ValueError("window must contain the identity")
        present = set(elems)
        for d in elems:
            if m.is_finite:
                for e in m.elements():
                    if m.divides(e, d) and e not in present:
                        raise ValueError(
                            f"window not divisor-closed: {m.name(e)} divides {m.name(d)}"
                        )
            else:
                for e in range(d):
                    if e not in present:
                        raise ValueError(
                            f"window not divisor-closed: {m.name(e)} divides {m.name(d)}"
                        )

    def __contains__(self, a) -> bool:
        return a in self.elements

    def __iter__(self) -> Iterator[MonoidElement]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def bound(self):
        """Largest exponent for the free monoid; ``None`` for finite monoids."""
        return None if self.monoid.is_finite else max(self.elements)

    def describe(self) -> str:
        return "{" + ", ".join(self.monoid.name(e) for e in self.elements) + "}"

    def to_json(self) -> list:
        return [self.monoid.name(e) for e in self.elements]


def finite_monoid(names: Sequence[str], table: Sequence[Sequence[int]], identity: int = 0) -> Monoid:
    return Monoid("finite_table", tuple(names), identity, tuple(tuple(r) for r in table))


def free_rank1(generator: str = "Q") -> Monoid:
    return Monoid("free_rank1", generator=generator)


def cyclic_group(n: int, generator: str = "s") -> Monoid:
    names = ["e"] + [generator if k == 1 else f"{generator}^{k}" for k in range(1, n)]
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return finite_monoid(names, table, 0)


def product_table(left: Monoid, right: Monoid) -> Monoid:
    """Direct product of two finite monoids, flattened to a table."""
    pairs = [(a, b) for a in left.elements() for b in right.elements()]
    index = {p: i for i, p in enumerate(pairs)}
    names = [f"({left.names[a]},{right.names[b]})" for a, b in pairs]
    table = [
        [index[(left.table[a][c], right.table[b][d])] for (c, d) in pairs] for (a, b) in pairs
    ]
    return finite_monoid(names, table, index[(left.identity, right.identity)])
