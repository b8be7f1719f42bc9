"""Mod-p Dyer-Lashof algebra: Adem rewriting, excess quotients R(e), coproduct and E0R.

Generators are pairs ``(eps, i)`` meaning ``beta^eps Q^i``.  At p = 2 only
``eps = 0`` occurs and ``Q^i`` has internal degree ``i``; at odd p the
degree is ``2i(p-1) - eps``.  A monomial is a tuple of generators, and an
element is a dictionary from admissible monomials to residues mod p.

Rewriting conventions (each checked by the test-suite):

* ``Q^r Q^s`` and ``beta Q^r Q^s`` rewrite when ``r > ps`` (``r > 2s`` at
  p = 2); ``Q^r beta Q^s`` and ``beta Q^r beta Q^s`` rewrite when
  ``r >= ps``.  A pair is admissible exactly when it does not rewrite.
* ``beta Q^r Q^s`` uses the ``Q^r Q^s`` expansion with a Bockstein on the
  left factor of every term.
* ``Delta(beta Q^s) = sum_{i+j=s} (beta Q^i (x) Q^j + Q^i (x) beta Q^j)``
  and products in the tensor square carry the Koszul sign.
"""
from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping

from .linalg import GF, rref

__all__ = [
    "DLError",
    "CapExceeded",
    "NotApplicable",
    "DLConfig",
    "DLElement",
    "DyerLashof",
    "binomial_mod_p",
    "generator_degree",
    "degree",
    "excess",
    "is_admissible",
    "rewritable",
    "adem_step",
    "parse_word",
    "format_word",
    "verify_left_sided_e0",
]

STEP_CEILING = 2_000_000


class DLError(ValueError):
    """Malformed Dyer-Lashof input."""


class CapExceeded(DLError):
    """Internal degree above the configured cap."""


class NotApplicable(DLError):
    """Adem step requested for an admissible pair."""


def binomial_mod_p(a: int, b: int, p: int) -> int:
    """C(a, b) mod p by Lucas' theorem; zero unless 0 <= b <= a."""
    if b < 0 or a < 0 or b > a:
        return 0
    out = 1
    while a or b:
        x, y = a % p, b % p
        if y > x:
            return 0
        out = out * comb(x, y) % p
        a //= p
        b //= p
    return out


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise DLError(f"p must be prime, got {p}")


def generator_degree(g: tuple, p: int) -> int:
    eps, i = g
    if p == 2:
        return i
    return 2 * i * (p - 1) - eps


def degree(word: Iterable, p: int) -> int:
    return sum(generator_degree(g, p) for g in word)


def excess(word: tuple, p: int):
    """Excess of a monomial; the empty monomial has infinite excess."""
    if not word:
        return float("inf")
    eps1, i1 = word[0]
    if p == 2:
        return i1 - sum(i for _, i in word[1:])
    return 2 * i1 - eps1 - sum(2 * i * (p - 1) - e for e, i in word[1:])


def rewritable(a: tuple, b: tuple, p: int) -> bool:
    r, s = a[1], b[1]
    if p == 2:
        return r > 2 * s
    if b[0] == 1:
        return r >= p * s
    return r > p * s


def is_admissible(word: tuple, p: int) -> bool:
    return not any(rewritable(word[k], word[k + 1], p) for k in range(len(word) - 1))


@lru_cache(maxsize=None)
def _adem_pair(a: tuple, b: tuple, p: int) -> tuple:
    (e1, r), (e2, s) = a, b
    out: dict = {}

    def add(w, c):
        c %= p
        if c:
            out[w] = (out.get(w, 0) + c) % p

    for i in range(0, r + s + 1):
        j = r + s - i
        if p == 2:
            add(((0, j), (0, i)), binomial_mod_p(i - s - 1, 2 * i - r, 2))
            continue
        sign = -1 if (r + i) % 2 else 1
        if (e1, e2) == (0, 0):
            add(((0, j), (0, i)), sign * binomial_mod_p(p * i - (p - 1) * s - i - 1, p * i - r, p))
        elif (e1, e2) == (0, 1):
            add(((1, j), (0, i)), sign * binomial_mod_p(p * i - (p - 1) * s - i, p * i - r, p))
            add(((0, j), (1, i)), -sign * binomial_mod_p(p * i - (p - 1) * s - i - 1, p * i - r - 1, p))
        elif (e1, e2) == (1, 1):
            add(((1, j), (1, i)), -sign * binomial_mod_p(p * i - (p - 1) * s - i - 1, p * i - r - 1, p))
        else:
            add(((1, j), (0, i)), sign * binomial_mod_p(p * i - (p - 1) * s - i - 1, p * i - r, p))
    return tuple(sorted((w, c) for w, c in out.items() if c))


def adem_step(pair: tuple, p: int) -> dict:
    """Right-hand side of the Adem relation for a rewritable pair."""
    a, b = pair
    if not rewritable(a, b, p):
        raise NotApplicable(f"{format_word(pair)} is admissible at p={p}")
    return dict(_adem_pair(a, b, p))


_GEN = re.compile(r"(b?)Q(\d+)")


def parse_word(text: str, p: int) -> tuple:
    """Parse ``"Q3 Q1"`` / ``"bQ1"``; ``"1"`` or ``""`` is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in text.split():
        m = _GEN.fullmatch(tok)
        if not m:
            raise DLError(f"cannot parse generator {tok!r}")
        eps = 1 if m.group(1) else 0
        if eps and p == 2:
            raise DLError("Bockstein generators do not occur at p = 2")
        out.append((eps, int(m.group(2))))
    return tuple(out)


def format_word(word: tuple) -> str:
    if not word:
        return "1"
    return " ".join(("bQ" if e else "Q") + str(i) for e, i in word)


def _word_key(word: tuple):
    return (len(word), word)


@dataclass(frozen=True)
class DLConfig:
    """Algebra configuration: prime, excess threshold and internal-degree cap."""

    p: int = 2
    e: int = 0
    cap: int = 24
    max_length: int | None = None

    def __post_init__(self) -> None:
        _check_prime(self.p)


@dataclass(frozen=True)
class DLElement:
    """An F_p combination of admissible monomials of excess >= e."""

    terms: tuple
    config: DLConfig = field(compare=False)

    @classmethod
    def from_dict(cls, d: Mapping, config: DLConfig) -> "DLElement":
        p = config.p
        items = sorted(((w, c % p) for w, c in d.items() if c % p), key=lambda t: _word_key(t[0]))
        return cls(tuple(items), config)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "DLElement") -> "DLElement":
        d = self.as_dict()
        for w, c in other.terms:
            d[w] = d.get(w, 0) + c
        return DLElement.from_dict(d, self.config)

    def scale(self, c: int) -> "DLElement":
        return DLElement.from_dict({w: a * c for w, a in self.terms}, self.config)

    @property
    def degrees(self) -> set:
        return {degree(w, self.config.p) for w, _ in self.terms}

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms:
            s = format_word(w)
            parts.append(s if c == 1 else f"{c}*{s}")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [[format_word(w), c] for w, c in self.terms]

    def __str__(self) -> str:
        return self.format()


def _tensor_key(t):
    (a, b), _ = t
    return (_word_key(a), _word_key(b))


class DyerLashof:
    """Rewriting engine for one configuration.

    Normal forms of pairs and of whole words are cached; the caches are
    shared by threads under a lock, so concurrent use returns the same
    values as serial use.
    """

    def __init__(self, config: DLConfig | None = None, **kw) -> None:
        self.config = config or DLConfig(**kw)
        self.p = self.config.p
        self._lock = threading.Lock()
        self._word_nf: dict = {}
        self._pair_memo: dict = {}
        self._cop_memo: dict = {}
        self._basis: dict = {}
        self._nonneg: dict = {}
        self._kpow: dict = {}
        self.steps = 0

    # -- rewriting ---------------------------------------------------------

    def _pair(self, a, b) -> tuple:
        key = (a, b)
        hit = self._pair_memo.get(key)
        if hit is None:
            hit = _adem_pair(a, b, self.p)
            with self._lock:
                self._pair_memo.setdefault(key, hit)
        return hit

    def _coerce(self, x) -> dict:
        if isinstance(x, DLElement):
            return x.as_dict()
        if isinstance(x, str):
            return {parse_word(x, self.p): 1}
        if isinstance(x, tuple):
            return {x: 1}
        if isinstance(x, Mapping):
            return dict(x)
        raise DLError(f"cannot interpret {x!r} as a Dyer-Lashof element")

    def _check_word(self, w: tuple) -> None:
        for e, i in w:
            if i < 0 or e not in (0, 1) or (e and self.p == 2):
                raise DLError(f"bad generator {(e, i)!r}")
        if degree(w, self.p) > self.config.cap:
            raise CapExceeded(f"{format_word(w)} has degree {degree(w, self.p)} > cap {self.config.cap}")

    def rewrite(self, x, strategy: str = "leftmost") -> dict:
        """Adem-rewrite to admissible monomials (no excess filtering)."""
        if strategy not in ("leftmost", "rightmost"):
            raise ValueError(strategy)
        p = self.p
        src = self._coerce(x)
        out: dict = {}
        stack = []
        for w, c in src.items():
            self._check_word(w)
            stack.append((w, c % p))
        steps = 0
        while stack:
            w, c = stack.pop()
            if not c:
                continue
            if strategy == "leftmost":
                hit = self._word_nf.get(w)
                if hit is not None:
                    for v, a in hit:
                        out[v] = (out.get(v, 0) + c * a) % p
                    continue
            steps += 1
            if steps > STEP_CEILING:
                raise RuntimeError("rewrite step ceiling reached")
            idx = [k for k in range(len(w) - 1) if rewritable(w[k], w[k + 1], p)]
            if not idx:
                out[w] = (out.get(w, 0) + c) % p
                continue
            k = idx[0] if strategy == "leftmost" else idx[-1]
            if strategy == "leftmost" and len(w) > 2:
                nf = self._word_normal_form(w, k)
                for v, a in nf:
                    out[v] = (out.get(v, 0) + c * a) % p
                continue
            for pair, a in self._pair(w[k], w[k + 1]):
                stack.append((w[:k] + pair + w[k + 2 :], c * a % p))
        self.steps += steps
        return {w: c for w, c in out.items() if c}

    def _word_normal_form(self, w: tuple, k: int) -> tuple:
        hit = self._word_nf.get(w)
        if hit is not None:
            return hit
        p = self.p
        acc: dict = {}
        for pair, a in self._pair(w[k], w[k + 1]):
            for v, b in self.rewrite({w[:k] + pair + w[k + 2 :]: a}).items():
                acc[v] = (acc.get(v, 0) + b) % p
        res = tuple(sorted((v, c) for v, c in acc.items() if c))
        with self._lock:
            self._word_nf.setdefault(w, res)
        return res

    def normalize(self, x, strategy: str = "leftmost") -> DLElement:
        src = self._coerce(x)
        degs = {degree(w, self.p) for w, c in src.items() if c % self.p}
        rewritten = self.rewrite(src, strategy)
        for w in rewritten:
            assert degree(w, self.p) in degs, "rewriting changed the internal degree"
        e = self.config.e
        kept = {w: c for w, c in rewritten.items() if excess(w, self.p) >= e}
        return DLElement.from_dict(kept, self.config)

    def multiply(self, x, y) -> DLElement:
        a = self._coerce(x)
        b = self._coerce(y)
        prod: dict = {}
        for u, c in a.items():
            for v, d in b.items():
                w = u + v
                prod[w] = (prod.get(w, 0) + c * d) % self.p
        return self.normalize(prod)

    # -- coalgebra ---------------------------------------------------------

    def _generator_coproduct(self, g: tuple) -> dict:
        eps, n = g
        out: dict = {}
        if eps == 0:
            for j in range(n + 1):
                out[(((0, j),), ((0, n - j),))] = 1
        else:
            for j in range(n + 1):
                for key in ((((1, j),), ((0, n - j),)), (((0, j),), ((1, n - j),))):
                    out[key] = (out.get(key, 0) + 1) % self.p
        return out

    def _tensor_mul(self, x: dict, y: dict) -> dict:
        p = self.p
        out: dict = {}
        for (a, b), c in x.items():
            db = degree(b, p) % 2
            for (u, v), d in y.items():
                sign = -1 if (db and degree(u, p) % 2) else 1
                key = (a + u, b + v)
                out[key] = (out.get(key, 0) + sign * c * d) % p
        return {k: c for k, c in out.items() if c}

    def coproduct_unreduced(self, x) -> dict:
        """Multiplicative expansion of the generator formulas, factors not normalized."""
        total: dict = {}
        for w, c in self._coerce(x).items():
            self._check_word(w)
            acc = {((), ()): 1}
            for g in w:
                acc = self._tensor_mul(acc, self._generator_coproduct(g))
            for k, a in acc.items():
                total[k] = (total.get(k, 0) + c * a) % self.p
        return {k: c for k, c in total.items() if c}

    def normalize_tensor(self, t: Mapping) -> dict:
        p = self.p
        out: dict = {}
        cache: dict = {}

        def nf(w):
            if w not in cache:
                cache[w] = self.normalize({w: 1}).terms
            return cache[w]

        for (a, b), c in t.items():
            for u, x in nf(a):
                for v, y in nf(b):
                    out[(u, v)] = (out.get((u, v), 0) + c * x * y) % p
        return dict(sorted(((k, c) for k, c in out.items() if c), key=_tensor_key))

    def coproduct(self, x) -> dict:
        """Coproduct of the class of ``x``; each tensor factor is normalized."""
        elem = self.normalize(x)
        out: dict = {}
        for w, c in elem.terms:
            hit = self._cop_memo.get(w)
            if hit is None:
                hit = self.normalize_tensor(self.coproduct_unreduced({w: 1}))
                with self._lock:
                    self._cop_memo.setdefault(w, hit)
            for k, a in hit.items():
                out[k] = (out.get(k, 0) + c * a) % self.p
        return dict(sorted(((k, c) for k, c in out.items() if c), key=_tensor_key))

    def augment(self, x) -> int:
        """Counit: 1 on words made only of Q^0 (and on the empty word), else 0."""
        elem = self.normalize(x)
        return sum(c for w, c in elem.terms if all(g == (0, 0) for g in w)) % self.p

    # -- bases and filtrations ---------------------------------------------

    def _length_bound(self, d: int) -> int:
        if self.config.max_length is not None:
            return self.config.max_length
        if self.config.e >= 0 and d > 0:
            low = 1 if self.p == 2 else 2 * (self.p - 1) - 1
            return d // low + 1
        return 4

    def _nonneg_words(self, d: int) -> tuple:
        """Admissible words of degree d > 0 with excess >= 0.

        Every suffix of such a word again has excess >= 0, so the words
        are built from the first letter and a shorter word of the same
        kind.
        """
        hit = self._nonneg.get(d)
        if hit is not None:
            return hit
        p = self.p
        out = []
        top = d if p == 2 else (d + 1) // (2 * (p - 1)) + 1
        for i in range(1, top + 1):
            for eps in (0, 1) if p > 2 else (0,):
                g = (eps, i)
                gd = generator_degree(g, p)
                if gd > d or gd <= 0:
                    continue
                rest = d - gd
                tails = [()] if rest == 0 else self._nonneg_words(rest) if rest > 0 else []
                for w in tails:
                    if w and rewritable(g, w[0], p):
                        continue
                    word = (g,) + w
                    if excess(word, p) >= 0:
                        out.append(word)
        res = tuple(sorted(out, key=_word_key))
        with self._lock:
            self._nonneg.setdefault(d, res)
        return res

    def basis_in_degree(self, d: int) -> list:
        """Admissible monomials of internal degree ``d`` with excess >= e."""
        if d > self.config.cap:
            raise CapExceeded(f"degree {d} > cap {self.config.cap}")
        hit = self._basis.get(d)
        if hit is not None:
            return list(hit)
        if self.config.e >= 0 and d > 0:
            out = [w for w in self._nonneg_words(d) if excess(w, self.p) >= self.config.e]
        else:
            out = self._bounded_search(d)
        out = sorted(set(out), key=_word_key)
        with self._lock:
            self._basis[d] = tuple(out)
        return out

    def _bounded_search(self, d: int) -> list:
        """Depth-first search over words up to the length bound."""
        p = self.p
        max_len = self._length_bound(d)
        low = 0 if p == 2 else -1
        gens = []
        for i in range(0, d + max_len + 2):
            for eps in (0, 1) if p > 2 else (0,):
                if generator_degree((eps, i), p) <= d + max_len * max(0, -low):
                    gens.append((eps, i))
        out = []

        def grow(word, deg, left):
            if deg == d and word and excess(word, p) >= self.config.e:
                out.append(word)
            if left == 0:
                return
            for g in gens:
                gd = generator_degree(g, p)
                if deg + gd + low * (left - 1) > d:
                    continue
                if word and rewritable(word[-1], g, p):
                    continue
                grow(word + (g,), deg + gd, left - 1)

        grow((), 0, max_len)
        if d == 0:
            out.append(())
        return out

    def _require_nonnegative_e(self) -> None:
        if self.config.e < 0:
            raise DLError("the K-adic filtration is only supported for e >= 0")

    def _k_power(self, n: int, d: int):
        """Echelon span of K^n in degree d, over the degree-d basis."""
        key = (n, d)
        hit = self._kpow.get(key)
        if hit is not None:
            return hit
        basis = self.basis_in_degree(d)
        index = {w: k for k, w in enumerate(basis)}
        fld = GF(self.p)
        if n == 0 or (n == 1 and d > 0):
            rows = [{k: fld.one} for k in range(len(basis))] if (n == 0 or d > 0) else []
        elif d <= 0:
            rows = []
        else:
            rows = []
            for a in range(1, d):
                lower = self._k_power(n - 1, d - a)
                if not lower.rows:
                    continue
                lower_basis = self.basis_in_degree(d - a)
                for b in self.basis_in_degree(a):
                    for r in lower.rows:
                        y = {lower_basis[k]: c.value for k, c in r.items()}
                        prod = self.multiply({b: 1}, y)
                        row = {index[w]: fld(c) for w, c in prod.terms}
                        if row:
                            rows.append(row)
        span = rref(rows, len(basis), fld)
        with self._lock:
            self._kpow.setdefault(key, span)
        return span

    def k_adic_level(self, x) -> int:
        """Largest n with x in K^n, K the ideal of positive-degree elements."""
        self._require_nonnegative_e()
        elem = self.normalize(x)
        if not elem:
            raise DLError("the zero element lies in every power of K")
        fld = GF(self.p)
        level = None
        for d in sorted(elem.degrees):
            if d <= 0:
                return 0
            index = {w: k for k, w in enumerate(self.basis_in_degree(d))}
            vec = {index[w]: fld(c) for w, c in elem.terms if degree(w, self.p) == d}
            n = 1
            while n < d + 1 and self._k_power(n + 1, d).contains(vec):
                n += 1
            level = n if level is None else min(level, n)
        return level

    def e0_multiply(self, x, y) -> "E0Product":
        """Product in the associated graded of the K-adic filtration."""
        self._require_nonnegative_e()
        xe = self.normalize(x)
        ye = self.normalize(y)
        if not xe or not ye:
            return E0Product(DLElement((), self.config), None, None)
        if len(xe.degrees) != 1 or len(ye.degrees) != 1:
            raise DLError("E0 products need homogeneous factors")
        a = self.k_adic_level(xe)
        b = self.k_adic_level(ye)
        d = next(iter(xe.degrees)) + next(iter(ye.degrees))
        prod = self.multiply(xe, ye)
        if prod and self.k_adic_level(prod) == a + b:
            return E0Product(prod, a + b, d)
        return E0Product(DLElement((), self.config), a + b, d)


@dataclass(frozen=True)
class E0Product:
    """A product in E0R tagged with (filtration, internal degree)."""

    element: DLElement
    filtration: int | None
    degree: int | None

    def __bool__(self) -> bool:
        return bool(self.element)


@dataclass
class LeftSidedReport:
    p: int
    degree_bound: int
    passed: bool
    checked: int
    failures: list
    equal_degree_nonzero: list

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "degree_bound": self.degree_bound,
            "verdict": "pass" if self.passed else "fail",
            "checked": self.checked,
            "failures": self.failures,
            "equal_degree_nonzero": self.equal_degree_nonzero,
        }


def verify_left_sided_e0(p: int, degree_bound: int, engine: DyerLashof | None = None) -> LeftSidedReport:
    """Check xy = 0 in E0R for positive-degree basis elements with |x| <= |y| (p odd) or |x| < |y| (p = 2)."""
    eng = engine or DyerLashof(DLConfig(p=p, e=0, cap=max(degree_bound, 0)))
    if eng.config.p != p:
        raise DLError("engine prime does not match")
    failures = []
    equal_nonzero = []
    checked = 0
    for dx in range(1, degree_bound + 1):
        for dy in range(dx, degree_bound - dx + 1):
            for x, y in itertools.product(eng.basis_in_degree(dx), eng.basis_in_degree(dy)):
                prod = eng.e0_multiply({x: 1}, {y: 1})
                checked += 1
                if not prod:
                    continue
                entry = [format_word(x), format_word(y), prod.element.format()]
                if p == 2 and dx == dy:
                    equal_nonzero.append(entry)
                else:
                    failures.append(entry)
    return LeftSidedReport(p, degree_bound, not failures, checked, failures, equal_nonzero)
