"""Named examples and seeded random suspensive Lie algebras for tests and the CLI."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .linalg import QQ, axpy, canonical, rref
from .monoid import Monoid, cyclic_group, finite_monoid, free_rank1, product_table
from .suspensive import SuspensiveLieAlgebra, check_suspensive

__all__ = [
    "nontf_example",
    "free_shift_example",
    "klein_four",
    "nonlinear_monoid",
    "random_lie_algebra",
    "tensor_with_monoid",
    "change_basis",
    "random_torsion_free",
    "random_group_fixture",
    "random_torsion",
    "nonabelian_torsion_counterexample",
]

ONE = Fraction(1)


def nontf_example() -> SuspensiveLieAlgebra:
    """One-dimensional, in degree Q, zero action and bracket."""
    return SuspensiveLieAlgebra(free_rank1("Q"), ["x"], [1], {1: {}}, {})


def free_shift_example(bound: int) -> SuspensiveLieAlgebra:
    """A line x_n in each degree sigma^n, with sigma . x_n = x_{n+1}; truncated at ``bound``."""
    names = [f"x{n}" for n in range(bound + 1)]
    action = {1: {n: {n + 1: ONE} for n in range(bound)}}
    return SuspensiveLieAlgebra(free_rank1("sigma"), names, list(range(bound + 1)), action, {}, QQ, bound)


def klein_four() -> Monoid:
    return product_table(cyclic_group(2, "a"), cyclic_group(2, "b"))


def nonlinear_monoid() -> Monoid:
    """{1, a, b, z}: every product of two non-identity elements is z."""
    table = [[0, 1, 2, 3], [1, 3, 3, 3], [2, 3, 3, 3], [3, 3, 3, 3]]
    return finite_monoid(["1", "a", "b", "z"], table, 0)


# -- random Lie algebras ---------------------------------------------------------


def _jacobi_ok(dim: int, br: dict) -> bool:
    def bracket(u, v):
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                w = br.get((i, j))
                if w:
                    axpy(out, a * b, w)
        return canonical(out)

    for i, j, k in itertools.combinations(range(dim), 3):
        x, y, z = {i: ONE}, {j: ONE}, {k: ONE}
        total: dict = {}
        axpy(total, ONE, bracket(x, bracket(y, z)))
        axpy(total, ONE, bracket(y, bracket(z, x)))
        axpy(total, ONE, bracket(z, bracket(x, y)))
        if canonical(total):
            return False
    return True


def random_lie_algebra(rng: random.Random, degrees: list, mul, allowed=lambda d: True, tries: int = 200) -> dict:
    """Random structure constants on a graded basis, rejecting non-Jacobi candidates.

    ``mul`` multiplies degrees; brackets land only in the matching degree.
    Returns ``{(i, j): vector}`` with both orders filled.
    """
    dim = len(degrees)
    for _ in range(tries):
        br: dict = {}
        for i, j in itertools.combinations(range(dim), 2):
            target = mul(degrees[i], degrees[j])
            if not allowed(target):
                continue
            cands = [k for k in range(dim) if degrees[k] == target]
            v = {k: Fraction(rng.choice([-1, 0, 0, 1, 2])) for k in cands}
            v = canonical(v)
            if v:
                br[(i, j)] = v
                br[(j, i)] = {k: -c for k, c in v.items()}
        if _jacobi_ok(dim, br):
            return br
    return {}


def tensor_with_monoid(monoid: Monoid, base_degrees: list, base_bracket: dict, names: list, bound=None) -> SuspensiveLieAlgebra:
    """The free kG-module on a Lie algebra: basis e_a (x) g, G acting on the second factor."""
    if monoid.is_finite:
        gs = list(monoid.elements())
    else:
        gs = list(range(bound + 1))
    basis = []
    for a, d in enumerate(base_degrees):
        for g in gs:
            deg = monoid.mul(d, g)
            if bound is None or deg <= bound:
                basis.append((a, g, deg))
    index = {(a, g): k for k, (a, g, _) in enumerate(basis)}
    label = [f"{names[a]}" if g == monoid.one else f"{names[a]}.{monoid.name(g)}" for a, g, _ in basis]
    degrees = [deg for _, _, deg in basis]
    gens = gs if monoid.is_finite else [1]
    action = {}
    for h in gens:
        if h == monoid.one:
            continue
        table = {}
        for k, (a, g, _) in enumerate(basis):
            t = index.get((a, monoid.mul(h, g)))
            if t is not None:
                table[k] = {t: ONE}
        action[h] = table
    bracket = {}
    for k1, (a, g, _) in enumerate(basis):
        for k2, (b, h, _) in enumerate(basis):
            v = base_bracket.get((a, b))
            if not v:
                continue
            gh = monoid.mul(g, h)
            out = {}
            for c, s in v.items():
                t = index.get((c, gh))
                if t is not None:
                    out[t] = s
            if out:
                bracket[(k1, k2)] = out
    return SuspensiveLieAlgebra(monoid, label, degrees, action, bracket, QQ, bound)


def _random_unitriangular(rng: random.Random, n: int) -> list:
    rows = []
    for k in range(n):
        row = {k: ONE}
        for j in range(k):
            c = rng.choice([0, 0, 1, -1, 2])
            if c:
                row[j] = Fraction(c)
        rows.append(row)
    rng.shuffle(rows)
    return rows


def change_basis(L: SuspensiveLieAlgebra, rng: random.Random) -> SuspensiveLieAlgebra:
    """Same algebra written in a random basis of each degree block."""
    new_vectors: list = []
    degrees = []
    for d in L.populated_degrees():
        idx = L.indices_in_degree(d)
        for row in _random_unitriangular(rng, len(idx)):
            new_vectors.append({idx[j]: c for j, c in row.items()})
            degrees.append(d)
    n = L.dim
    # rows [M | I] reduce to [I | M^-1]
    aug = [dict(list(v.items()) + [(n + k, ONE)]) for k, v in enumerate(new_vectors)]
    inv_rows = rref(aug, 2 * n, QQ).rows
    inverse = [{c - n: a for c, a in r.items() if c >= n} for r in inv_rows]

    def to_new(u: dict) -> dict:
        out: dict = {}
        for j, a in u.items():
            axpy(out, a, inverse[j])
        return canonical(out)

    def apply_old(fn, v: dict) -> dict:
        out: dict = {}
        for j, a in v.items():
            axpy(out, a, fn(j))
        return canonical(out)

    action = {}
    for g, table in L.action.items():
        action[g] = {k: to_new(apply_old(lambda j: table.get(j, {}), v)) for k, v in enumerate(new_vectors)}
    bracket = {}
    for a, u in enumerate(new_vectors):
        for b, v in enumerate(new_vectors):
            w = to_new(L.bracket(u, v))
            if w:
                bracket[(a, b)] = w
    names = [f"y{k}" for k in range(n)]
    return SuspensiveLieAlgebra(L.monoid, names, degrees, action, bracket, L.field, L.bound)


def random_torsion_free(seed: int, kind: str = "free", bound: int = 4) -> SuspensiveLieAlgebra:
    """A random torsion-free algebra: a Lie algebra tensored with kG, in a random basis.

    ``kind`` is ``"C2"``, ``"C3"``, ``"V4"`` or ``"free"`` (positive degrees, truncated at ``bound``).
    """
    rng = random.Random(seed)
    if kind == "free":
        monoid = free_rank1("Q")
        a, b = rng.choice([1, 2]), rng.choice([1, 2])
        base_deg = [a, b]
        if rng.random() < 0.75:
            base_deg.append(a + b)
        if rng.random() < 0.5:
            base_deg.append(rng.choice([1, 2, 3]))
        base_deg.sort()
        br = random_lie_algebra(rng, base_deg, lambda a, b: a + b, lambda d: d <= bound)
        L = tensor_with_monoid(monoid, base_deg, br, [f"e{a}" for a in range(len(base_deg))], bound)
    else:
        monoid = {"C2": cyclic_group(2), "C3": cyclic_group(3), "V4": klein_four()}[kind]
        dim = rng.randint(2, 3)
        base_deg = [monoid.one] * dim
        br = random_lie_algebra(rng, base_deg, monoid.mul)
        L = tensor_with_monoid(monoid, base_deg, br, [f"e{a}" for a in range(dim)])
    return change_basis(L, rng)


def random_group_fixture(seed: int) -> SuspensiveLieAlgebra:
    rng = random.Random(seed)
    return random_torsion_free(rng.randrange(1 << 30), rng.choice(["C2", "V4"]))


def random_torsion(seed: int, bound: int = 5) -> SuspensiveLieAlgebra:
    """A random torsion algebra over the free monoid.

    Either abelian with a nilpotent generator action that kills each
    element's own degree, or two-step nilpotent with brackets from higher
    degrees against lower ones into a central part and zero action.
    """
    rng = random.Random(seed)
    monoid = free_rank1("Q")
    if rng.random() < 0.5:
        dims = {d: rng.choice([0, 1, 1, 2]) for d in range(1, bound + 1)}
        dims[rng.randint(1, bound)] += 1
        names, degrees = [], []
        for d, n in dims.items():
            for k in range(n):
                names.append(f"x{d}_{k}")
                degrees.append(d)
        action = {1: {}}
        for i, d in enumerate(degrees):
            # Q . x lands in degree d + 1; it must vanish after d - 1 more steps
            if d == 1 or d + 1 > bound:
                continue
            targets = [j for j, e in enumerate(degrees) if e == d + 1]
            if targets and rng.random() < 0.6:
                action[1][i] = {rng.choice(targets): Fraction(rng.choice([1, -1, 2]))}
        L = SuspensiveLieAlgebra(monoid, names, degrees, action, {}, QQ, bound)
        if not _torsion_ok(L):
            L = SuspensiveLieAlgebra(monoid, names, degrees, {1: {}}, {}, QQ, bound)
        return L
    low = rng.randint(1, max(1, bound // 3))
    high = rng.randint(low + 1, max(low + 1, bound - low))
    names = ["y", "x", "c"]
    degrees = [low, high, low + high]
    if low + high > bound:
        degrees = degrees[:2]
        names = names[:2]
    extra = rng.randint(0, 1)
    for k in range(extra):
        d = rng.randint(1, bound)
        names.append(f"z{k}")
        degrees.append(d)
    bracket = {}
    if len(degrees) >= 3:
        s = Fraction(rng.choice([1, -1, 2]))
        bracket[(1, 0)] = {2: s}
        bracket[(0, 1)] = {2: -s}
    return SuspensiveLieAlgebra(monoid, names, degrees, {1: {}}, bracket, QQ, bound)


def _torsion_ok(L: SuspensiveLieAlgebra) -> bool:
    for i, d in enumerate(L.degrees):
        if 2 * d <= (L.bound if L.bound is not None else 2 * d) and L.act_basis(d, i):
            return False
    return check_suspensive(L).passed


def nonabelian_torsion_counterexample() -> SuspensiveLieAlgebra:
    """Torsion algebra with a nonzero bracket inside one degree orbit: [x, y] = z, |x| = |y| = Q."""
    monoid = free_rank1("Q")
    bracket = {(0, 1): {2: ONE}, (1, 0): {2: -ONE}}
    return SuspensiveLieAlgebra(monoid, ["x", "y", "z"], [1, 1, 2], {1: {}}, bracket, QQ, 4)
