"""Siegel-unit divisors on X_G and the Runge unit.

Everything here is exact integer or rational arithmetic.  The basic datum
is ell(a) = B2({a1})/2; all cusp orders are integer combinations of the
scaled values 12*n^2*ell(x/n) = 6x^2 - 6nx + n^2.
"""

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Sequence, Tuple

from .cusps import CuspClass, CuspOrbit, galois_orbits, runge_condition
from .errors import (
    BoundViolated,
    ModulusMismatch,
    NotDefinedOverQ,
    NotIntegral,
    RankDeficient,
    RungeConditionFailed,
    SigmaNotProper,
)
from .modnt import Mat, SubgroupG, det_image


@dataclass(frozen=True)
class TorsionIndex:
    """Nonzero a = (a1/n, a2/n) in (n^-1 Z/Z)^2, stored by residues mod n."""

    n: int
    a1: int
    a2: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "a1", self.a1 % self.n)
        object.__setattr__(self, "a2", self.a2 % self.n)
        if self.a1 == 0 and self.a2 == 0:
            raise ValueError("torsion index must be nonzero")

    @property
    def order(self) -> int:
        return self.n // gcd(gcd(self.a1, self.a2), self.n)

    def times_matrix(self, m: Mat) -> "TorsionIndex":
        """Right action a -> a*m by a row vector times matrix product."""
        a1, a2 = self.a1, self.a2
        return TorsionIndex(
            self.n, (a1 * m[0] + a2 * m[2]) % self.n, (a1 * m[1] + a2 * m[3]) % self.n
        )


@dataclass(frozen=True)
class CuspDivisor:
    """Divisor supported on cusps: an exact integer order at each class."""

    orders: Dict[CuspClass, int]

    def degree(self) -> int:
        # plain sum over the stored classes (all geometric points)
        return sum(self.orders.values())


def bernoulli2(t: Fraction) -> Fraction:
    """Second Bernoulli polynomial T^2 - T + 1/6 on [0, 1]."""
    t = Fraction(t)
    if t < 0 or t > 1:
        raise ValueError("argument must lie in [0, 1]")
    return t * t - t + Fraction(1, 6)


def ell(a: TorsionIndex) -> Fraction:
    """Half of B2 at the fractional part of a1/n; |ell| <= 1/12."""
    return bernoulli2(Fraction(a.a1, a.n)) / 2


@functools.lru_cache(maxsize=64)
def _ell_table(n: int) -> Tuple[int, ...]:
    # 12*n^2*ell(x/n) as an exact integer, for x in [0, n)
    return tuple(6 * x * x - 6 * n * x + n * n for x in range(n))


def ord_u(n: int, a: TorsionIndex, c: CuspClass) -> int:
    """Order of u_a at a cusp of the full level-n curve: 12 n^2 ell(a*lift)."""
    if a.n != n or c.n != n:
        raise ModulusMismatch(f"expected modulus {n}, got a mod {a.n}, cusp mod {c.n}")
    # only the first column of the lift enters the row-vector product
    x = (a.a1 * c.lift[0] + a.a2 * c.lift[2]) % n
    frac = 6 * n * n * bernoulli2(Fraction(x, n))
    if frac.denominator != 1:
        raise NotIntegral(f"12 n^2 ell = {frac} is not an integer")
    val = int(frac)
    assert val == _ell_table(n)[x]
    assert abs(val) <= n * n
    return val


@functools.lru_cache(maxsize=256)
def _trace_columns(G: SubgroupG, lift: Mat) -> Tuple[Tuple[int, int], ...]:
    # first column of sigma*lift for every sigma in G; the order at the cusp
    # with this lift only ever sees these pairs
    n = G.n
    la, lc = lift[0], lift[2]
    return tuple(
        ((sa * la + sb * lc) % n, (sc * la + sd * lc) % n)
        for sa, sb, sc, sd in G.elements
    )


def ord_w(G: SubgroupG, a: TorsionIndex, c: CuspClass) -> int:
    """Order at the cusp c of X_G of the trace product w_a over G.

    Computed as (width/n) * sum over sigma in G of 12 n^2 ell(a*sigma*lift).
    """
    n = G.n
    if a.n != n or c.n != n:
        raise ModulusMismatch(f"expected modulus {n}, got a mod {a.n}, cusp mod {c.n}")
    if not det_image(G).is_full:
        raise NotDefinedOverQ("trace orders need the determinant map onto (Z/n)*")
    table = _ell_table(n)
    a1, a2 = a.a1, a.a2
    total = sum(table[(a1 * u + a2 * w) % n] for u, w in _trace_columns(G, c.lift))
    frac = Fraction(c.width * total, n)
    if frac.denominator != 1:
        raise NotIntegral(f"width {c.width} times {total} is not divisible by {n}")
    val = int(frac)
    assert abs(val) <= G.order * n * n
    return val


@functools.lru_cache(maxsize=64)
def _column_reps(G: SubgroupG) -> Tuple[TorsionIndex, ...]:
    """Lex-least representatives of nonzero row vectors modulo a -> ±(a*sigma)."""
    n = G.n
    seen = set()
    reps: List[Tuple[int, int]] = []
    for a1 in range(n):
        for a2 in range(n):
            if (a1 == 0 and a2 == 0) or (a1, a2) in seen:
                continue
            orbit = set()
            for sa, sb, sc, sd in G.elements:
                u = (a1 * sa + a2 * sc) % n
                w = (a1 * sb + a2 * sd) % n
                orbit.add((u, w))
                orbit.add(((-u) % n, (-w) % n))
            seen |= orbit
            reps.append(min(orbit))
    reps.sort()
    return tuple(TorsionIndex(n, x, y) for x, y in reps)


@dataclass(frozen=True)
class DivisorMatrix:
    """Exact matrix (ord_c w_a): rows are Galois orbits, columns classes of a."""

    group: SubgroupG
    orbits: Tuple[CuspOrbit, ...]
    columns: Tuple[TorsionIndex, ...]
    entries: Tuple[Tuple[int, ...], ...]
    entry_bound: int


def divisor_matrix(G: SubgroupG) -> DivisorMatrix:
    """Divisor matrix of the w_a, one row per Galois orbit of cusps."""
    orbits = galois_orbits(G)
    cols = _column_reps(G)
    rows = []
    for orbit in orbits:
        rep = orbit.members[0]
        rows.append(tuple(ord_w(G, a, rep) for a in cols))
    bound = G.order * G.n * G.n
    assert all(abs(e) <= bound for row in rows for e in row)
    return DivisorMatrix(G, orbits, cols, tuple(rows), bound)


def weighted_column_sums(M: DivisorMatrix) -> Tuple[int, ...]:
    """Orbit-degree-weighted column sums; zero for divisors of units."""
    degs = [o.degree for o in M.orbits]
    t = len(M.columns)
    return tuple(
        sum(d * M.entries[i][j] for i, d in enumerate(degs)) for j in range(t)
    )


def _int_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    prev = 1
    row = 0
    for col in range(nc):
        piv = next((r for r in range(row, nr) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for r in range(row + 1, nr):
            for c in range(col + 1, nc):
                # Bareiss step: the division is exact
                m[r][c] = (m[row][col] * m[r][c] - m[r][col] * m[row][c]) // prev
            m[r][col] = 0
        prev = m[row][col]
        row += 1
        rank += 1
        if row == nr:
            break
    return rank


def _int_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    a = [list(r) for r in rows]
    k = len(a)
    if any(len(r) != k for r in a):
        raise ValueError("determinant needs a square matrix")
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(k - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                a[r][c] = (a[i][i] * a[r][c] - a[r][i] * a[i][c]) // prev
            a[r][i] = 0
        prev = a[i][i]
    return sign * a[-1][-1]


def divisor_rank(M: DivisorMatrix) -> int:
    """Rank of the divisor matrix over the rationals."""
    return _int_rank(M.entries)


def runge_vector(M: Sequence[Sequence[int]], A: int) -> Tuple[int, ...]:
    """Integer vector b with M*b componentwise positive and small l1 norm.

    Scans columns left to right for the first nonsingular s x s minor S,
    then sets b on those columns by b_k = sign(det S) * det(S with column k
    replaced by all-ones), so that M*b = (|det S|, ..., |det S|).  Hadamard's
    inequality gives l1(b) <= s^(s/2+1) * A^(s-1), checked exactly on squares.
    """
    rows = [list(r) for r in M]
    s = len(rows)
    if s == 0:
        raise ValueError("matrix must have at least one row")
    t = len(rows[0])
    if any(len(r) != t for r in rows):
        raise ValueError("ragged matrix")
    if A < 0 or any(abs(e) > A for r in rows for e in r):
        raise ValueError(f"matrix entries exceed the stated bound {A}")

    chosen: List[int] = []
    for j in range(t):
        cand = chosen + [j]
        sub = [[rows[i][k] for k in cand] for i in range(s)]
        if _int_rank(sub) == len(cand):
            chosen.append(j)
            if len(chosen) == s:
                break
    if len(chosen) < s:
        raise RankDeficient(f"matrix has rank below its row count {s}")

    S = [[rows[i][k] for k in chosen] for i in range(s)]
    d = _int_det(S)
    sign = 1 if d > 0 else -1
    b = [0] * t
    for k in range(s):
        replaced = [row[:k] + [1] + row[k + 1 :] for row in S]
        b[chosen[k]] = sign * _int_det(replaced)
    target = abs(d)
    for i in range(s):
        got = sum(rows[i][j] * b[j] for j in range(t))
        assert got == target, "construction must hit (|d|, ..., |d|)"

    norm = sum(abs(x) for x in b)
    if norm * norm > s ** (s + 2) * A ** (2 * (s - 1)):
        raise BoundViolated(f"l1 norm {norm} exceeds s^(s/2+1) A^(s-1)")
    return tuple(b)


@dataclass(frozen=True)
class RungeUnit:
    """Unit with positive cusp orders on a target orbit set.

    exponents maps a-classes to integers b_a; the unit is prod w_a^(b_a).
    bound_B = s^(s/2+1) (|G| n^2)^(s-1); bound_B_squared is its exact square.
    """

    group: SubgroupG
    s: int
    sigma: Tuple[CuspOrbit, ...]
    exponents: Dict[TorsionIndex, int]
    divisor: CuspDivisor
    l1_norm: int
    bound_B: float
    bound_B_squared: int
    lambda_budget_log2: float
    lambda_budget_relaxed: float


def runge_unit(G: SubgroupG, sigma: Iterable[CuspOrbit], s: int) -> RungeUnit:
    """Unit positive on the orbits in sigma, built by the determinant trick.

    Requires sigma to be a nonempty proper subset of the Galois orbits with
    |sigma| <= s and more orbits than s in total.  Also reports the height
    budgets 12 B |G| n log 2 and 9 B |G| n for the leading coefficient.
    """
    M = divisor_matrix(G)
    orbits = M.orbits
    sig = list(dict.fromkeys(sigma))
    if any(o not in orbits for o in sig):
        raise SigmaNotProper("sigma must consist of Galois orbits of this group")
    if not sig or len(sig) >= len(orbits):
        raise SigmaNotProper("sigma must be a nonempty proper subset of the orbits")
    if not runge_condition(G, s) or len(sig) > s:
        raise RungeConditionFailed(
            f"need |sigma| <= s and more than s orbits; got {len(sig)}, s={s}, "
            f"{len(orbits)} orbits"
        )

    idx = sorted(orbits.index(o) for o in sig)
    b = runge_vector([M.entries[i] for i in idx], M.entry_bound)

    n = G.n
    g = G.order
    exponents = {M.columns[j]: b[j] for j in range(len(b)) if b[j] != 0}
    orbit_orders = [
        sum(b[j] * M.entries[i][j] for j in range(len(b)))
        for i in range(len(orbits))
    ]
    orders: Dict[CuspClass, int] = {}
    for i, orbit in enumerate(orbits):
        for member in orbit.members:
            orders[member] = orbit_orders[i]

    l1 = sum(abs(x) for x in b)
    bound_sq = s ** (s + 2) * (g * n * n) ** (2 * (s - 1))
    assert l1 * l1 <= bound_sq
    for i in idx:
        assert orbit_orders[i] > 0
    for v in orbit_orders:
        # |ord| <= B |G| n^2 everywhere, compared on exact squares
        assert v * v <= bound_sq * (g * n * n) ** 2

    bound_B = math.sqrt(bound_sq)
    return RungeUnit(
        group=G,
        s=s,
        sigma=tuple(orbits[i] for i in idx),
        exponents=exponents,
        divisor=CuspDivisor(orders),
        l1_norm=l1,
        bound_B=bound_B,
        bound_B_squared=bound_sq,
        lambda_budget_log2=12.0 * bound_B * g * n * math.log(2),
        lambda_budget_relaxed=9.0 * bound_B * g * n,
    )
