"""Exact 2x2 matrix arithmetic over Z/N and enumerated subgroups of GL2(Z/N).

Matrices are row-major 4-tuples (a, b, c, d) of least nonnegative residues.
Subgroups store their complete element set, so every downstream sum over G
is exact; feasibility is protected by hard caps on modulus and order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import ModulusMismatch, NonInvertibleGenerator, UnsupportedModulus

Mat = Tuple[int, int, int, int]

MAX_USER_MODULUS = 101
MAX_PRESET_MODULUS = 343
MAX_ENUMERATED_ORDER = 20_000_000

PRESET_KINDS = ("split_normalizer", "nonsplit_normalizer", "borel", "full")


def egcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def inv_mod(a: int, n: int) -> int:
    g, x, _ = egcd(a % n, n)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    return x % n


def mat_reduce(m: Sequence[int], n: int) -> Mat:
    a, b, c, d = m
    return (a % n, b % n, c % n, d % n)


def mat_mul(x: Mat, y: Mat, n: int) -> Mat:
    return (
        (x[0] * y[0] + x[1] * y[2]) % n,
        (x[0] * y[1] + x[1] * y[3]) % n,
        (x[2] * y[0] + x[3] * y[2]) % n,
        (x[2] * y[1] + x[3] * y[3]) % n,
    )


def mat_det(m: Mat, n: int) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % n


def mat_inv(m: Mat, n: int) -> Mat:
    di = inv_mod(mat_det(m, n), n)
    return ((m[3] * di) % n, (-m[1] * di) % n, (-m[2] * di) % n, (m[0] * di) % n)


def mat_neg(m: Mat, n: int) -> Mat:
    return ((-m[0]) % n, (-m[1]) % n, (-m[2]) % n, (-m[3]) % n)


def mat_vec(m: Mat, v: Tuple[int, int], n: int) -> Tuple[int, int]:
    """Column vector v -> m*v."""
    return ((m[0] * v[0] + m[1] * v[1]) % n, (m[2] * v[0] + m[3] * v[1]) % n)


def vec_mat(v: Tuple[int, int], m: Mat, n: int) -> Tuple[int, int]:
    """Row vector v -> v*m."""
    return ((v[0] * m[0] + v[1] * m[2]) % n, (v[0] * m[1] + v[1] * m[3]) % n)


def identity_mat() -> Mat:
    return (1, 0, 0, 1)


def minus_identity_mat(n: int) -> Mat:
    return mat_reduce((-1, 0, 0, -1), n)


@dataclass(frozen=True)
class ResidueMatrix:
    """A 2x2 matrix over Z/N with entries stored as least nonnegative residues."""

    n: int
    entries: Mat

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("modulus must be >= 2")
        object.__setattr__(self, "entries", mat_reduce(self.entries, self.n))

    @property
    def det(self) -> int:
        return mat_det(self.entries, self.n)

    @property
    def is_invertible(self) -> bool:
        from math import gcd

        return gcd(self.det, self.n) == 1

    def __mul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if self.n != other.n:
            raise ModulusMismatch(f"moduli differ: {self.n} vs {other.n}")
        return ResidueMatrix(self.n, mat_mul(self.entries, other.entries, self.n))

    def inverse(self) -> "ResidueMatrix":
        if not self.is_invertible:
            raise NonInvertibleGenerator(f"matrix {self.entries} not invertible mod {self.n}")
        return ResidueMatrix(self.n, mat_inv(self.entries, self.n))

    @staticmethod
    def identity(n: int) -> "ResidueMatrix":
        return ResidueMatrix(n, identity_mat())

    @staticmethod
    def minus_identity(n: int) -> "ResidueMatrix":
        return ResidueMatrix(n, minus_identity_mat(n))


@dataclass(frozen=True)
class SubgroupG:
    """A subgroup of GL2(Z/N) with its full element set enumerated.

    `elements` holds raw 4-tuples for cheap hashing in the hot loops; the
    `generators` are kept as ResidueMatrix values for display and for
    orbit searches that only need a generating set.
    """

    n: int
    generators: Tuple[ResidueMatrix, ...]
    elements: FrozenSet[Mat]
    order: int
    contains_minus_one: bool
    label: str = "custom"

    def __post_init__(self) -> None:
        if self.order != len(self.elements):
            raise ValueError("order does not match element count")

    def sl2_part(self) -> FrozenSet[Mat]:
        """Elements of determinant 1."""
        n = self.n
        return frozenset(m for m in self.elements if mat_det(m, n) == 1)

    def generator_mats(self) -> Tuple[Mat, ...]:
        return tuple(g.entries for g in self.generators)


@dataclass(frozen=True)
class DetImage:
    """Image of a subgroup under det, with the full-image flag."""

    n: int
    residues: FrozenSet[int]
    is_full: bool


def unit_count(n: int) -> int:
    """Euler phi."""
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def gl2_order(n: int) -> int:
    """|GL2(Z/N)| = N^4 prod_{p|N} (1 - 1/p)(1 - 1/p^2)."""
    result = n ** 4
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            result = result // p * (p - 1)
            result = result // (p * p) * (p * p - 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        p = m
        result = result // p * (p - 1)
        result = result // (p * p) * (p * p - 1)
    return result


def sl2_order(n: int) -> int:
    return gl2_order(n) // unit_count(n)


def generate_subgroup(
    n: int,
    gens: Sequence[ResidueMatrix],
    *,
    max_modulus: int = MAX_USER_MODULUS,
    max_order: int = MAX_ENUMERATED_ORDER,
    label: str = "custom",
) -> SubgroupG:
    """Closure of `gens` under multiplication, breadth-first.

    Inverses come for free: the closure of a finite set of invertible
    matrices under products is already a group.
    """
    if n < 2 or n > max_modulus:
        raise UnsupportedModulus(f"modulus {n} outside supported range 2..{max_modulus}")
    gen_mats: List[Mat] = []
    for g in gens:
        if g.n != n:
            raise ModulusMismatch(f"generator modulus {g.n} != {n}")
        if not g.is_invertible:
            raise NonInvertibleGenerator(f"generator {g.entries} has det {g.det} mod {n}")
        gen_mats.append(g.entries)

    ident = identity_mat()
    seen: Set[Mat] = {ident}
    frontier: List[Mat] = [ident]
    while frontier:
        nxt: List[Mat] = []
        for m in frontier:
            for g in gen_mats:
                prod = mat_mul(m, g, n)
                if prod not in seen:
                    seen.add(prod)
                    nxt.append(prod)
        if len(seen) > max_order:
            raise UnsupportedModulus(
                f"closure exceeds {max_order} elements; full enumeration is the design contract"
            )
        frontier = nxt

    return SubgroupG(
        n=n,
        generators=tuple(gens),
        elements=frozenset(seen),
        order=len(seen),
        contains_minus_one=minus_identity_mat(n) in seen,
        label=label,
    )


def kernel_level_group(n: int) -> SubgroupG:
    """The subgroup {1, -1}: the curve with full level-N structure."""
    minus = ResidueMatrix.minus_identity(n)
    elems = frozenset({identity_mat(), minus.entries})
    return SubgroupG(
        n=n,
        generators=(minus,),
        elements=elems,
        order=len(elems),
        contains_minus_one=True,
        label=f"kernel:{n}",
    )


def _factorize(n: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def primitive_root(n: int) -> int:
    """Smallest generator of the cyclic group (Z/p^k)^*, p odd."""
    phi = unit_count(n)
    prime_divs = list(_factorize(phi))
    for g in range(2, n):
        if egcd(g, n)[0] != 1:
            continue
        if all(pow(g, phi // q, n) != 1 for q in prime_divs):
            return g
    raise ValueError(f"no primitive root mod {n}")


def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod an odd prime p."""
    squares = {pow(x, 2, p) for x in range(1, p)}
    for eps in range(2, p):
        if eps not in squares:
            return eps
    raise ValueError(f"no non-residue mod {p}")


def _check_preset_modulus(p: int, exponent: int, max_modulus: int) -> int:
    if p < 3 or p % 2 == 0:
        raise UnsupportedModulus(f"preset base must be an odd prime, got {p}")
    for q, _ in _factorize(p).items():
        if q != p:
            raise UnsupportedModulus(f"preset base must be prime, got {p}")
    if exponent < 1:
        raise UnsupportedModulus(f"preset exponent must be >= 1, got {exponent}")
    m = p ** exponent
    if m > max_modulus:
        raise UnsupportedModulus(f"preset modulus {m} exceeds cap {max_modulus}")
    return m


def preset_subgroup(
    kind: str,
    p: int,
    exponent: int = 1,
    *,
    max_modulus: int = MAX_PRESET_MODULUS,
    max_order: int = MAX_ENUMERATED_ORDER,
) -> SubgroupG:
    """Construct one of the named subgroups mod p^exponent directly.

    split_normalizer: diagonal plus antidiagonal invertible matrices.
    nonsplit_normalizer: matrices (a, b*eps; b, a) for a fixed non-residue
    eps, together with the coset by diag(1, -1).
    borel: invertible upper-triangular matrices.
    full: all of GL2(Z/p^exponent).
    """
    if kind not in PRESET_KINDS:
        raise ValueError(f"unknown preset kind {kind!r}; choose from {PRESET_KINDS}")
    m = _check_preset_modulus(p, exponent, max_modulus)
    phi = unit_count(m)
    units = [u for u in range(1, m) if u % p != 0]

    elems: Set[Mat] = set()
    gens: List[ResidueMatrix] = []
    expected: int

    if kind == "split_normalizer":
        for a in units:
            for d in units:
                elems.add((a, 0, 0, d))
                elems.add((0, a, d, 0))
        g = primitive_root(m)
        gens = [
            ResidueMatrix(m, (g, 0, 0, 1)),
            ResidueMatrix(m, (1, 0, 0, g)),
            ResidueMatrix(m, (0, 1, 1, 0)),
        ]
        expected = 2 * phi * phi
    elif kind == "nonsplit_normalizer":
        eps = smallest_nonresidue(p)
        for a in range(m):
            for b in range(m):
                if a % p == 0 and b % p == 0:
                    continue
                elems.add((a, (b * eps) % m, b, a))
                elems.add((a, (b * eps) % m, (-b) % m, (-a) % m))
        eta = ResidueMatrix(m, (1, 0, 0, -1))
        gens = _nonsplit_generators(m, p, eps) + [eta]
        expected = 2 * p ** (2 * (exponent - 1)) * (p * p - 1)
    elif kind == "borel":
        if phi * phi * m > max_order:
            raise UnsupportedModulus(
                f"borel mod {m} has {phi * phi * m} elements, above the cap {max_order}"
            )
        for a in units:
            for d in units:
                for b in range(m):
                    elems.add((a, b, 0, d))
        g = primitive_root(m)
        gens = [
            ResidueMatrix(m, (g, 0, 0, 1)),
            ResidueMatrix(m, (1, 0, 0, g)),
            ResidueMatrix(m, (1, 1, 0, 1)),
        ]
        expected = phi * phi * m
    else:  # full
        expected = gl2_order(m)
        if expected > max_order:
            raise UnsupportedModulus(
                f"GL2(Z/{m}) has {expected} elements, above the cap {max_order}"
            )
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    for d in range(m):
                        if (a * d - b * c) % p != 0:
                            elems.add((a, b, c, d))
        g = primitive_root(m)
        gens = [
            ResidueMatrix(m, (g, 0, 0, 1)),
            ResidueMatrix(m, (1, 1, 0, 1)),
            ResidueMatrix(m, (0, -1, 1, 0)),
        ]

    if len(elems) != expected:
        raise AssertionError(
            f"preset {kind} mod {m}: got {len(elems)} elements, expected {expected}"
        )
    group = SubgroupG(
        n=m,
        generators=tuple(gens),
        elements=frozenset(elems),
        order=len(elems),
        contains_minus_one=minus_identity_mat(m) in elems,
        label=f"{_PRESET_SHORT[kind]}:{p}" + (f"^{exponent}" if exponent > 1 else ""),
    )
    if not group.contains_minus_one:
        raise AssertionError(f"preset {kind} mod {m} lost -1")
    return group


def _nonsplit_generators(m: int, p: int, eps: int) -> List[ResidueMatrix]:
    """Generators of the nonsplit torus mod m = p^k.

    A Teichmueller-type element of maximal prime-to-p order plus, for k > 1,
    the two standard pro-p generators 1+p and 1+p*sqrt(eps).
    """
    target = p * p - 1

    def mat_of(a: int, b: int) -> Mat:
        return (a % m, (b * eps) % m, b % m, a % m)

    def order_of(mat: Mat) -> int:
        k = 1
        cur = mat
        ident = identity_mat()
        while cur != ident:
            cur = mat_mul(cur, mat, m)
            k += 1
            if k > m * m:
                raise AssertionError("runaway order computation")
        return k

    gen: Optional[Mat] = None
    for a in range(p):
        for b in range(1, p):
            cand = mat_of(a, b)
            if mat_det(cand, m) % p == 0:
                continue
            if order_of(cand) % target == 0:
                gen = cand
                break
        if gen is not None:
            break
    if gen is None:
        raise AssertionError(f"no generator of the nonsplit torus mod {p}")
    out = [ResidueMatrix(m, gen)]
    if m != p:
        out.append(ResidueMatrix(m, ((1 + p) % m, 0, 0, (1 + p) % m)))
        out.append(ResidueMatrix(m, (1, (p * eps) % m, p % m, 1)))
    return out


_PRESET_SHORT = {
    "split_normalizer": "split",
    "nonsplit_normalizer": "nonsplit",
    "borel": "borel",
    "full": "full",
}

_PRESET_LONG = {short: long for long, short in _PRESET_SHORT.items()}


def det_image(G: SubgroupG) -> DetImage:
    """Image of G under det, as a subset of (Z/N)^*."""
    n = G.n
    residues = frozenset(mat_det(m, n) for m in G.elements)
    return DetImage(n=n, residues=residues, is_full=len(residues) == unit_count(n))


def parse_preset(token: str, **kwargs) -> SubgroupG:
    """Parse `split:5`, `nonsplit:7`, `borel:3^2`, `full:5` shorthand."""
    if ":" not in token:
        raise ValueError(f"preset shorthand must look like kind:p or kind:p^n, got {token!r}")
    short, _, tail = token.partition(":")
    if short not in _PRESET_LONG:
        raise ValueError(f"unknown preset {short!r}; choose from {sorted(_PRESET_LONG)}")
    if "^" in tail:
        p_str, _, n_str = tail.partition("^")
    else:
        p_str, n_str = tail, "1"
    try:
        p, exponent = int(p_str), int(n_str)
    except ValueError as exc:
        raise ValueError(f"bad preset modulus in {token!r}") from exc
    return preset_subgroup(_PRESET_LONG[short], p, exponent, **kwargs)


def parse_group_text(text: str, **kwargs) -> SubgroupG:
    """Parse the group-definition text format.

    First line `N=<modulus>`, then one generator per line as four
    integers `a b c d` (row-major).  Blank lines and `#` comments allowed.
    """
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines or not lines[0].replace(" ", "").upper().startswith("N="):
        raise ValueError("group file must start with a line N=<modulus>")
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise ValueError(f"bad modulus line {lines[0]!r}") from exc
    gens: List[ResidueMatrix] = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise ValueError(f"generator line must have 4 integers, got {ln!r}")
        a, b, c, d = (int(x) for x in parts)
        gens.append(ResidueMatrix(n, (a, b, c, d)))
    return generate_subgroup(n, gens, **kwargs)
