"""Tabulate cusp counts, widths and orbit degrees across a prime range.

Usage:
    python3 scripts/cusp_census.py --kind split --max-p 101
    python3 scripts/cusp_census.py --kind borel --max-p 31 --check
"""

import argparse
from dataclasses import dataclass
from typing import List

from rungemod.cusps import enumerate_cusps, galois_orbits, sl2_index
from rungemod.modnt import parse_preset


@dataclass(frozen=True)
class CensusRow:
    p: int
    cusps: int
    index: int
    degrees: List[int]
    widths: List[int]


def primes_to(bound: int) -> List[int]:
    sieve = [True] * (bound + 1)
    sieve[0] = sieve[1] = False
    for i in range(2, int(bound ** 0.5) + 1):
        if sieve[i]:
            for k in range(i * i, bound + 1, i):
                sieve[k] = False
    return [p for p in range(3, bound + 1) if sieve[p]]


def census(kind: str, max_p: int) -> List[CensusRow]:
    rows = []
    for p in primes_to(max_p):
        G = parse_preset("%s:%d" % (kind, p))
        cusps = enumerate_cusps(G)
        orbits = galois_orbits(G)
        rows.append(
            CensusRow(
                p=p,
                cusps=len(cusps),
                index=sl2_index(G),
                degrees=sorted(o.degree for o in orbits),
                widths=sorted(set(c.width for c in cusps)),
            )
        )
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", default="split", choices=["split", "borel", "full"])
    ap.add_argument("--max-p", type=int, default=101)
    ap.add_argument(
        "--check",
        action="store_true",
        help="assert the split-normalizer census identities (p+1)/2 and {1,(p-1)/2}",
    )
    args = ap.parse_args()

    rows = census(args.kind, args.max_p)
    print("%5s %6s %7s  %-18s %s" % ("p", "cusps", "index", "orbit degrees", "widths"))
    for r in rows:
        print("%5d %6d %7d  %-18s %s" % (r.p, r.cusps, r.index, r.degrees, r.widths))
        if args.check and args.kind == "split":
            assert r.cusps == (r.p + 1) // 2
            assert r.degrees == sorted([1, (r.p - 1) // 2])
    if args.check and args.kind == "split":
        print("census identities hold for all %d primes" % len(rows))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
