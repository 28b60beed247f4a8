"""Scan the certified inequality sweeps across seeds and report worst margins.

A margin is the certified distance by which an inequality holds (lower bound
of bound-minus-value); the scan watches how close any sample family gets to
zero as the sample count grows.

Usage:
    python3 scripts/margin_scan.py --samples 500 --seeds 1 2 3
    python3 scripts/margin_scan.py --samples 2000 --precision 192
"""

import argparse
import time
from dataclasses import dataclass
from typing import Dict, List

from rungemod.analytic import run_all_sweeps


@dataclass(frozen=True)
class ScanConfig:
    samples: int
    seeds: List[int]
    precision: int


def scan(cfg: ScanConfig) -> Dict[str, float]:
    worst: Dict[str, float] = {}
    for seed in cfg.seeds:
        t0 = time.monotonic()
        results = run_all_sweeps(
            samples=cfg.samples, seed=seed, precision=cfg.precision
        )
        dt = time.monotonic() - t0
        bad = sum(r.violations + r.indeterminate for r in results)
        print("seed %d: %d families, %.1fs, %d failures" % (seed, len(results), dt, bad))
        for r in results:
            print(
                "  %-12s checked=%d holds=%d margin=%.6g"
                % (r.name, r.checked, r.holds, r.worst_margin)
            )
            if r.name not in worst or r.worst_margin < worst[r.name]:
                worst[r.name] = r.worst_margin
    return worst


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seeds", type=int, nargs="+", default=[42])
    ap.add_argument("--precision", type=int, default=128)
    args = ap.parse_args()

    cfg = ScanConfig(samples=args.samples, seeds=args.seeds, precision=args.precision)
    worst = scan(cfg)
    print("worst margins over %d seed(s):" % len(cfg.seeds))
    for name in sorted(worst):
        print("  %-12s %.6g" % (name, worst[name]))
    if any(m <= 0 for m in worst.values()):
        print("NONPOSITIVE MARGIN: investigate")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
