#!/usr/bin/env python3
"""Certify one two-pencil arrangement per admissible exponent cell, n <= n_max.

Prints one line per cell with the multiplicity profile and re-check verdict,
and a final summary. All certificates are exact and re-derived from scratch.

Usage: python scripts/coverage_sweep.py [n_max] [out_dir]
"""

import sys
import time

from freelines.arrangement import intersection_summary, write_arrangement
from freelines.certify import check_certificate, write_certificate
from freelines.search import construct_certified


def main(n_max: int = 20, out_dir: str | None = None) -> int:
    t0 = time.time()
    cells = 0
    for n in range(3, n_max + 1):
        for d1 in range(1, (n - 1) // 2 + 1):
            d2 = n - 1 - d1
            disc = construct_certified(d1, d2)
            ok, failing = check_certificate(disc.arrangement, disc.certificate)
            s = intersection_summary(disc.arrangement)
            print(f"n={n:2d} ({d1:2d},{d2:2d})  b2={s.b2:3d}  t={dict(s.t)}  "
                  f"recheck={'ok' if ok else failing}")
            if not ok:
                return 1
            if out_dir:
                import os

                os.makedirs(out_dir, exist_ok=True)
                base = f"{out_dir}/two_pencil_{d1}x{d2}"
                write_arrangement(base + ".json", disc.arrangement)
                write_certificate(base + ".cert.json", disc.certificate)
            cells += 1
    print(f"{cells} cells certified in {time.time() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    out = sys.argv[2] if len(sys.argv) > 2 else None
    sys.exit(main(n_max, out))
