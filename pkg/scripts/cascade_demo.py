#!/usr/bin/env python3
"""Bootstrap cascade demo: grow the 5-line near-pencil level by level.

Each level targets the (1, n-2) exponent cell; discoveries are certified
exactly and feed the next level. With the default pool bound of 2 the chain
reaches n = 9.

Usage: python scripts/cascade_demo.py [n_max] [out_dir]
"""

import sys
import time

from freelines.fixtures import near_pencil
from freelines.search import ExtensionConfig, cascade, save_catalog


def main(n_max: int = 9, out_dir: str | None = None) -> int:
    seed = near_pencil(5)
    targets = [(1, m - 1) for m in range(5, n_max)]
    t0 = time.time()
    catalog = cascade([seed], n_max, targets=targets, config=ExtensionConfig(pool_bound=2))
    for (n, d1, d2), discs in sorted(catalog.entries.items()):
        print(f"n={n:2d} exponents ({d1},{d2}): {len(discs)} certified")
    print(f"total {catalog.size} arrangements in {time.time() - t0:.1f}s")
    if out_dir:
        index = save_catalog(catalog, out_dir)
        print(f"catalog written, index at {index}")
    return 0


if __name__ == "__main__":
    n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 9
    out = sys.argv[2] if len(sys.argv) > 2 else None
    sys.exit(main(n_max, out))
