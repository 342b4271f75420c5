#!/usr/bin/env python3
"""Fixed-resolution accuracy table: every scheme on the same swirl test.

One row per scheme at h = 1/150, T = tfinal = 1, cosine-product IC.
Takes a few minutes; the biquintic row dominates.  Ends with an
informational line ranking per-step cost (never asserted anywhere:
timings are hardware-dependent, only the ordering is meaningful).
"""

import sys

from jetadv import GridSpec, cosine_product_ic
from jetadv.cli import REPORT_HEADER, SCHEME_CHOICES, run_scheme

# ── parameters ──────────────────────────────────────────────────────────
N = 150
T = 1.0
TFINAL = 1.0
SCHEMES = list(SCHEME_CHOICES)   # all five jet presets plus upwind


def run() -> int:
    grid = GridSpec.unit_square(N)
    ic = cosine_product_ic()
    reports = []
    print(REPORT_HEADER)
    for scheme in SCHEMES:
        _, rep = run_scheme(scheme, grid, T, TFINAL, ic, "swirl")
        print(rep.row(), flush=True)
        reports.append(rep)
    by_cost = sorted(reports, key=lambda r: r.seconds / r.steps)
    ranking = " < ".join(f"{r.scheme} ({r.seconds / r.steps:.3f}s)" for r in by_cost)
    print(f"# per-step cost at h=1/{N}: {ranking}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
