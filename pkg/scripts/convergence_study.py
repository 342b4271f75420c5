#!/usr/bin/env python3
"""Error-vs-resolution study for the three jet schemes plus the upwind
reference.  Emits one CSV block per scheme on stdout; the `order` column
holds the pairwise empirical rate between consecutive spacings."""

import sys

from jetadv.cli import main

# ── parameters ──────────────────────────────────────────────────────────
H_LIST = "1/25,1/50,1/100"
SCHEMES = ["bilinear", "bicubic", "biquintic", "upwind"]
T = "1"          # swirl reversal period
TFINAL = "1"     # one full period: exact solution equals the IC


def run() -> int:
    for scheme in SCHEMES:
        print(f"# scheme {scheme}, h in {{{H_LIST}}}, T = tfinal = {TFINAL}")
        code = main(["converge", "--scheme", scheme, "--h-list", H_LIST,
                     "--T", T, "--tfinal", TFINAL])
        if code != 0:
            return code
        print()
    return 0


if __name__ == "__main__":
    sys.exit(run())
