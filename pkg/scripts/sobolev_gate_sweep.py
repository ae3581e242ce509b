#!/usr/bin/env python3
"""Frequency-scale sweep around the embedding threshold s* = d(1/p - 1/q).

Below the threshold the ratio ||x_R||_q / ||x_R||_{L^p_s} must blow up as the
probe's spectral scale R grows; at or above it the ratio stays bounded.  The
sweep makes that visible as a table.
"""

import argparse
import sys
from pathlib import Path

from qeuclid.harness import MoyalBackend, sobolev_scale_sweep


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, default=4 / 3)
    ap.add_argument("--q", type=float, default=4.0)
    # the narrow R=1 probe needs this much window to clear the transform gate
    ap.add_argument("--N", type=int, default=96)
    ap.add_argument("--n", type=int, default=96)
    ap.add_argument("--out", default="sobolev_gate_sweep.csv")
    args = ap.parse_args()

    backend = MoyalBackend(h=1.0, fock_dim=args.N, half_width=8.0, n=args.n)
    thr = backend.dim * (1 / args.p - 1 / args.q)
    scales = [1.0, 1.35, 1.8, 2.3]
    rows = ["s,regime," + ",".join(f"R={R:g}" for R in scales)]
    for s, tag in ((0.75 * thr, "below"), (thr, "at"), (1.25 * thr, "above")):
        ratios = sobolev_scale_sweep(backend, args.p, args.q, s, scales)
        rows.append(f"{s!r},{tag}," + ",".join(repr(r) for r in ratios))
        print(f"s={s:.4g} ({tag}): " + "  ".join(f"{r:.4f}" for r in ratios))

    Path(args.out).write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
