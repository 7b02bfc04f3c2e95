#!/usr/bin/env python3
"""Render the Newton-basin convergence map of the Lame accessory problem.

Each pixel of a rectangle in the sqrt(B) plane seeds the two-trace Newton
iteration with B = pixel^2 and runs a fixed number of iterations; the final
B is rendered by domain coloring (hue = arg B, brightness grows with |B|).
Basins of attraction appear as large constant-colored cells around each
eigenvalue of the accessory parameter.

The output is a binary PPM (P6) plus a JSON sidecar recording every setting,
so identical invocations are byte-identical.
"""

import argparse
import sys
import time

from heunmono.monodromy import lame_params
from heunmono.spectrum import SolverConfig, convergence_map, write_ppm


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=64,
                    help="pixels per side (default 64)")
    ap.add_argument("--extent", type=float, default=7.0,
                    help="half-width of the sqrt(B) square (default 7)")
    ap.add_argument("--step", type=float, default=4e-4,
                    help="integrator step |dz| (default 4e-4; use 2e-3 for "
                         "a quick preview)")
    ap.add_argument("--output", default="lame_map.ppm",
                    help="output PPM path (default lame_map.ppm)")
    ns = ap.parse_args(argv)

    cfg = SolverConfig(step=ns.step)
    region = (-ns.extent, ns.extent, -ns.extent, ns.extent)
    print(f"rendering {ns.size}x{ns.size} map over sqrt(B) in "
          f"[{-ns.extent}, {ns.extent}]^2, {cfg.max_iters} iterations/pixel")
    t0 = time.time()
    rgb, _ = convergence_map(lame_params(), region, (ns.size, ns.size), cfg)
    write_ppm(ns.output, rgb)
    print(f"wrote {ns.output} in {time.time() - t0:.0f}s "
          f"({ns.size * ns.size} Newton runs, batched)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
