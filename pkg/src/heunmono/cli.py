"""Command-line interface: classify / monodromy / asymptote / spectrum / convmap.

All numeric defaults are the reference pipeline values (integrator step 4e-4,
loop radius 1/5, finite-difference step 1e-5, 20 iterations, 3% third-trace
tolerance), so a bare invocation reproduces the standard setup.  Matrices in
JSON are encoded row-major as [[re, im], ...] pairs.  Exit codes: 0 success,
1 usage error, 2 numerical failure (machine-readable JSON on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

__all__ = ["main", "run", "build_parser"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems with exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _mat_to_json(m) -> list:
    return [[[complex(x).real, complex(x).imag] for x in row] for row in np.asarray(m)]


def _mat_from_json(rows) -> np.ndarray:
    m = np.array([[complex(re, im) for re, im in row] for row in rows])
    if m.shape != (2, 2):
        raise ValueError("matrices must be 2x2 with [re, im] entries")
    return m


def _c_to_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _add_heun_flags(p, with_B=True):
    p.add_argument("--gamma", type=float, required=True, help="exponent parameter gamma")
    p.add_argument("--delta", type=float, required=True, help="exponent parameter delta")
    p.add_argument("--epsilon", type=float, required=True, help="exponent parameter epsilon")
    p.add_argument("--alpha", type=float, required=True, help="exponent parameter alpha")
    p.add_argument("--beta", type=float, required=True, help="exponent parameter beta")
    p.add_argument("--a-re", type=float, required=True, help="Re of the third singularity a")
    p.add_argument("--a-im", type=float, default=0.0, help="Im of the third singularity a (default 0)")
    if with_B:
        p.add_argument("--B-re", type=float, default=0.0, help="Re of the accessory parameter B (default 0)")
        p.add_argument("--B-im", type=float, default=0.0, help="Im of the accessory parameter B (default 0)")


def _add_solver_flags(p):
    p.add_argument("--step", type=float, default=4e-4,
                   help="integrator arc-length step |dz| (default 4e-4)")
    p.add_argument("--radius", type=float, default=0.2,
                   help="loop radius about each pole (default 1/5)")
    p.add_argument("--fd-step", type=float, default=1e-5,
                   help="finite-difference step h for trace derivatives (default 1e-5)")
    p.add_argument("--max-iters", type=int, default=20,
                   help="Newton iteration cap (default 20)")
    p.add_argument("--newton-tol", type=float, default=1e-8,
                   help="convergence threshold on |epsilon| (default 1e-8)")
    p.add_argument("--accept-tol", type=float, default=0.03,
                   help="third-trace relative acceptance tolerance (default 3%%)")


def _parse_range(text: str):
    """Parse 'm0:m1,n0:n1' (inclusive) into a tuple of (m, n) index pairs."""
    try:
        mpart, npart = text.split(",")
        m0, m1 = (int(x) for x in mpart.split(":"))
        n0, n1 = (int(x) for x in npart.split(":"))
    except ValueError as exc:
        raise _UsageError(f"--range expects 'm0:m1,n0:n1', got {text!r}") from exc
    return tuple((m, n) for m in range(m0, m1 + 1) for n in range(n0, n1 + 1))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heunmono",
                description="Monodromy groups, unitarity and accessory-parameter "
                            "spectra of Heun-class equations")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify",
                       help="decide unitarity of a 2x2 matrix generator set")
    c.add_argument("--input", required=True,
                   help="JSON file: list of 2x2 matrices, entries as [re, im]")
    c.add_argument("--output", help="output JSON path (default stdout)")

    m = sub.add_parser("monodromy",
                       help="monodromy matrices of a Heun equation")
    _add_heun_flags(m)
    m.add_argument("--step", type=float, default=4e-4,
                   help="integrator arc-length step |dz| (default 4e-4)")
    m.add_argument("--radius", type=float, default=0.2,
                   help="loop radius about each pole (default 1/5)")
    m.add_argument("--output", help="output JSON path (default stdout)")

    a = sub.add_parser("asymptote",
                       help="asymptotic accessory eigenvalues on the period lattice")
    a.add_argument("--a-re", type=float, required=True)
    a.add_argument("--a-im", type=float, default=0.0)
    a.add_argument("--m0", type=float, required=True, help="Darboux coupling m0")
    a.add_argument("--m1", type=float, required=True, help="Darboux coupling m1")
    a.add_argument("--m2", type=float, required=True, help="Darboux coupling m2")
    a.add_argument("--m3", type=float, required=True, help="Darboux coupling m3")
    a.add_argument("--range", default="1:3,-1:2",
                   help="seed index range m0:m1,n0:n1 inclusive (default 1:3,-1:2)")
    a.add_argument("--output", help="output CSV path (default stdout)")

    s = sub.add_parser("spectrum",
                       help="Newton sweep over the seed lattice")
    _add_heun_flags(s, with_B=False)
    _add_solver_flags(s)
    s.add_argument("--range", default="1:3,-1:2",
                   help="seed index range m0:m1,n0:n1 inclusive (default 1:3,-1:2)")
    s.add_argument("--output", help="output CSV path (default stdout)")

    v = sub.add_parser("convmap",
                       help="convergence map over a sqrt-B rectangle (binary PPM)")
    _add_heun_flags(v, with_B=False)
    _add_solver_flags(v)
    v.add_argument("--re-min", type=float, default=-7.0)
    v.add_argument("--re-max", type=float, default=7.0)
    v.add_argument("--im-min", type=float, default=-7.0)
    v.add_argument("--im-max", type=float, default=7.0)
    v.add_argument("--width", type=int, default=64)
    v.add_argument("--height", type=int, default=64)
    v.add_argument("--output", required=True, help="output PPM path "
                   "(a JSON sidecar is written next to it)")
    return p


def _heun_params(ns, B=None):
    from .monodromy import HeunParams

    if B is None:
        B = complex(getattr(ns, "B_re", 0.0), getattr(ns, "B_im", 0.0))
    return HeunParams(gamma=ns.gamma, delta=ns.delta, epsilon=ns.epsilon,
                      alpha=ns.alpha, beta=ns.beta,
                      a=complex(ns.a_re, ns.a_im), B=B)


def _solver_config(ns):
    from .spectrum import SolverConfig

    return SolverConfig(fd_step=ns.fd_step, max_iters=ns.max_iters,
                        newton_tol=ns.newton_tol, accept_rel_tol=ns.accept_tol,
                        step=ns.step, radius=ns.radius)


def _emit(text: str, path):
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _cmd_classify(ns) -> int:
    from .unitarity import GeneratorSet, classify

    with open(ns.input) as f:
        mats = json.load(f)
    gens = GeneratorSet(tuple(_mat_from_json(m) for m in mats))
    result = classify(gens)
    _emit(json.dumps(result.to_dict(), indent=2) + "\n", ns.output)
    return 0


def _cmd_monodromy(ns) -> int:
    from .linalg2 import trace
    from .monodromy import monodromy_triple

    params = _heun_params(ns)
    t = monodromy_triple(params, step=ns.step, radius=ns.radius)
    prod = t.R0 @ t.Q0 @ t.P0
    out = {
        "P": _mat_to_json(t.P), "Q": _mat_to_json(t.Q), "R": _mat_to_json(t.R),
        "P0": _mat_to_json(t.P0), "Q0": _mat_to_json(t.Q0), "R0": _mat_to_json(t.R0),
        "traces": {
            "tr_P": _c_to_pair(trace(t.P)),
            "tr_Q": _c_to_pair(trace(t.Q)),
            "tr_R": _c_to_pair(trace(t.R)),
            "tr_P0Q0": _c_to_pair(trace(t.Q0 @ t.P0)),
            "tr_Q0R0": _c_to_pair(trace(t.R0 @ t.Q0)),
            "tr_P0R0": _c_to_pair(trace(t.R0 @ t.P0)),
            "tr_P0Q0R0": _c_to_pair(trace(prod)),
        },
        "exponent_residuals": {k: v for k, v in t.exponent_residuals.items()},
    }
    _emit(json.dumps(out, indent=2) + "\n", ns.output)
    return 0


def _cmd_asymptote(ns) -> int:
    from .elliptic import (DarbouxParams, asymptotic_accessory, periods_from_a,
                           seed_basis)

    d = periods_from_a(complex(ns.a_re, ns.a_im))
    m = DarbouxParams(m0=ns.m0, m1=ns.m1, m2=ns.m2, m3=ns.m3)
    b1, b2 = seed_basis(d)
    rows = []
    for mm, nn in _parse_range(ns.range):
        l0 = mm * b1 + nn * b2
        bp = asymptotic_accessory(l0, m, d) if l0 != 0 else None
        rows.append((mm, nn, l0, bp))
    buf = ["m,n,l0_re,l0_im,Bprime_re,Bprime_im"]
    for mm, nn, l0, bp in rows:
        if bp is None:
            buf.append(f"{mm},{nn},{l0.real:.12g},{l0.imag:.12g},,")
        else:
            buf.append(f"{mm},{nn},{l0.real:.12g},{l0.imag:.12g},"
                       f"{bp.real:.12g},{bp.imag:.12g}")
    _emit("\n".join(buf) + "\n", ns.output)
    return 0


def _cmd_spectrum(ns) -> int:
    from .elliptic import periods_from_a
    from .spectrum import sweep

    params = _heun_params(ns, B=0.0)
    d = periods_from_a(complex(ns.a_re, ns.a_im))
    results = sweep(params, d, index_range=_parse_range(ns.range),
                    cfg=_solver_config(ns))
    buf = ["seed_re,seed_im,B_re,B_im,iters,converged,accepted,"
           "im_tPQ,im_tQR,im_tPR"]
    for r in results:
        buf.append(
            f"{r.seed.real:.12g},{r.seed.imag:.12g},"
            f"{r.B.real:.12g},{r.B.imag:.12g},{r.iterations},"
            f"{str(r.converged).lower()},{str(r.accepted).lower()},"
            f"{r.traces[0].imag:.6g},{r.traces[1].imag:.6g},"
            f"{r.traces[2].imag:.6g}")
    _emit("\n".join(buf) + "\n", ns.output)
    return 0


def _cmd_convmap(ns) -> int:
    from .spectrum import convergence_map, write_ppm

    params = _heun_params(ns, B=0.0)
    cfg = _solver_config(ns)
    region = (ns.re_min, ns.re_max, ns.im_min, ns.im_max)
    rgb, _ = convergence_map(params, region, (ns.width, ns.height), cfg)
    write_ppm(ns.output, rgb)
    sidecar = {
        "region_sqrtB": list(region),
        "resolution": [ns.width, ns.height],
        "params": {"gamma": ns.gamma, "delta": ns.delta, "epsilon": ns.epsilon,
                   "alpha": ns.alpha, "beta": ns.beta,
                   "a": [ns.a_re, ns.a_im]},
        "solver": {"fd_step": ns.fd_step, "max_iters": ns.max_iters,
                   "newton_tol": ns.newton_tol, "accept_rel_tol": ns.accept_tol,
                   "step": ns.step, "radius": ns.radius},
        "format": "P6 maxval 255, row-major, top row at im-max",
    }
    with open(ns.output + ".json", "w") as f:
        json.dump(sidecar, f, indent=2)
        f.write("\n")
    return 0


_DISPATCH = {
    "classify": _cmd_classify,
    "monodromy": _cmd_monodromy,
    "asymptote": _cmd_asymptote,
    "spectrum": _cmd_spectrum,
    "convmap": _cmd_convmap,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1
    try:
        return _DISPATCH[ns.command](ns)
    except _UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except Exception as exc:  # numerical failures: structured report, exit 2
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
