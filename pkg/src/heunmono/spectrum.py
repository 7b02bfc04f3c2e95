"""Accessory-parameter eigenvalue search by a two-trace Newton iteration.

At an eigenvalue of the accessory parameter B the rescaled monodromy triple
(P0, Q0, R0) generates a unitary group, so the pairwise traces
t_PQ = tr(P0 Q0) and t_QR = tr(Q0 R0) are real.  The solver drives both
imaginary parts to zero simultaneously: with one-sided finite-difference
derivatives nu = dt_PQ/dB and mu = dt_QR/dB, the complex update

    epsilon = (conj(mu) Im t_PQ - conj(nu) Im t_QR) / Im(conj(nu) mu)

is the exact solution of the linearized pair Im(t_PQ + nu*eps) = 0,
Im(t_QR + mu*eps) = 0.  Convergence is declared on |epsilon|; acceptance
additionally requires the third trace t_PR to be real within a relative
tolerance.  All heavy work is vectorized over seeds/pixels, which share the
contour integration pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .monodromy import DEFAULT_BASE, DEFAULT_RADIUS, DEFAULT_STEP, HeunParams, \
    monodromy_triple_batch

__all__ = [
    "SolverConfig",
    "SpectrumResult",
    "DegenerateLinearizationError",
    "traces_at",
    "newton_epsilon",
    "solve_from_seed",
    "sweep",
    "convergence_map",
    "reference_seed_indices",
]

#: the 3 x 4 grid of seed lattice indices used for the reference sweeps
reference_seed_indices = tuple((m, n) for m in (1, 2, 3) for n in (-1, 0, 1, 2))


class DegenerateLinearizationError(ArithmeticError):
    """The two trace derivatives are real-parallel; the 2x2 system is singular."""


@dataclass(frozen=True)
class SolverConfig:
    """Newton-solver and integrator settings (defaults are the reference
    pipeline values: |dz| = 4e-4, loop radius 1/5, h = 1e-5, 20 iterations,
    3% third-trace tolerance)."""

    fd_step: float = 1e-5
    max_iters: int = 20
    newton_tol: float = 1e-8
    accept_rel_tol: float = 0.03
    step: float = DEFAULT_STEP
    radius: float = DEFAULT_RADIUS
    base: complex = DEFAULT_BASE
    central_diff: bool = False

    def __post_init__(self):
        if not (self.fd_step > 0 and self.max_iters > 0 and self.newton_tol > 0
                and 0 < self.accept_rel_tol < 1 and self.step > 0
                and self.radius > 0):
            raise ValueError("solver configuration values must be positive "
                             "(accept_rel_tol < 1)")


@dataclass(frozen=True)
class SpectrumResult:
    """Outcome of one Newton run from one seed."""

    seed: complex
    B: complex
    traces: tuple  # (t_PQ, t_QR, t_PR)
    iterations: int
    converged: bool
    accepted: bool
    residual_imag: tuple  # |Im| of the three traces
    beukers_ok: Optional[bool] = None


def _traces_batch(B: np.ndarray, params: HeunParams, cfg: SolverConfig,
                  strict: bool = False):
    """(t_PQ, t_QR, t_PR) arrays for a batch of accessory parameters."""
    _, _, _, p0, q0, r0 = monodromy_triple_batch(
        params, np.asarray(B, complex), step=cfg.step, radius=cfg.radius,
        base=cfg.base, validate=strict, strict=strict)
    t_pq = np.einsum("nij,nji->n", p0, q0)
    t_qr = np.einsum("nij,nji->n", q0, r0)
    t_pr = np.einsum("nij,nji->n", p0, r0)
    return t_pq, t_qr, t_pr


def traces_at(B: complex, base_params: HeunParams, cfg: SolverConfig = None):
    """(tr P0Q0, tr Q0R0, tr P0R0) at accessory parameter B."""
    cfg = cfg or SolverConfig()
    t_pq, t_qr, t_pr = _traces_batch(np.array([B]), base_params, cfg,
                                     strict=True)
    return complex(t_pq[0]), complex(t_qr[0]), complex(t_pr[0])


def newton_epsilon(t_pq: complex, t_qr: complex, nu: complex,
                   mu: complex) -> complex:
    """The update solving the linearized two-trace system exactly."""
    denom = (np.conj(nu) * mu).imag
    if abs(denom) <= 1e-14:
        raise DegenerateLinearizationError(
            "trace derivatives are parallel over R")
    return (np.conj(mu) * complex(t_pq).imag
            - np.conj(nu) * complex(t_qr).imag) / denom


def _solve_batch(seeds_B: np.ndarray, params: HeunParams, cfg: SolverConfig,
                 fixed_iterations: bool = False):
    """Vectorized Newton iteration from an array of accessory-parameter seeds.

    Returns (B, iterations, converged, failed, traces) where traces are the
    final (t_PQ, t_QR, t_PR) arrays.  With fixed_iterations=True every seed
    runs exactly cfg.max_iters steps (the convergence-map contract).
    """
    B = np.asarray(seeds_B, dtype=complex).copy()
    n = len(B)
    active = np.ones(n, dtype=bool)
    converged = np.zeros(n, dtype=bool)
    failed = np.zeros(n, dtype=bool)
    retried = np.zeros(n, dtype=bool)
    iterations = np.zeros(n, dtype=int)
    h = cfg.fd_step

    for _ in range(cfg.max_iters):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        if cfg.central_diff:
            stacked = np.concatenate([B[idx] - h, B[idx] + h, B[idx]])
            t_pq, t_qr, t_pr = _traces_batch(stacked, params, cfg)
            k = len(idx)
            nu = (t_pq[k:2 * k] - t_pq[:k]) / (2 * h)
            mu = (t_qr[k:2 * k] - t_qr[:k]) / (2 * h)
            t_pq, t_qr = t_pq[2 * k:], t_qr[2 * k:]
            t_pr = t_pr[2 * k:]
        else:
            stacked = np.concatenate([B[idx], B[idx] + h])
            t_pq, t_qr, t_pr = _traces_batch(stacked, params, cfg)
            k = len(idx)
            nu = (t_pq[k:] - t_pq[:k]) / h
            mu = (t_qr[k:] - t_qr[:k]) / h
            t_pq, t_qr, t_pr = t_pq[:k], t_qr[:k], t_pr[:k]

        with np.errstate(all="ignore"):
            denom = (np.conj(nu) * mu).imag
            eps = (np.conj(mu) * t_pq.imag - np.conj(nu) * t_qr.imag) / denom

        bad = ~np.isfinite(eps) | (np.abs(denom) <= 1e-14)
        # one retry from a slightly perturbed point when the linearization
        # degenerates; persistent degeneracy is reported as failure
        retry = bad & ~retried[idx]
        give_up = bad & retried[idx]
        retried[idx[retry]] = True
        B[idx[retry]] += 1e-3 * (1.0 + np.abs(B[idx[retry]]))
        failed[idx[give_up]] = True
        active[idx[give_up]] = False

        good = ~bad
        gi = idx[good]
        B[gi] += eps[good]
        iterations[gi] += 1
        # freeze lanes that have flown off to where the transport overflows;
        # leaving them active poisons the batch with slow NaN arithmetic
        huge = np.abs(B[gi]) > 1e4
        failed[gi[huge]] = True
        active[gi[huge]] = False
        if not fixed_iterations:
            done = np.zeros(len(idx), dtype=bool)
            done[good] = np.abs(eps[good]) < cfg.newton_tol
            converged[idx[done]] = True
            active[idx[done]] = False

    safe_B = np.where(failed | ~np.isfinite(B), 0.0, B)
    t_pq, t_qr, t_pr = _traces_batch(safe_B, params, cfg)
    finite = np.isfinite(B) & np.isfinite(t_pq) & np.isfinite(t_qr) \
        & np.isfinite(t_pr)
    failed |= ~finite
    return B, iterations, converged, failed, (t_pq, t_qr, t_pr)


def _result_from_arrays(seed, B, iters, converged, failed, traces,
                        params: HeunParams, cfg: SolverConfig) -> SpectrumResult:
    t_pq, t_qr, t_pr = (complex(t) for t in traces)
    res = (abs(t_pq.imag), abs(t_qr.imag), abs(t_pr.imag))
    accepted = bool(
        converged and not failed
        and res[0] <= 1e-6 * max(1.0, abs(t_pq))
        and res[1] <= 1e-6 * max(1.0, abs(t_qr))
        and res[2] <= cfg.accept_rel_tol * max(1.0, abs(t_pr)))
    beukers = None
    if _is_lame(params):
        from .unitarity import beukers_inequality
        beukers = beukers_inequality(t_pq.real, t_qr.real) if accepted else False
    return SpectrumResult(seed=complex(seed), B=complex(B),
                          traces=(t_pq, t_qr, t_pr), iterations=int(iters),
                          converged=bool(converged and not failed),
                          accepted=accepted, residual_imag=res,
                          beukers_ok=beukers)


def _is_lame(params: HeunParams) -> bool:
    return all(abs(complex(x) - 0.5) < 1e-12
               for x in (params.gamma, params.delta, params.epsilon))


def solve_from_seed(seed_B: complex, base_params: HeunParams,
                    cfg: SolverConfig = None) -> SpectrumResult:
    """Run the Newton iteration from one accessory-parameter seed."""
    cfg = cfg or SolverConfig()
    B, it, conv, fail, traces = _solve_batch(np.array([seed_B]), base_params, cfg)
    return _result_from_arrays(seed_B, B[0], it[0], conv[0], fail[0],
                               tuple(t[0] for t in traces), base_params, cfg)


def sweep(base_params: HeunParams, elliptic_data, index_range=None,
          cfg: SolverConfig = None) -> list:
    """Solve from every seed of the asymptotic lattice and deduplicate.

    Seeds are sqrt-B lattice points ell0; B_init = ell0^2.  Converged results
    within 1e-4 of an earlier one (in B) are dropped.
    """
    from .elliptic import seed_lattice
    from .unitarity import heun_reducibility_guard
    import warnings

    cfg = cfg or SolverConfig()
    if heun_reducibility_guard(base_params):
        warnings.warn("exponent parameters lie on the possibly-reducible "
                      "locus; trace-based acceptance may be unreliable")
    if index_range is None:
        index_range = reference_seed_indices
    ell0 = seed_lattice(elliptic_data, index_range)
    seeds = np.array([l * l for l in ell0], dtype=complex)
    B, iters, conv, fail, traces = _solve_batch(seeds, base_params, cfg)
    results = []
    kept_B = []
    for i in range(len(seeds)):
        r = _result_from_arrays(seeds[i], B[i], iters[i], conv[i], fail[i],
                                tuple(t[i] for t in traces), base_params, cfg)
        if r.converged and any(abs(r.B - b) < 1e-4 for b in kept_B):
            continue
        if r.converged:
            kept_B.append(r.B)
        results.append(r)
    return results


def convergence_map(base_params: HeunParams, region, resolution,
                    cfg: SolverConfig = None):
    """Domain-colored map of the Newton endpoint over a sqrt-B rectangle.

    region = (re_min, re_max, im_min, im_max) in the sqrt-B plane;
    resolution = (width, height).  Every pixel seeds B = (sqrt-B coord)^2 and
    runs exactly cfg.max_iters iterations; the final B is rendered by HSV
    domain coloring (hue = arg B, value saturating with |B|).  Failed pixels
    are black.  Returns (rgb, final_B) with rgb row-major uint8 of shape
    (height, width, 3), top row at im_max.
    """
    cfg = cfg or SolverConfig()
    w, h = resolution
    if w * h > 4096 * 4096:
        raise ValueError("resolution exceeds the 4096x4096 resource guard")
    re_min, re_max, im_min, im_max = region
    xs = re_min + (np.arange(w) + 0.5) * (re_max - re_min) / w
    ys = im_max - (np.arange(h) + 0.5) * (im_max - im_min) / h
    sqrt_b = xs[None, :] + 1j * ys[:, None]
    seeds = (sqrt_b ** 2).ravel()
    B, _, _, failed, _ = _solve_batch(seeds, base_params, cfg,
                                      fixed_iterations=True)
    rgb = _domain_color(B, failed).reshape(h, w, 3)
    return rgb, B.reshape(h, w)


def _domain_color(B: np.ndarray, failed: np.ndarray,
                  value_scale: float = 50.0) -> np.ndarray:
    """HSV domain coloring: hue = arg(B), value = |B|/(|B| + scale)."""
    with np.errstate(all="ignore"):
        hue = (np.angle(B) / (2 * np.pi)) % 1.0
        mag = np.abs(B)
        val = mag / (mag + value_scale)
    hue = np.where(failed, 0.0, hue)
    sat = np.where(failed, 0.0, 1.0)
    lum = np.where(failed, 0.0, 0.25 + 0.75 * val)
    return _hsv_to_rgb_u8(hue, sat, lum)


def _hsv_to_rgb_u8(h, s, v):
    """Standard HSV -> RGB on arrays in [0,1), returned as uint8."""
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    rgb = np.stack([r, g, b], axis=-1)
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)


def write_ppm(path, rgb: np.ndarray) -> None:
    """Write a row-major uint8 RGB array as a binary P6 PPM (maxval 255)."""
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(rgb.tobytes())
