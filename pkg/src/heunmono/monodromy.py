"""Monodromy of the Heun equation by contour integration.

The fundamental 2x2 matrix solution Phi (columns are (y, y') of two basis
solutions, Phi(start) = I) is transported along closed contours with classical
fixed-step RK4.  The returned matrix M = Phi(end) maps initial-value data at
the base point to its analytic continuation; this differs from a convention
acting on solution rows by transpose-inverse and conjugation, so all
downstream criteria use only traces, determinants and conjugation-invariant
tests.

Transport is vectorized over a batch of accessory-parameter values B: the
second-order coefficient is affine in B, so a single pass integrates the
whole batch.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "HeunParams",
    "Contour",
    "MonodromyTriple",
    "ContourError",
    "heun_rhs",
    "darboux_rhs",
    "standard_contour",
    "transport",
    "transport_batch",
    "monodromy_triple",
    "monodromy_triple_batch",
]

DEFAULT_STEP = 4e-4
DEFAULT_RADIUS = 0.2
DEFAULT_BASE = 1j
SINGULARITY_CLEARANCE = 0.02


class ContourError(ValueError):
    """Raised for invalid contours (open paths, singularity too close)."""


@dataclass(frozen=True)
class HeunParams:
    """Exponent parameters, singularity location a and accessory parameter B.

    The Fuchs relation gamma + delta + epsilon = 1 + alpha + beta is enforced
    at construction.
    """

    gamma: complex
    delta: complex
    epsilon: complex
    alpha: complex
    beta: complex
    a: complex
    B: complex = 0.0

    def __post_init__(self):
        vals = [self.gamma, self.delta, self.epsilon, self.alpha, self.beta,
                self.a, self.B]
        if not all(np.isfinite(complex(v)) for v in vals):
            raise ValueError("parameters must be finite")
        fuchs = self.gamma + self.delta + self.epsilon - (1 + self.alpha + self.beta)
        if abs(fuchs) > 1e-10:
            raise ValueError(f"Fuchs relation violated by {abs(fuchs):.2e}")
        if min(abs(complex(self.a)), abs(complex(self.a) - 1)) < 1e-12:
            raise ValueError("singularity a must not collide with 0 or 1")

    def with_accessory(self, B: complex) -> "HeunParams":
        return replace(self, B=B)

    @property
    def singularities(self) -> tuple:
        return (0.0 + 0j, 1.0 + 0j, complex(self.a))


def lame_params(a: complex = -1.0, B: complex = 0.0) -> HeunParams:
    """The Lame special case gamma = delta = epsilon = 1/2, alpha = beta = 1/4."""
    return HeunParams(gamma=0.5, delta=0.5, epsilon=0.5,
                      alpha=0.25, beta=0.25, a=a, B=B)


def heun_rhs(z: complex, state, params: HeunParams):
    """First-order system (y', y'') for the Heun equation at z."""
    z = complex(z)
    for s in params.singularities:
        if abs(z - s) < 1e-6:
            raise ContourError(f"evaluation point {z} too close to pole {s}")
    y, yp = state
    p = params.gamma / z + params.delta / (z - 1) + params.epsilon / (z - params.a)
    q = (params.alpha * params.beta * z - params.B / 4.0) / (
        z * (z - 1) * (z - params.a))
    return np.array([yp, -p * yp - q * y], dtype=complex)


def darboux_rhs(z: complex, state, m, B1: complex, elliptic_data):
    """First-order system for u'' = (sum m_i(m_i+1) wp(z - omega_i) + B') u.

    Provided for cross-validation against the elliptic module; omega_0 = 0.
    """
    from .elliptic import wp

    d = elliptic_data
    offsets = (0.0, d.omega1, d.omega2, d.omega3)
    u, up = state
    pot = B1
    for mi, wi in zip(m, offsets):
        mi = complex(mi)
        if mi * (mi + 1) != 0:
            pot = pot + mi * (mi + 1) * wp(z - wi, d)
    return np.array([up, pot * u], dtype=complex)


@dataclass(frozen=True)
class Contour:
    """A closed path: straight segments and circular arcs, traversed in order.

    segments: tuples ("line", z0, z1) or ("arc", center, radius, theta0, sweep).
    step is the target |dz| per RK4 step.
    """

    base: complex
    segments: tuple
    step: float = DEFAULT_STEP

    def __post_init__(self):
        if self.step <= 0 or not np.isfinite(self.step):
            raise ContourError("step must be positive")
        start = self.segments[0][1] if self.segments[0][0] == "line" else None
        end = _segment_end(self.segments[-1])
        if start is not None and abs(start - self.base) > 1e-12:
            raise ContourError("contour must start at its base point")
        if abs(end - self.base) > 1e-12:
            raise ContourError("contour is not closed")

    def sample_points(self, n_per_segment: int = 64) -> np.ndarray:
        """Coarse samples along the path, for clearance checks and plotting."""
        pts = []
        for seg in self.segments:
            t = np.linspace(0.0, 1.0, n_per_segment)
            if seg[0] == "line":
                _, z0, z1 = seg
                pts.append(z0 + t * (z1 - z0))
            else:
                _, c, r, th0, sweep = seg
                pts.append(c + r * np.exp(1j * (th0 + sweep * t)))
        return np.concatenate(pts)


def _segment_end(seg) -> complex:
    if seg[0] == "line":
        return complex(seg[2])
    _, c, r, th0, sweep = seg
    return c + r * np.exp(1j * (th0 + sweep))


def standard_contour(pole: complex, base: complex = DEFAULT_BASE,
                     radius: float = DEFAULT_RADIUS, step: float = DEFAULT_STEP,
                     avoid=()) -> Contour:
    """Out to the rightmost point of a circle about the pole, once around
    counter-clockwise, and straight back to the base point."""
    pole = complex(pole)
    base = complex(base)
    if abs(pole - base) <= radius:
        raise ContourError("base point lies inside the loop radius")
    attach = pole + radius
    contour = Contour(
        base=base,
        segments=(
            ("line", base, attach),
            ("arc", pole, radius, 0.0, 2 * np.pi),
            ("line", attach, base),
        ),
        step=step,
    )
    others = [s for s in avoid if abs(complex(s) - pole) > 1e-12]
    for s in others:
        if abs(complex(s) - pole) <= radius + SINGULARITY_CLEARANCE:
            raise ContourError(f"radius {radius} reaches singularity {s}")
    clearance_targets = list(others)
    pts = contour.sample_points()
    for s in clearance_targets:
        if np.min(np.abs(pts - complex(s))) < SINGULARITY_CLEARANCE:
            raise ContourError(f"contour passes within clearance of {s}")
    return contour


def _discretize(contour: Contour):
    """RK4 stage points and stage weights for the whole contour.

    Returns (za, zb, zc, wa, wb, wc): arrays over steps, where z* are the
    stage evaluation points (start, midpoint, end) and w* the corresponding
    dz/dparam * h multipliers.
    """
    zs, ws = [], []
    step = contour.step
    for seg in contour.segments:
        if seg[0] == "line":
            _, z0, z1 = seg
            z0, z1 = complex(z0), complex(z1)
            length = abs(z1 - z0)
            n = max(1, int(np.ceil(length / step)))
            h = (z1 - z0) / n
            t = z0 + h * np.arange(n)
            zs.append((t, t + h / 2, t + h))
            w = np.full(n, h)
            ws.append((w, w, w))
        else:
            _, c, r, th0, sweep = seg
            length = abs(sweep) * r
            n = max(1, int(np.ceil(length / step)))
            hth = sweep / n
            th = th0 + hth * np.arange(n)
            stages = []
            weights = []
            for off in (0.0, 0.5, 1.0):
                ang = th + off * hth
                stages.append(c + r * np.exp(1j * ang))
                weights.append(hth * 1j * r * np.exp(1j * ang))
            zs.append(tuple(stages))
            ws.append(tuple(weights))
    za, zb, zc = (np.concatenate([z[i] for z in zs]) for i in range(3))
    wa, wb, wc = (np.concatenate([w[i] for w in ws]) for i in range(3))
    return za, zb, zc, wa, wb, wc


def transport_batch(contour: Contour, params: HeunParams,
                    B_values: np.ndarray, strict: bool = True) -> np.ndarray:
    """Fundamental matrices Phi(end) for a batch of accessory parameters.

    Returns an array of shape (len(B_values), 2, 2).  The Heun coefficient of
    y is affine in B, so the batch shares one pass over the contour.  With
    strict=False, elements that overflow are returned as non-finite entries
    instead of raising (callers mask them out).
    """
    B = np.asarray(B_values, dtype=complex)
    za, zb, zc, wa, wb, wc = _discretize(contour)
    for s in params.singularities:
        d = min(np.min(np.abs(za - s)), np.min(np.abs(zb - s)))
        if d < 1e-6:
            raise ContourError(f"contour passes within {d:.1e} of pole {s}")

    def stage_coeffs(z, w):
        p = (params.gamma / z + params.delta / (z - 1)
             + params.epsilon / (z - params.a))
        g = 1.0 / (z * (z - 1) * (z - params.a))
        return -w * p, -w * params.alpha * params.beta * z * g, w * g / 4.0

    pca, qaa, qba = stage_coeffs(za, wa)
    pcb, qab, qbb = stage_coeffs(zb, wb)
    pcc, qac, qbc = stage_coeffs(zc, wc)

    n = len(B)
    f11 = np.ones(n, complex)
    f12 = np.zeros(n, complex)
    f21 = np.zeros(n, complex)
    f22 = np.ones(n, complex)
    for s in range(len(za)):
        q1 = qaa[s] + B * qba[s]
        q2 = qab[s] + B * qbb[s]
        q3 = qac[s] + B * qbc[s]
        w1, w2, w3 = wa[s], wb[s], wc[s]
        p1, p2, p3 = pca[s], pcb[s], pcc[s]

        k11 = w1 * f21
        k12 = w1 * f22
        k21 = q1 * f11 + p1 * f21
        k22 = q1 * f12 + p1 * f22
        u11 = f11 + 0.5 * k11
        u12 = f12 + 0.5 * k12
        u21 = f21 + 0.5 * k21
        u22 = f22 + 0.5 * k22
        l11 = w2 * u21
        l12 = w2 * u22
        l21 = q2 * u11 + p2 * u21
        l22 = q2 * u12 + p2 * u22
        u11 = f11 + 0.5 * l11
        u12 = f12 + 0.5 * l12
        u21 = f21 + 0.5 * l21
        u22 = f22 + 0.5 * l22
        m11 = w2 * u21
        m12 = w2 * u22
        m21 = q2 * u11 + p2 * u21
        m22 = q2 * u12 + p2 * u22
        u11 = f11 + m11
        u12 = f12 + m12
        u21 = f21 + m21
        u22 = f22 + m22
        n11 = w3 * u21
        n12 = w3 * u22
        n21 = q3 * u11 + p3 * u21
        n22 = q3 * u12 + p3 * u22
        f11 = f11 + (k11 + 2 * l11 + 2 * m11 + n11) / 6.0
        f12 = f12 + (k12 + 2 * l12 + 2 * m12 + n12) / 6.0
        f21 = f21 + (k21 + 2 * l21 + 2 * m21 + n21) / 6.0
        f22 = f22 + (k22 + 2 * l22 + 2 * m22 + n22) / 6.0

    out = np.empty((n, 2, 2), dtype=complex)
    out[:, 0, 0] = f11
    out[:, 0, 1] = f12
    out[:, 1, 0] = f21
    out[:, 1, 1] = f22
    if strict and not np.all(np.isfinite(out.view(float))):
        raise ContourError("transport diverged (step underflow or pole hit)")
    return out


def transport(contour: Contour, params: HeunParams) -> np.ndarray:
    """Fundamental matrix Phi(end) along the contour at params.B."""
    return transport_batch(contour, params, np.array([params.B]))[0]


def transport_ode(contour: Contour, rhs) -> np.ndarray:
    """Generic fixed-step RK4 transport of the fundamental matrix.

    rhs(z, state) maps a 2-vector (y, y') to its z-derivative; used for the
    exactly solvable oracles that validate the integration pipeline.
    """
    za, zb, zc, wa, wb, wc = _discretize(contour)
    phi = np.eye(2, dtype=complex)

    def deriv(z, m):
        cols = [rhs(z, m[:, j]) for j in range(2)]
        return np.column_stack(cols)

    for s in range(len(za)):
        k1 = wa[s] * deriv(za[s], phi)
        k2 = wb[s] * deriv(zb[s], phi + 0.5 * k1)
        k3 = wb[s] * deriv(zb[s], phi + 0.5 * k2)
        k4 = wc[s] * deriv(zc[s], phi + k3)
        phi = phi + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    return phi


@dataclass(frozen=True)
class MonodromyTriple:
    """Monodromy matrices about 0, 1, a and their unit-determinant rescalings."""

    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    P0: np.ndarray
    Q0: np.ndarray
    R0: np.ndarray
    base: complex

    @property
    def exponent_residuals(self) -> dict:
        """|det M - expected| for each loop; large values flag integrator error."""
        return dict(self._residuals)

    # populated by monodromy_triple
    _residuals: tuple = ()


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def monodromy_triple_batch(params: HeunParams, B_values: np.ndarray,
                           step: float = DEFAULT_STEP,
                           radius: float = DEFAULT_RADIUS,
                           base: complex = DEFAULT_BASE,
                           validate: bool = True, strict: bool = True):
    """Batched monodromy matrices (P, Q, R, P0, Q0, R0) over accessory values.

    Each entry is an array of shape (len(B_values), 2, 2).
    """
    sing = params.singularities
    mats = []
    for pole, exponent in zip(sing, (params.gamma, params.delta, params.epsilon)):
        contour = standard_contour(pole, base=base, radius=radius, step=step,
                                   avoid=sing)
        m = transport_batch(contour, params, B_values, strict=strict)
        if validate:
            want = np.exp(-2j * np.pi * complex(exponent))
            errs = np.abs(_det2(m) - want)
            finite = np.isfinite(errs)
            err = np.max(errs[finite]) if np.any(finite) else 0.0
            if err > 1e-4:
                raise ContourError(
                    f"det of loop about {pole} off by {err:.2e}; "
                    "integration is inaccurate at this step size")
        mats.append(m)
    p, q, r = mats
    p0 = np.exp(1j * np.pi * complex(params.gamma)) * p
    q0 = np.exp(1j * np.pi * complex(params.delta)) * q
    r0 = np.exp(1j * np.pi * complex(params.epsilon)) * r
    return p, q, r, p0, q0, r0


def monodromy_triple(params: HeunParams, step: float = DEFAULT_STEP,
                     radius: float = DEFAULT_RADIUS,
                     base: complex = DEFAULT_BASE) -> MonodromyTriple:
    """Monodromy matrices about 0, 1, a at params.B, with rescalings
    P0 = e^{i pi gamma} P etc., and exponent validation."""
    b = np.array([params.B], dtype=complex)
    p, q, r, p0, q0, r0 = monodromy_triple_batch(params, b, step=step,
                                                 radius=radius, base=base)
    residuals = []
    for name, m, expo in (("P", p[0], params.gamma), ("Q", q[0], params.delta),
                          ("R", r[0], params.epsilon)):
        want = np.exp(-2j * np.pi * complex(expo))
        residuals.append((name, abs(_det2(m) - want)))
    t = MonodromyTriple(P=p[0], Q=q[0], R=r[0], P0=p0[0], Q0=q0[0], R0=r0[0],
                        base=complex(base))
    object.__setattr__(t, "_residuals", tuple(residuals))
    return t


def triple_product(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    """The composite loop product in the convention where PQR means
    'traverse the P loop first'.

    With fundamental matrices, continuing a solution basis around loop P and
    then loop Q multiplies the connection matrix on the left, so the product
    is R @ Q @ P.  The trace identity tr(PQR)/sqrt(det) = 2 cos(pi(alpha-beta))
    is the runtime check of this convention (see the test suite).
    """
    return r @ q @ p
