"""Weierstrass elliptic machinery for the Heun <-> Darboux correspondence.

Half-periods are recovered from the third singularity location a of the Heun
equation: the branch values e_i are the zero-sum shift of the roots {0, 1, a}
of 4x(x-1)(x-a), assigned so that the substitution wp = e1 + (e2 - e1)*x is
consistent (e1 is the image of the root 0, e2 of the root 1, e3 of the root a).
Complete period integrals are evaluated by the complex arithmetic-geometric
mean; wp and zeta are evaluated by the Laurent series about the nearest
lattice point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "EllipticData",
    "DarbouxParams",
    "PeriodError",
    "heun_to_darboux_params",
    "periods_from_a",
    "agm_half_periods",
    "quadrature_half_periods",
    "seed_basis",
    "wp",
    "wp_prime",
    "wzeta",
    "asymptotic_accessory",
    "seed_lattice",
]

_SERIES_TERMS = 96
_LATTICE_PROX_TOL = 1e-8


class PeriodError(ValueError):
    """Raised when the period computation fails to satisfy its invariants."""


@dataclass(frozen=True)
class EllipticData:
    """Half-periods, branch values and quasi-periods of a lattice.

    Invariants (validated by periods_from_a): e1 + e2 + e3 = 0, the Legendre
    relation eta1*omega2 - eta2*omega1 = pi*i/2, Im(omega2/omega1) > 0, and
    area = 4*Im(conj(omega1)*omega2) > 0.
    """

    omega1: complex
    omega2: complex
    omega3: complex
    e1: complex
    e2: complex
    e3: complex
    eta1: complex
    eta2: complex
    area: float
    g2: complex
    g3: complex


@dataclass(frozen=True)
class DarbouxParams:
    """Exponent parameters m_i and accessory parameter B' of the Darboux form."""

    m0: complex
    m1: complex
    m2: complex
    m3: complex
    B1: complex | None = None

    @property
    def unitarity_admissible(self) -> bool:
        """Each m_i real, or with real part in (1/2)Z, within 1e-9."""
        for m in (self.m0, self.m1, self.m2, self.m3):
            m = complex(m)
            if abs(m.imag) <= 1e-9:
                continue
            if abs(2 * m.real - round(2 * m.real)) <= 1e-9:
                continue
            return False
        return True

    def coupling_sum(self) -> complex:
        """sum of m_i (m_i + 1) over the four exponents."""
        return sum(m * (m + 1) for m in (self.m0, self.m1, self.m2, self.m3))


def heun_to_darboux_params(params) -> DarbouxParams:
    """Map Heun exponent parameters to Darboux m-parameters.

    m0 = alpha - beta - 1/2, m1 = 1/2 - gamma, m2 = 1/2 - delta,
    m3 = 1/2 - epsilon.  The accessory offset between B and B' is not
    computed here (B1 stays unset).
    """
    return DarbouxParams(
        m0=params.alpha - params.beta - 0.5,
        m1=0.5 - params.gamma,
        m2=0.5 - params.delta,
        m3=0.5 - params.epsilon,
    )


def _agm(a: complex, b: complex, tol: float = 1e-13) -> complex:
    """Complex AGM with the optimal square-root branch at every step."""
    a, b = complex(a), complex(b)
    for _ in range(200):
        if abs(a - b) <= tol * max(1.0, abs(a)):
            return (a + b) / 2
        am = (a + b) / 2
        gm = np.sqrt(a) * np.sqrt(b)
        # right choice: |am - gm| <= |am + gm|
        if abs(am - gm) > abs(am + gm):
            gm = -gm
        a, b = am, gm
    raise PeriodError("AGM did not converge (degenerate lattice?)")


@lru_cache(maxsize=64)
def _laurent_coeffs(g2: complex, g3: complex, n: int = _SERIES_TERMS) -> tuple:
    """Coefficients c_k of wp(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)."""
    c = np.zeros(n + 1, dtype=complex)
    c[2] = g2 / 20.0
    c[3] = g3 / 28.0
    for k in range(4, n + 1):
        s = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3.0 * s / ((2 * k + 1) * (k - 3))
    return tuple(c)


def _reduced_basis(w1: complex, w2: complex) -> tuple[complex, complex]:
    """Lagrange-reduce a lattice basis (shortest vectors, |b1| <= |b2|)."""
    b1, b2 = complex(w1), complex(w2)
    if abs(b1) > abs(b2):
        b1, b2 = b2, b1
    for _ in range(64):
        mu = (b2.real * b1.real + b2.imag * b1.imag) / abs(b1) ** 2
        b2 = b2 - round(mu) * b1
        if abs(b2) >= abs(b1):
            break
        b1, b2 = b2, b1
    return b1, b2


class _Lattice:
    """Evaluation helper for wp, wp' and zeta on a fixed period lattice.

    Works in a Lagrange-reduced basis of the full lattice.  Values are
    computed by the Laurent series about the nearest lattice point, with
    argument halving and the duplication formulas when the reduced point is
    outside the series' comfortable radius.
    """

    _SERIES_RADIUS = 0.45  # fraction of the shortest lattice vector

    def __init__(self, omega1: complex, omega2: complex, g2: complex, g3: complex):
        self.g2, self.g3 = complex(g2), complex(g3)
        r1, r2 = _reduced_basis(2 * omega1, 2 * omega2)
        self.r1, self.r2 = r1, r2
        self.rmin = abs(r1)
        m = np.array([[r1.real, r2.real], [r1.imag, r2.imag]])
        self._minv = np.linalg.inv(m)
        # zeta increments across the reduced basis (no reduction involved)
        self.q1 = 2 * self._raw(r1 / 2)[2]
        self.q2 = 2 * self._raw(r2 / 2)[2]

    def coords(self, z: complex) -> np.ndarray:
        return self._minv @ np.array([z.real, z.imag])

    def reduce(self, z: complex) -> tuple[complex, int, int]:
        """Nearest-lattice-point translate of z in the reduced basis."""
        mn = self.coords(z)
        m0, n0 = int(round(mn[0])), int(round(mn[1]))
        best = None
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                m, n = m0 + dm, n0 + dn
                w = z - m * self.r1 - n * self.r2
                if best is None or abs(w) < abs(best[0]):
                    best = (w, m, n)
        return best

    def _series(self, w: complex):
        c = _laurent_coeffs(self.g2, self.g3)
        w2 = w * w
        p = 1.0 / w2
        pp = -2.0 / (w2 * w)
        zt = 1.0 / w
        pw = w2  # w^(2k-2) at k=2
        prev = np.inf
        for k in range(2, len(c)):
            ck = c[k]
            term = ck * pw
            p += term
            pp += (2 * k - 2) * ck * pw / w
            zt -= ck * pw * w / (2 * k - 1)
            # odd coefficients vanish when g3 = 0, so require two small terms
            if k > 8 and max(abs(term), prev) < 1e-17 * max(1.0, abs(p)):
                break
            prev = abs(term)
            pw *= w2
        return p, pp, zt

    def _raw(self, w: complex):
        """(wp, wp', zeta) at w without lattice reduction."""
        lim = self._SERIES_RADIUS * self.rmin
        halvings = 0
        while abs(w) / (1 << halvings) > lim:
            halvings += 1
        p, pp, zt = self._series(w / (1 << halvings))
        for _ in range(halvings):
            # duplication: wp(2w), wp'(2w), zeta(2w) from values at w
            u = 6 * p * p - self.g2 / 2  # wp''
            half = u / (2 * pp)
            p, pp, zt = (
                -2 * p + half * half,
                -pp + half * (6 * p - u * u / (2 * pp * pp)),
                2 * zt + half,
            )
        return p, pp, zt

    def wp_all(self, z: complex):
        """(wp, wp', zeta) at z, with zeta corrected for the lattice translate."""
        w, m, n = self.reduce(z)
        if abs(w) < _LATTICE_PROX_TOL:
            raise ZeroDivisionError("z is a lattice point")
        p, pp, zt = self._raw(w)
        return p, pp, zt + m * self.q1 + n * self.q2


def _ei_from_a(a: complex) -> tuple[complex, complex, complex]:
    s = (1.0 + a) / 3.0
    return -s, 1.0 - s, a - s


def agm_half_periods(a: complex) -> tuple[complex, complex, complex]:
    """Half-period candidates (one per branch value e_i) by complex AGM.

    Candidate i is pi / (2 AGM(sqrt(e_i - e_j), sqrt(e_i - e_k))); labels are
    assigned later by evaluating wp at the candidates.
    """
    es = _ei_from_a(complex(a))
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out.append(np.pi / (2.0 * _agm(np.sqrt(es[i] - es[j]),
                                       np.sqrt(es[i] - es[k]))))
    return tuple(out)


def quadrature_half_periods(a: complex, tol: float = 1e-12
                            ) -> tuple[complex, complex, complex]:
    """Half-period candidates by direct numerical quadrature.

    The substitution t = e_i + u^2 turns the period integral
    int_{e_i}^inf dt / sqrt(4 prod (t - e_m)) into
    int_0^inf du / sqrt((u^2 + e_i - e_j)(u^2 + e_i - e_k)), which is
    integrated with adaptive quadrature.  An independent cross-check of
    agm_half_periods.
    """
    from scipy.integrate import quad

    es = _ei_from_a(complex(a))
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        c1, c2 = es[i] - es[j], es[i] - es[k]

        # Branch points u = sqrt(-c) sit on the real axis when c is negative
        # real.  Rotate the ray of integration upward in that case (the side
        # consistent with the principal square root's Im c -> 0+ limit), by an
        # angle small enough not to sweep past the other factor's branch
        # point.
        phi = 0.0
        if any(cc.real < 0 and abs(cc.imag) < 1e-9 * abs(cc) for cc in (c1, c2)):
            phi = 0.3
            for cc in (c1, c2):
                th = float(np.angle(np.sqrt(-cc)))
                if 1e-12 < th < np.pi / 2:
                    phi = min(phi, th / 2.0)
        rot = np.exp(1j * phi)

        def integrand(s, c1=c1, c2=c2, rot=rot):
            u = rot * s
            return rot / (np.sqrt(u * u + c1) * np.sqrt(u * u + c2))

        val, _ = quad(integrand, 0.0, np.inf, epsabs=tol, epsrel=tol,
                      limit=400, complex_func=True)
        out.append(complex(val))
    return tuple(out)


def periods_from_a(a: complex) -> EllipticData:
    """Recover the period lattice from the Heun singularity location a.

    The three candidate half-periods come from complete elliptic integrals by
    AGM; labels are fixed by matching wp(omega_i) = e_i, and omega2 is negated
    if needed so that Im(omega2/omega1) > 0.
    """
    a = complex(a)
    if not np.isfinite(a.real) or not np.isfinite(a.imag):
        raise ValueError("a must be finite")
    if min(abs(a), abs(a - 1.0)) < 1e-8:
        raise PeriodError("a too close to {0, 1}: degenerate lattice")
    e1, e2, e3 = _ei_from_a(a)
    g2 = -4.0 * (e1 * e2 + e2 * e3 + e3 * e1)
    g3 = 4.0 * e1 * e2 * e3

    es = (e1, e2, e3)
    halves = agm_half_periods(a)

    # provisional lattice from two of the candidates, for wp-based labeling
    lat = _Lattice(halves[0], halves[1], g2, g3)
    labeled = [None, None, None]
    used = set()
    for idx, h in enumerate(halves):
        vals = [abs(lat.wp_all(h)[0] - e) for e in es]
        pick = int(np.argmin(vals))
        if vals[pick] > 1e-6 * (1.0 + abs(es[pick])) or pick in used:
            raise PeriodError("could not match half-periods to branch values")
        used.add(pick)
        labeled[pick] = h
    w1, w2 = labeled[0], labeled[1]
    if ((w2 / w1).imag) < 0:
        w2 = -w2
    w3 = w1 + w2

    # quasi-periods via zeta at the half-periods
    lat = _Lattice(w1, w2, g2, g3)
    eta1 = lat.wp_all(w1)[2]
    eta2 = lat.wp_all(w2)[2]
    area = 4.0 * (np.conj(w1) * w2).imag

    data = EllipticData(omega1=w1, omega2=w2, omega3=w3,
                        e1=e1, e2=e2, e3=e3, eta1=eta1, eta2=eta2,
                        area=float(area), g2=g2, g3=g3)
    _validate(data)
    return data


def _validate(d: EllipticData) -> None:
    if abs(d.e1 + d.e2 + d.e3) > 1e-10:
        raise PeriodError("branch values do not sum to zero")
    if d.area <= 0:
        raise PeriodError("lattice basis is not positively oriented")
    legendre = d.eta1 * d.omega2 - d.eta2 * d.omega1 - 0.5j * np.pi
    if abs(legendre) > 1e-9:
        raise PeriodError(f"Legendre relation violated by {abs(legendre):.2e}")
    lat = _lattice_of(d)
    for w, e in ((d.omega1, d.e1), (d.omega2, d.e2), (d.omega3, d.e3)):
        if abs(lat.wp_all(w)[0] - e) > 1e-9 * (1.0 + abs(e)):
            raise PeriodError("wp(omega_i) != e_i")


def _lattice_of(d: EllipticData) -> _Lattice:
    return _Lattice(d.omega1, d.omega2, d.g2, d.g3)


def wp(z: complex, d: EllipticData) -> complex:
    """Weierstrass wp at z."""
    return _lattice_of(d).wp_all(z)[0]


def wp_prime(z: complex, d: EllipticData) -> complex:
    """Derivative wp' at z."""
    return _lattice_of(d).wp_all(z)[1]


def wzeta(z: complex, d: EllipticData) -> complex:
    """Weierstrass zeta at z (quasi-periodic: gains 2*eta_i across 2*omega_i)."""
    return _lattice_of(d).wp_all(z)[2]


def asymptotic_accessory(l0: complex, m: DarbouxParams, d: EllipticData) -> complex:
    """Leading-order Darboux accessory parameter near the lattice point l0.

    B' = l0^2 - (2/(i*area)) * sum(m_i(m_i+1))
         * (eta1*conj(omega2) - eta2*conj(omega1) + pi*i*l0/conj(l0)).
    """
    l0 = complex(l0)
    if l0 == 0:
        raise ValueError("l0 must be nonzero")
    corr = (d.eta1 * np.conj(d.omega2) - d.eta2 * np.conj(d.omega1)
            + np.pi * 1j * l0 / np.conj(l0))
    return l0 * l0 - (2.0 / (1j * d.area)) * m.coupling_sum() * corr


def seed_basis(d: EllipticData) -> tuple[complex, complex]:
    """Reduced, canonically oriented basis of (2*pi/area) * conj(half-lattice)."""
    b1, b2 = _reduced_basis(np.conj(d.omega1), np.conj(d.omega2))
    scale = 2.0 * np.pi / d.area
    b1, b2 = scale * b1, scale * b2
    # canonical signs: b1 in the right half-plane, basis positively oriented
    if b1.real < 0 or (b1.real == 0 and b1.imag < 0):
        b1 = -b1
    if (np.conj(b1) * b2).imag < 0:
        b2 = -b2
    return b1, b2


def seed_lattice(d: EllipticData, index_range) -> list[complex]:
    """Points (2*pi/area)*(m*w1 + n*w2) of the conjugated half-period lattice.

    index_range is an iterable of integer pairs (m, n); the basis is reduced
    so that at a = -1 the generators have the magnitude 1.198 quoted for the
    square lattice.
    """
    b1, b2 = seed_basis(d)
    return [m * b1 + n * b2 for (m, n) in index_range]
