import numpy as np
import pytest

from heunmono.elliptic import (DarbouxParams, PeriodError, agm_half_periods,
                               asymptotic_accessory, heun_to_darboux_params,
                               periods_from_a, quadrature_half_periods,
                               seed_basis, seed_lattice, wp, wp_prime, wzeta)
from heunmono.monodromy import HeunParams, lame_params

SPACING = 1.1981402347355923  # (2pi/area) * |reduced half-period| at a = -1


@pytest.fixture(scope="module")
def lemniscatic():
    return periods_from_a(-1.0)


def random_a(rng):
    while True:
        a = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        if min(abs(a), abs(a - 1)) > 0.15:
            return a


# ------------------------------------------------------------------- params

def test_darboux_params_lame():
    m = heun_to_darboux_params(lame_params())
    assert (m.m0, m.m1, m.m2, m.m3) == pytest.approx((-0.5, 0, 0, 0))
    assert m.coupling_sum() == pytest.approx(-0.25)
    assert m.unitarity_admissible


def test_darboux_params_third_gamma():
    p = HeunParams(gamma=1 / 3, delta=0.5, epsilon=0.5, alpha=1 / 6,
                   beta=1 / 6, a=-1.0)
    m = heun_to_darboux_params(p)
    assert m.m1 == pytest.approx(1 / 6)
    assert m.m0 == pytest.approx(-0.5)  # alpha = beta always gives -1/2


# ------------------------------------------------------------------- periods

def test_lemniscatic_invariants(lemniscatic):
    d = lemniscatic
    assert abs(d.omega1) == pytest.approx(1.311029 * np.sqrt(2), abs=2e-5)
    assert abs(d.omega2) == pytest.approx(1.311029, abs=1e-5)
    assert (d.e1, d.e2, d.e3) == pytest.approx((0, 1, -1))
    assert d.area > 0
    assert abs(d.eta1 * d.omega2 - d.eta2 * d.omega1 - 0.5j * np.pi) < 1e-9


def test_legendre_and_branch_values_random_a():
    rng = np.random.default_rng(100)
    for _ in range(20):
        d = periods_from_a(random_a(rng))
        assert abs(d.eta1 * d.omega2 - d.eta2 * d.omega1 - 0.5j * np.pi) < 1e-9
        assert abs(d.e1 + d.e2 + d.e3) < 1e-10
        assert (d.omega2 / d.omega1).imag > 0
        for w, e in ((d.omega1, d.e1), (d.omega2, d.e2), (d.omega3, d.e3)):
            assert abs(wp(w, d) - e) < 1e-8 * (1 + abs(e))


def test_degenerate_a_rejected():
    with pytest.raises((PeriodError, ValueError)):
        periods_from_a(1e-12)


def test_agm_vs_quadrature_random():
    rng = np.random.default_rng(77)
    for _ in range(10):
        a = random_a(rng)
        for x, y in zip(agm_half_periods(a), quadrature_half_periods(a)):
            assert min(abs(x - y), abs(x + y)) < 1e-9


def test_agm_vs_quadrature_real_a_modulo_lattice(lemniscatic):
    # on the real-a branch locus the two routes may differ by a full period
    d = lemniscatic
    for q in quadrature_half_periods(-1.0):
        best = min(abs(s * q - (d.omega1 * m + d.omega2 * n))
                   for s in (1, -1)
                   for m in range(-3, 4) for n in range(-3, 4))
        assert best < 1e-9


# ------------------------------------------------------------ wp, zeta

def test_wp_leading_laurent(lemniscatic):
    z = 1e-3
    assert abs(wp(z, lemniscatic) - 1 / z ** 2) < 1e-2


def test_parity_and_periodicity(lemniscatic):
    d = lemniscatic
    rng = np.random.default_rng(4)
    for _ in range(10):
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) + 0.1
        assert abs(wp(-z, d) - wp(z, d)) < 1e-9 * (1 + abs(wp(z, d)))
        assert abs(wzeta(-z, d) + wzeta(z, d)) < 1e-9 * (1 + abs(wzeta(z, d)))
        assert abs(wp(z + 2 * d.omega1, d) - wp(z, d)) < 1e-9 * (1 + abs(wp(z, d)))
        quasi = wzeta(z + 2 * d.omega2, d) - wzeta(z, d) - 2 * d.eta2
        assert abs(quasi) < 1e-9


def test_wp_ode_residual_random_a():
    rng = np.random.default_rng(9)
    for _ in range(10):
        d = periods_from_a(random_a(rng))
        z = complex(rng.uniform(0.1, 0.8), rng.uniform(0.1, 0.8)) * d.omega3
        p = wp(z, d)
        lhs = wp_prime(z, d) ** 2
        rhs = 4 * (p - d.e1) * (p - d.e2) * (p - d.e3)
        assert abs(lhs - rhs) < 1e-8 * (1 + abs(lhs))


def test_lattice_point_rejected(lemniscatic):
    with pytest.raises(ZeroDivisionError):
        wp(0.0, lemniscatic)


# --------------------------------------------------------------- asymptotics

def test_asymptote_zero_coupling_is_l0_squared(lemniscatic):
    m = DarbouxParams(m0=0.0, m1=-1.0, m2=0.0, m3=-1.0)
    assert m.coupling_sum() == pytest.approx(0.0)
    l0 = 2.0 + 1.5j
    assert asymptotic_accessory(l0, m, lemniscatic) == pytest.approx(l0 ** 2)


def test_asymptote_zero_l0_rejected(lemniscatic):
    m = DarbouxParams(m0=-0.5, m1=0.0, m2=0.0, m3=0.0)
    with pytest.raises(ValueError):
        asymptotic_accessory(0.0, m, lemniscatic)


def test_asymptote_sqrt_form_consistency(lemniscatic):
    # the sqrt-plane form l0 + corr/(2 l0), squared, matches B' up to
    # corr^2/(4 l0^2): doubling |l0| quarters the residual
    d = lemniscatic
    m = DarbouxParams(m0=-0.5, m1=0.0, m2=0.0, m3=0.0)
    gaps = []
    for scale in (5.0, 10.0, 20.0):
        l0 = scale * np.exp(0.3j)
        bp = asymptotic_accessory(l0, m, d)
        corr = bp - l0 ** 2
        sqrt_form = l0 + corr / (2 * l0)
        gaps.append(abs(sqrt_form ** 2 - bp))
    assert gaps[0] / gaps[1] == pytest.approx(4, rel=0.3)
    assert gaps[1] / gaps[2] == pytest.approx(4, rel=0.3)


# -------------------------------------------------------------- seed lattice

def test_seed_basis_spacing(lemniscatic):
    b1, b2 = seed_basis(lemniscatic)
    assert abs(b1) == pytest.approx(SPACING, abs=1e-9)
    assert abs(b2) == pytest.approx(SPACING, abs=1e-9)
    assert abs(b1 - SPACING) < 1e-3  # reference 1.198 Z^2 spacing at a = -1
    assert abs(b2 - 1j * SPACING) < 1e-3


def test_seed_lattice_points(lemniscatic):
    pts = seed_lattice(lemniscatic, [(0, 0), (1, 0), (2, 0)])
    assert pts[0] == 0
    assert abs(pts[1]) == pytest.approx(SPACING, abs=1e-3)
    assert abs(pts[2] / pts[1]) == pytest.approx(2.0, abs=1e-12)
