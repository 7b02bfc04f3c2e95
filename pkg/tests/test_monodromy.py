import numpy as np
import pytest

from heunmono.monodromy import (Contour, ContourError, HeunParams,
                                darboux_rhs, heun_rhs, lame_params,
                                monodromy_triple, standard_contour, transport,
                                transport_batch, transport_ode, triple_product)

COARSE = 4e-3  # RK4 at this step is still ~1e-7 accurate; unit-test speed


def _det(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


# ----------------------------------------------------------------- HeunParams

def test_fuchs_relation_enforced():
    with pytest.raises(ValueError):
        HeunParams(gamma=0.5, delta=0.5, epsilon=0.5, alpha=0.5, beta=0.5,
                   a=-1.0)


def test_a_collision_rejected():
    with pytest.raises(ValueError):
        HeunParams(gamma=0.5, delta=0.5, epsilon=0.5, alpha=0.25, beta=0.25,
                   a=1.0)


def test_with_accessory():
    p = lame_params().with_accessory(2.0 + 1j)
    assert p.B == 2.0 + 1j


# -------------------------------------------------------------------- heun_rhs

def test_heun_rhs_zero_coefficients():
    p = HeunParams(gamma=0.0, delta=0.0, epsilon=0.0, alpha=0.0, beta=-1.0,
                   a=2.0)
    out = heun_rhs(0.5j, (1.0, 0.0), p)
    assert out == pytest.approx([0.0, 0.0])


def test_heun_rhs_lame_at_i():
    p = lame_params(B=0.3)
    out = heun_rhs(1j, (1.0, 0.0), p)
    expected = -((1 / 16) * 1j - 0.3 / 4) / (1j * (1j - 1) * (1j + 1))
    assert out[1] == pytest.approx(expected)


def test_heun_rhs_first_component_structure():
    p = lame_params()
    out = heun_rhs(1j, (0.0, 1.0), p)
    assert out[0] == pytest.approx(1.0)


def test_heun_rhs_pole_proximity():
    with pytest.raises(ContourError):
        heun_rhs(1e-9, (1.0, 0.0), lame_params())


# -------------------------------------------------------------------- contours

def test_standard_contour_closed():
    c = standard_contour(0.0)
    pts = c.sample_points()
    assert abs(pts[0] - 1j) < 1e-12
    assert abs(pts[-1] - 1j) < 1e-12


def test_standard_contour_winding():
    c = standard_contour(0.0)
    pts = c.sample_points(512)
    def winding(z0):
        dphi = np.diff(np.unwrap(np.angle(pts - z0)))
        return np.sum(dphi) / (2 * np.pi)
    assert winding(0.0) == pytest.approx(1.0, abs=1e-6)
    assert winding(1.0) == pytest.approx(0.0, abs=1e-6)
    assert winding(-1.0) == pytest.approx(0.0, abs=1e-6)


def test_standard_contour_base_inside_rejected():
    with pytest.raises(ContourError):
        standard_contour(1j, base=1j)


def test_standard_contour_radius_reaching_other_pole():
    with pytest.raises(ContourError):
        standard_contour(0.0, radius=0.99, avoid=(0.0, 1.0))


def test_open_contour_rejected():
    with pytest.raises(ContourError):
        Contour(base=1j, segments=(("line", 1j, 0.5),))


# ------------------------------------------------------------------- transport

def test_free_particle_identity():
    c = standard_contour(0.0, step=COARSE)
    m = transport_ode(c, lambda z, s: np.array([s[1], 0.0]))
    assert np.allclose(m, np.eye(2), atol=1e-8)


@pytest.mark.parametrize("g", [0.3, 0.5, 1.2])
def test_cauchy_euler_oracle(g):
    # y'' + (g/z) y' = 0 has solutions {1, z^(1-g)}: monodromy about 0 has
    # eigenvalues {1, exp(2 pi i (1-g))}
    c = standard_contour(0.0, step=COARSE)
    m = transport_ode(c, lambda z, s: np.array([s[1], -g / z * s[1]]))
    ev = sorted(np.linalg.eigvals(m), key=lambda t: abs(t - 1))
    assert abs(ev[0] - 1) < 1e-5
    assert abs(ev[1] - np.exp(2j * np.pi * (1 - g))) < 1e-5


def test_lame_loop_eigenvalues():
    p = lame_params()
    c = standard_contour(0.0, step=COARSE, avoid=p.singularities)
    m = transport(c, p)
    ev = sorted(np.linalg.eigvals(m), key=abs)
    assert abs(_det(m) + 1) < 1e-5
    assert abs(abs(ev[0]) - 1) < 1e-4 and abs(abs(ev[1]) - 1) < 1e-4
    assert abs(m.trace()) < 1e-4  # eigenvalues {1, -1}


def test_transport_batch_matches_scalar():
    p = lame_params(B=0.7 + 0.2j)
    c = standard_contour(0.0, step=COARSE, avoid=p.singularities)
    batch = transport_batch(c, p, np.array([0.7 + 0.2j, 1.0]))
    single = transport(c, p)
    assert np.allclose(batch[0], single, atol=1e-12)
    assert not np.allclose(batch[1], single, atol=1e-6)


def test_step_halving_rk4_order():
    p = lame_params(B=1.0)
    outs = []
    for step in (8e-3, 4e-3, 2e-3):
        c = standard_contour(0.0, step=step, avoid=p.singularities)
        outs.append(transport(c, p))
    e1 = np.max(np.abs(outs[0] - outs[2]))
    e2 = np.max(np.abs(outs[1] - outs[2]))
    assert e1 / e2 == pytest.approx(16, rel=0.5)


def test_homotopy_invariance_radius():
    p = lame_params(B=0.5)
    m1 = transport(standard_contour(0.0, step=2e-3, avoid=p.singularities), p)
    m2 = transport(standard_contour(0.0, step=2e-3, radius=0.25,
                                    avoid=p.singularities), p)
    assert np.max(np.abs(m1 - m2)) < 1e-6


def test_base_point_covariance_traces():
    p = lame_params(B=0.5)
    t1 = monodromy_triple(p, step=COARSE)
    t2 = monodromy_triple(p, step=COARSE, base=2j)
    for a, b in ((t1.P, t2.P), (t1.Q, t2.Q), (t1.R, t2.R)):
        assert abs(a.trace() - b.trace()) < 1e-6


# ------------------------------------------------------------ monodromy_triple

@pytest.fixture(scope="module")
def lame_triple():
    return monodromy_triple(lame_params(B=0.3), step=COARSE)


def test_triple_reflections(lame_triple):
    for m in (lame_triple.P, lame_triple.Q, lame_triple.R):
        assert abs(m.trace()) < 1e-4
        assert abs(_det(m) + 1) < 1e-5


def test_triple_rescaled_unit_det(lame_triple):
    for m in (lame_triple.P0, lame_triple.Q0, lame_triple.R0):
        assert abs(_det(m) - 1) < 1e-6


def test_triple_product_trace_identity():
    # asymmetric exponents pin the loop-ordering convention:
    # tr(PQR)/sqrt(det) = 2 cos(pi (alpha - beta))
    p = HeunParams(gamma=0.5, delta=0.5, epsilon=0.5, alpha=0.4, beta=0.1,
                   a=-1.0, B=0.7 + 0.3j)
    t = monodromy_triple(p, step=COARSE)
    prod = triple_product(t.P, t.Q, t.R)
    val = prod.trace() / np.sqrt(_det(prod))
    assert val == pytest.approx(2 * np.cos(0.3 * np.pi), abs=1e-3)


def test_fuchs_total_monodromy(lame_triple):
    args = []
    for m in (lame_triple.P, lame_triple.Q, lame_triple.R):
        args.extend(np.angle(np.linalg.eigvals(m)) / (2 * np.pi))
    prod = triple_product(lame_triple.P, lame_triple.Q, lame_triple.R)
    args.extend(np.angle(np.linalg.eigvals(np.linalg.inv(prod))) / (2 * np.pi))
    total = sum(args)
    assert abs(total - round(total)) < 1e-4


def test_exponent_residuals_small(lame_triple):
    assert all(v < 1e-5 for v in lame_triple.exponent_residuals.values())


# ----------------------------------------------------------------- darboux_rhs

def test_darboux_rhs_constant_coefficient():
    from heunmono.elliptic import periods_from_a
    d = periods_from_a(-1.0)
    out = darboux_rhs(0.4 + 0.2j, (1.0, 0.0), (0, -1, 0, -1), 2.5, d)
    assert out[1] == pytest.approx(2.5)


def test_darboux_rhs_lame_potential():
    from heunmono.elliptic import periods_from_a, wp
    d = periods_from_a(-1.0)
    z = 0.4 + 0.2j
    out = darboux_rhs(z, (1.0, 0.0), (-0.5, 0, 0, 0), 1.0, d)
    assert out[1] == pytest.approx(-0.25 * wp(z, d) + 1.0)


def test_darboux_rhs_branch_value():
    from heunmono.elliptic import periods_from_a, wp
    d = periods_from_a(-1.0)
    assert wp(d.omega1, d) == pytest.approx(d.e1, abs=1e-9)
