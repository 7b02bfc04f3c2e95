import numpy as np
import pytest

from heunmono.monodromy import lame_params
from heunmono.spectrum import (DegenerateLinearizationError, SolverConfig,
                               convergence_map, newton_epsilon,
                               reference_seed_indices, solve_from_seed, sweep,
                               traces_at, write_ppm)
from heunmono.spectrum import _hsv_to_rgb_u8

# coarse integration for unit-test speed; eigenvalue locations shift by far
# less than the tolerances below
FAST = SolverConfig(step=2e-3)


# -------------------------------------------------------------- newton update

def test_epsilon_zero_at_root():
    assert newton_epsilon(2.0, -3.0, 1j, 1.0) == 0


def test_epsilon_worked_example():
    assert newton_epsilon(1j, 0.0, 1j, 1.0) == pytest.approx(-1.0)


def test_epsilon_linearization_property():
    rng = np.random.default_rng(5)
    for _ in range(20):
        t1, t2, nu, mu = (complex(rng.normal(), rng.normal()) for _ in range(4))
        if abs((np.conj(nu) * mu).imag) < 1e-3:
            continue
        eps = newton_epsilon(t1, t2, nu, mu)
        assert (t1 + nu * eps).imag == pytest.approx(0, abs=1e-10)
        assert (t2 + mu * eps).imag == pytest.approx(0, abs=1e-10)


def test_epsilon_parallel_derivatives_raise():
    with pytest.raises(DegenerateLinearizationError):
        newton_epsilon(1j, 1j, 1.0 + 2j, 2.0 + 4j)


# ------------------------------------------------------------------ config

def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        SolverConfig(fd_step=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(accept_rel_tol=2.0)


def test_reference_seed_indices_shape():
    assert len(reference_seed_indices) == 12
    assert reference_seed_indices[0] == (1, -1)
    assert all(m in (1, 2, 3) and n in (-1, 0, 1, 2)
               for m, n in reference_seed_indices)


# ------------------------------------------------------------------ traces

def test_traces_continuity():
    t0 = traces_at(0.5 + 0.2j, lame_params(), FAST)
    t1 = traces_at(0.5 + 0.2j + 1e-6, lame_params(), FAST)
    assert max(abs(a - b) for a, b in zip(t0, t1)) < 1e-3


def test_traces_lame_at_zero():
    t_pq, t_qr, t_pr = traces_at(0.0, lame_params(), FAST)
    assert t_pq == pytest.approx(-2 * np.sqrt(2), abs=1e-4)
    assert t_qr == pytest.approx(-4.0, abs=1e-4)
    assert abs(t_pr.imag) < 1e-4


# ------------------------------------------------------------------- solver

@pytest.fixture(scope="module")
def first_eigen():
    # seed at the first lattice point of the sqrt-B grid
    return solve_from_seed(1.1981402347355923 ** 2, lame_params(), FAST)


def test_solver_converges_and_accepts(first_eigen):
    r = first_eigen
    assert r.converged and r.accepted
    assert abs(np.sqrt(r.B) - 1.1981402347355923) < 0.05
    assert r.residual_imag[0] < 1e-6 and r.residual_imag[1] < 1e-6
    assert r.beukers_ok


def test_solver_fixed_point_is_cheap(first_eigen):
    again = solve_from_seed(first_eigen.B, lame_params(), FAST)
    assert again.converged
    assert again.iterations <= 2
    assert abs(again.B - first_eigen.B) < 1e-6


def test_solver_reports_traces_consistently(first_eigen):
    t = traces_at(first_eigen.B, lame_params(), FAST)
    assert max(abs(a - b) for a, b in zip(t, first_eigen.traces)) < 1e-6


def test_sweep_deduplicates():
    from heunmono.elliptic import periods_from_a
    d = periods_from_a(-1.0)
    res = sweep(lame_params(), d, index_range=[(1, 0), (1, 0)], cfg=FAST)
    assert len(res) == 1 and res[0].accepted


def test_sweep_warns_on_reducible_locus():
    from heunmono.elliptic import periods_from_a
    from heunmono.monodromy import HeunParams
    d = periods_from_a(-1.0)
    p = HeunParams(gamma=0.3, delta=0.5, epsilon=0.5, alpha=0.3, beta=0.0,
                   a=-1.0)
    with pytest.warns(UserWarning):
        sweep(p, d, index_range=[], cfg=FAST)


# ----------------------------------------------------------- convergence map

def test_convergence_map_deterministic(first_eigen):
    region = (1.15, 1.25, -0.05, 0.05)
    cfg = SolverConfig(step=2e-3, max_iters=6)
    rgb1, b1 = convergence_map(lame_params(), region, (2, 2), cfg)
    rgb2, b2 = convergence_map(lame_params(), region, (2, 2), cfg)
    assert rgb1.shape == (2, 2, 3) and rgb1.dtype == np.uint8
    assert np.array_equal(rgb1, rgb2)
    assert np.array_equal(b1, b2)
    # pixels seeded this close land in the eigenvalue's cluster of
    # two-trace joint zeros (the third-trace test separates them from the
    # eigenvalue itself, but all lie within ~1e-2 of it)
    assert np.all(np.abs(b1 - first_eigen.B) < 2e-2)


def test_convergence_map_resource_guard():
    with pytest.raises(ValueError):
        convergence_map(lame_params(), (-7, 7, -7, 7), (5000, 5000))


def test_hsv_primary_colors():
    h = np.array([0.0, 1 / 3, 2 / 3])
    rgb = _hsv_to_rgb_u8(h, np.ones(3), np.ones(3))
    assert np.array_equal(rgb, [[255, 0, 0], [0, 255, 0], [0, 0, 255]])


def test_hsv_zero_saturation_gray():
    rgb = _hsv_to_rgb_u8(np.array([0.37]), np.array([0.0]), np.array([0.5]))
    assert rgb[0, 0] == rgb[0, 1] == rgb[0, 2]


def test_write_ppm_format(tmp_path):
    rgb = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3)
    path = tmp_path / "img.ppm"
    write_ppm(path, rgb)
    data = path.read_bytes()
    assert data.startswith(b"P6\n3 2\n255\n")
    assert data[len(b"P6\n3 2\n255\n"):] == rgb.tobytes()
