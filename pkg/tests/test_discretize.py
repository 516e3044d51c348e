"""Discretization blocks against hand-computed scalar oracles and algebraic
identities that both realizations must satisfy."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import (
    constant_model,
    integrator_model,
    lag_model,
    random_constant_model,
    scalar_gain_model,
)
from lpvsim.discretize import (
    DiscretizationConfig,
    det_scale,
    dt_step_matrices,
    phi,
    rinv_matrices,
    sigma_step,
    tustin_frozen,
    wellposedness_check,
)
from lpvsim.errors import ConfigError, DomainError, WellposednessError

# Scalar lag A = [[-1]], Ts = 0.1: all blocks are ratios over 1.05.
PHI_LAG = 1.0 / 1.05          # 0.9523809523809523
M11_LAG = 0.95 / 1.05         # 0.9047619047619047
M12_LAG = 2.0 / 1.05          # 1.9047619047619047
M21_LAG = 0.05 / 1.05         # 0.047619047619047616


def test_config_requires_positive_ts():
    with pytest.raises(ConfigError):
        DiscretizationConfig(0.0)
    with pytest.raises(ConfigError):
        DiscretizationConfig(-0.1)
    assert DiscretizationConfig(0.5).ts == 0.5


def test_phi_identity_for_zero_A():
    cfg = DiscretizationConfig(0.7)
    assert np.array_equal(phi(np.zeros((2, 2)), cfg), np.eye(2))


def test_phi_scalar_lag():
    cfg = DiscretizationConfig(0.1)
    assert_allclose(phi(np.array([[-1.0]]), cfg), [[PHI_LAG]], rtol=1e-15)


def test_phi_rejects_singular_resolvent():
    # 1 - 20 * 0.1/2 = 0 exactly
    cfg = DiscretizationConfig(0.1)
    with pytest.raises(WellposednessError) as exc:
        phi(np.array([[20.0]]), cfg)
    assert exc.value.code == "E_WELLPOSED"


def test_phi_residual_tiny_on_random_matrices():
    rng = np.random.default_rng(7)
    cfg = DiscretizationConfig(0.05)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        A = rng.uniform(-3.0, 3.0, (n, n))
        P = phi(A, cfg)
        residual = (np.eye(n) - A * (cfg.ts / 2.0)) @ P - np.eye(n)
        assert np.max(np.abs(residual)) <= 1e-10


def test_det_scale_floor_and_growth():
    assert det_scale(np.zeros((3, 3)), 0.5) == 1.0
    assert det_scale(np.array([[-8.0]]), 1.0) == 4.0


def test_sigma_step_integrator():
    sig = sigma_step(integrator_model(), [0.0], DiscretizationConfig(0.5))
    assert np.array_equal(sig.M11, [[1.0]])
    assert np.array_equal(sig.M12, [[2.0]])
    assert np.array_equal(sig.M21, [[0.25]])
    assert sig.M21 is sig.M22


def test_sigma_step_scalar_lag():
    sig = sigma_step(lag_model(), [0.0], DiscretizationConfig(0.1))
    assert_allclose(sig.M11, [[M11_LAG]], rtol=1e-12)
    assert_allclose(sig.M12, [[M12_LAG]], rtol=1e-15)
    assert_allclose(sig.M21, [[M21_LAG]], rtol=1e-15)


def test_sigma_step_rejects_point_outside_box():
    with pytest.raises(DomainError) as exc:
        sigma_step(integrator_model(), [1.5], DiscretizationConfig(0.1))
    assert exc.value.code == "E_DOMAIN"


def test_sigma_m11_equals_phi_times_tustin_numerator():
    # I + Phi A Ts == Phi (I + A Ts/2): same matrix by the resolvent identity
    rng = np.random.default_rng(11)
    cfg = DiscretizationConfig(0.2)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        A = rng.uniform(-2.0, 2.0, (n, n))
        P = phi(A, cfg)
        lhs = np.eye(n) + (P @ A) * cfg.ts
        rhs = P @ (np.eye(n) + A * (cfg.ts / 2.0))
        assert_allclose(lhs, rhs, rtol=0, atol=1e-10)


def test_phi_commutes_with_its_inverse_factor():
    rng = np.random.default_rng(3)
    cfg = DiscretizationConfig(0.3)
    A = rng.uniform(-2.0, 2.0, (4, 4))
    M = np.eye(4) - A * (cfg.ts / 2.0)
    P = phi(A, cfg)
    assert_allclose(P @ M, M @ P, rtol=0, atol=1e-10)


def test_step_matrices_integrator():
    m = dt_step_matrices(integrator_model(), [0.0], DiscretizationConfig(0.5))
    assert np.array_equal(m.Axi, [[1.0]])
    assert np.array_equal(m.Bxi, [[2.0]])
    assert np.array_equal(m.Cxi, [[0.25]])
    assert np.array_equal(m.Dxi, [[0.25]])
    assert np.array_equal(m.Xxi, [[0.25]])
    assert np.array_equal(m.Xu, [[0.25]])


def test_step_matrices_feedthrough_adds_to_Dxi():
    model = constant_model([[0.0]], [[1.0]], [[1.0]], [[3.0]])
    m = dt_step_matrices(model, [0.0], DiscretizationConfig(0.5))
    assert np.array_equal(m.Dxi, [[3.25]])


def test_step_matrices_scalar_lag():
    m = dt_step_matrices(lag_model(), [0.0], DiscretizationConfig(0.1))
    assert_allclose(m.Axi, [[M11_LAG]], rtol=1e-12)
    assert_allclose(m.Bxi, [[M12_LAG]], rtol=1e-15)
    assert_allclose(m.Cxi, [[M21_LAG]], rtol=1e-15)
    assert_allclose(m.Dxi, [[M21_LAG]], rtol=1e-15)


def test_step_matrices_are_read_only():
    m = dt_step_matrices(lag_model(), [0.0], DiscretizationConfig(0.1))
    for block in (m.Axi, m.Bxi, m.Cxi, m.Dxi, m.Xxi, m.Xu):
        with pytest.raises(ValueError):
            block[0, 0] = 99.0


def test_tustin_integrator():
    m = tustin_frozen(integrator_model(), [0.0], DiscretizationConfig(0.5))
    assert np.array_equal(m.Axi, [[1.0]])
    assert np.array_equal(m.Bxi, [[0.5]])
    assert np.array_equal(m.Cxi, [[1.0]])
    assert np.array_equal(m.Dxi, [[0.25]])
    assert np.array_equal(m.Xxi, [[1.0]])
    assert np.array_equal(m.Xu, [[0.0]])


def test_tustin_scalar_lag():
    m = tustin_frozen(lag_model(), [0.0], DiscretizationConfig(0.1))
    assert_allclose(m.Axi, [[M11_LAG]], rtol=1e-15)
    assert_allclose(m.Bxi, [[0.1 / 1.05]], rtol=1e-15)
    assert_allclose(m.Cxi, [[PHI_LAG]], rtol=1e-15)
    assert_allclose(m.Dxi, [[M21_LAG]], rtol=1e-15)


def test_tustin_rejects_point_outside_box():
    with pytest.raises(DomainError):
        tustin_frozen(integrator_model(), [-2.0], DiscretizationConfig(0.1))


def test_realizations_related_by_state_scaling():
    # xi = (2/Ts) x maps one realization onto the other:
    # Axi = Ad, Bxi = (2/Ts) Bd, Cxi = (Ts/2) Cd, Dxi = Dd.
    rng = np.random.default_rng(42)
    for ts in (0.01, 0.1, 0.5):
        cfg = DiscretizationConfig(ts)
        for _ in range(8):
            model = random_constant_model(rng, ts_gate=(ts,))
            a = dt_step_matrices(model, [0.0], cfg)
            b = tustin_frozen(model, [0.0], cfg)
            scale = np.max(np.abs(b.Axi)) + 1.0
            assert_allclose(a.Axi, b.Axi, rtol=0, atol=1e-10 * scale)
            assert_allclose(a.Bxi, (2.0 / ts) * b.Bxi, rtol=1e-10, atol=1e-12)
            assert_allclose(a.Cxi, (ts / 2.0) * b.Cxi, rtol=1e-10, atol=1e-12)
            assert_allclose(a.Dxi, b.Dxi, rtol=1e-10, atol=1e-12)


def test_dc_gain_preserved_exactly():
    # Dxi + Cxi (I - Axi)^-1 Bxi must equal the CT gain D - C A^-1 B.
    m = dt_step_matrices(lag_model(), [0.0], DiscretizationConfig(0.1))
    dc = m.Dxi + m.Cxi @ np.linalg.solve(np.eye(1) - m.Axi, m.Bxi)
    assert_allclose(dc, [[1.0]], rtol=1e-12)


def test_small_ts_limit_matches_forward_euler_to_second_order():
    rng = np.random.default_rng(5)
    A = rng.uniform(-2.0, 2.0, (3, 3))
    model = constant_model(A, np.ones((3, 1)), np.ones((1, 3)), [[0.0]])
    for ts in (1e-3, 1e-4):
        m = dt_step_matrices(model, [0.0], DiscretizationConfig(ts))
        gap = np.max(np.abs(m.Axi - np.eye(3) - A * ts))
        assert gap <= 10.0 * np.max(np.abs(A)) ** 2 * ts**2


def test_rinv_matrices_layout():
    got = rinv_matrices(1, DiscretizationConfig(2.0))
    assert np.array_equal(got, [[1.0, 2.0], [1.0, 1.0]])
    got2 = rinv_matrices(2, DiscretizationConfig(0.5))
    eye = np.eye(2)
    assert np.array_equal(got2[:2, :2], eye)
    assert np.array_equal(got2[:2, 2:], 2.0 * eye)
    assert np.array_equal(got2[2:, :2], 0.25 * eye)
    assert np.array_equal(got2[2:, 2:], 0.25 * eye)


def test_sigma_blocks_reduce_to_integrator_block_for_zero_A():
    # With A(p) = 0 the loop-free blocks are exactly the trapezoidal
    # integrator block acting on (xi, B u).
    cfg = DiscretizationConfig(0.5)
    model = constant_model(np.zeros((2, 2)), np.eye(2), np.eye(2), np.zeros((2, 2)))
    sig = sigma_step(model, [0.0], cfg)
    R = rinv_matrices(2, cfg)
    assert np.array_equal(sig.M11, R[:2, :2])
    assert np.array_equal(sig.M12, R[:2, 2:])
    assert np.array_equal(sig.M21, R[2:, :2])
    assert np.array_equal(sig.M22, R[2:, 2:])


def test_wellposedness_clean_model_passes():
    report = wellposedness_check(
        integrator_model(), DiscretizationConfig(0.5),
        grid_per_dim=5, random_samples=10, seed=1,
    )
    assert report.passed
    assert report.min_abs_det == 1.0
    assert report.max_condition_number == 1.0
    assert report.singular_points == ()
    # 2 vertices + 5 grid points + 10 draws
    assert report.samples_checked == 17


def test_wellposedness_finds_singular_grid_point():
    # A(p) = p on [0, 40] at Ts = 0.1: det vanishes exactly at p = 20.
    report = wellposedness_check(
        scalar_gain_model(+1.0, hi=40.0), DiscretizationConfig(0.1),
        grid_per_dim=5, random_samples=0, seed=0,
    )
    assert not report.passed
    assert (20.0,) in report.singular_points
    assert report.argmin_p == (20.0,)
    assert report.min_abs_det == 0.0
    assert report.max_condition_number == np.inf


def test_wellposedness_negative_gain_always_passes():
    # A(p) = -p keeps det = 1 + p Ts/2 >= 1 over the whole box.
    report = wellposedness_check(
        scalar_gain_model(-1.0, hi=40.0), DiscretizationConfig(0.1),
        grid_per_dim=9, random_samples=50, seed=3,
    )
    assert report.passed
    assert report.min_abs_det >= 1.0
    assert report.argmin_p == (0.0,)


def test_wellposedness_report_is_deterministic():
    args = dict(grid_per_dim=4, random_samples=25, seed=99)
    model = scalar_gain_model(-1.0, hi=5.0)
    cfg = DiscretizationConfig(0.2)
    a = wellposedness_check(model, cfg, **args)
    b = wellposedness_check(model, cfg, **args)
    assert a == b


def test_wellposedness_rejects_bad_sampling_plan():
    model = integrator_model()
    cfg = DiscretizationConfig(0.1)
    with pytest.raises(ConfigError):
        wellposedness_check(model, cfg, grid_per_dim=1, random_samples=0, seed=0)
    with pytest.raises(ConfigError):
        wellposedness_check(model, cfg, grid_per_dim=3, random_samples=-1, seed=0)


def test_wellposedness_report_json_dict():
    report = wellposedness_check(
        integrator_model(), DiscretizationConfig(0.5),
        grid_per_dim=2, random_samples=0, seed=0,
    )
    d = report.to_json_dict()
    assert d["passed"] is True
    assert d["ts"] == 0.5
    assert d["samples_checked"] == 4
    assert d["singular_points"] == []
    assert isinstance(d["argmin_p"], list)
