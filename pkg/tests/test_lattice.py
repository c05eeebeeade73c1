import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from raman_lattice.constants import K_1064, K_772, M_RB87, h, khz, to_khz
from raman_lattice.lattice import (
    LatticeConfig,
    UndefinedAngleError,
    build_spring_tensor,
    eigensystem,
    eigenvalues_kappa_pm,
    minimum_splitting,
    omega2_from_power,
    principal_axes,
    principal_axis_angle,
    sideband_projection,
    spring_constant_from_depth,
    to_lab_frame,
    to_primed_frame,
    trap_frequency,
    transverse_frequency,
    wave_vector_directions,
)

kappas = st.floats(1e-9, 1e-3)
phis = st.floats(0.0, math.pi / 2)


def cfg_of(kappa1, kappa2, phi):
    return LatticeConfig(K_1064, K_772, phi, kappa1, kappa2, M_RB87)


def lattice_potential(V1, V2, phi):
    """Full cosine potential in the lab frame: attractive 1064 wave, repulsive 772 wave at a node."""
    k1 = K_1064 * np.array([math.cos(phi), math.sin(phi)])
    k2 = K_772 * np.array([0.0, 1.0])

    def V(r):
        return -abs(V1) * math.cos(k1 @ r) ** 2 + abs(V2) * math.sin(k2 @ r) ** 2

    return V


def numeric_hessian(V, step):
    H = np.empty((2, 2))
    e = np.eye(2) * step
    for i in range(2):
        for j in range(2):
            H[i, j] = (V(e[i] + e[j]) - V(e[i] - e[j]) - V(-e[i] + e[j]) + V(-e[i] - e[j])) / (4 * step**2)
    return H


def test_config_validation():
    with pytest.raises(ValueError):
        cfg_of(-1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        cfg_of(1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        LatticeConfig(0.0, 1.0, 0.1, 1.0, 1.0)


class TestSpringConstant:
    def test_zero_depth(self):
        assert spring_constant_from_depth(0.0, K_1064) == 0.0

    def test_1064_lattice_frequency(self):
        kappa = spring_constant_from_depth(-h * 31e6, K_1064)
        f = to_khz(trap_frequency(kappa, M_RB87))
        # sqrt(2 |V| k^2 / m) with |V| = h x 31 MHz; quoted as ~0.5 MHz
        assert f == pytest.approx(501.45, abs=0.05)
        assert abs(f - 500.0) / 500.0 < 0.06

    @given(st.floats(1e-30, 1e-26), st.floats(1e6, 2e7))
    def test_matches_second_derivative(self, depth, k):
        step = 1e-4 / k
        V = lambda x: -depth * math.cos(k * x) ** 2
        d2 = (V(step) - 2 * V(0.0) + V(-step)) / step**2
        assert spring_constant_from_depth(-depth, k) == pytest.approx(d2, rel=1e-6)


class TestTensor:
    def test_orthogonal(self):
        np.testing.assert_allclose(build_spring_tensor(cfg_of(3.0, 2.0, 0.0)), np.diag([3.0, 2.0]))

    def test_parallel(self):
        t = build_spring_tensor(cfg_of(2.0, 2.0, math.pi / 2))
        np.testing.assert_allclose(t, 2.0 * np.array([[1, 1], [1, 1]]))
        np.testing.assert_allclose(eigenvalues_kappa_pm(t), (4.0, 0.0), atol=1e-15)

    @given(st.floats(1e-28, 1e-26), st.floats(1e-28, 1e-26), phis)
    def test_hessian_of_cosine_potential(self, V1, V2, phi):
        V = lattice_potential(V1, V2, phi)
        H_lab = numeric_hessian(V, 2e-11)
        R = np.array([[math.cos(phi / 2), math.sin(phi / 2)], [-math.sin(phi / 2), math.cos(phi / 2)]])
        H_primed = R @ H_lab @ R.T
        cfg = cfg_of(spring_constant_from_depth(V1, K_1064), spring_constant_from_depth(V2, K_772), phi)
        t = build_spring_tensor(cfg)
        np.testing.assert_allclose(H_primed, t, rtol=1e-5, atol=1e-5 * np.abs(t).max())


class TestEigenvalues:
    @given(st.floats(1e-6, 1e-3), phis)
    def test_symmetric_point(self, c, phi):
        kp, km = eigenvalues_kappa_pm(cfg_of(c, c, phi))
        assert kp == pytest.approx(c * (1 + math.sin(phi)), rel=1e-12)
        assert km == pytest.approx(c * (1 - math.sin(phi)), rel=1e-12, abs=1e-12 * c)

    def test_decoupled(self):
        assert eigenvalues_kappa_pm(cfg_of(1.0, 3.0, 0.0)) == (3.0, 1.0)

    @given(kappas, kappas, phis)
    def test_matches_numeric_eigensolver(self, k1, k2, phi):
        cfg = cfg_of(k1, k2, phi)
        ev = np.linalg.eigvalsh(build_spring_tensor(cfg))
        kp, km = eigenvalues_kappa_pm(cfg)
        assert kp == pytest.approx(ev[1], rel=1e-12)
        assert km == pytest.approx(ev[0], rel=1e-12, abs=1e-12 * kp)

    @given(kappas, kappas, phis)
    def test_trace_and_determinant(self, k1, k2, phi):
        cfg = cfg_of(k1, k2, phi)
        kp, km = eigenvalues_kappa_pm(cfg)
        t = build_spring_tensor(cfg)
        assert kp >= km >= 0
        assert kp + km == pytest.approx(k1 + k2, rel=1e-12)
        assert kp * km == pytest.approx(np.linalg.det(t), rel=1e-9, abs=1e-12 * kp**2)

    # kappa2 = kappa1 cos(2 phi) must stay non-negative
    @pytest.mark.parametrize("phi", [0.016, 0.1, 0.5, 0.75])
    def test_avoided_crossing_minimum(self, phi):
        k1 = 1e-4

        def gap(x):
            kp, km = eigenvalues_kappa_pm(cfg_of(k1, x * k1, phi))
            return (kp - km) / k1

        res = minimize_scalar(gap, bounds=(0.0, 2.0), method="bounded", options={"xatol": 1e-10})
        assert res.fun == pytest.approx(math.sin(2 * phi), rel=1e-8)
        assert res.x == pytest.approx(math.cos(2 * phi), abs=1e-6)


class TestFrequencies:
    def test_zero(self):
        assert trap_frequency(0.0, M_RB87) == 0.0

    def test_sqrt_scaling(self):
        assert trap_frequency(4e-4, M_RB87) == pytest.approx(2 * trap_frequency(1e-4, M_RB87))

    def test_omega2_from_power(self):
        w1 = khz(528.0)
        assert omega2_from_power(9.5e-6, 9.5e-6, w1) == pytest.approx(w1)
        assert omega2_from_power(4 * 9.5e-6, 9.5e-6, w1) == pytest.approx(2 * w1)
        with pytest.raises(ValueError):
            omega2_from_power(1.0, 0.0, w1)

    def test_minimum_splitting(self):
        approx, exact = minimum_splitting(khz(528.0), 0.016)
        assert to_khz(approx) == pytest.approx(8.448, abs=1e-3)
        assert 7.0 <= to_khz(approx) <= 11.0
        assert minimum_splitting(khz(528.0), 0.0) == (0.0, 0.0)
        approx, exact = minimum_splitting(1.0, 0.1)
        assert abs(approx - exact) / exact < 2e-3

    def test_minimum_splitting_matches_eigenvalues(self, crossing_cfg):
        es = eigensystem(crossing_cfg)
        _, exact = minimum_splitting(crossing_cfg.omega1, crossing_cfg.phi)
        assert es.omega_plus - es.omega_minus == pytest.approx(exact, rel=1e-10)

    def test_transverse(self):
        w = transverse_frequency(khz(500.0), K_1064, 16e-6)
        assert to_khz(w) == pytest.approx(7.48, abs=0.01)
        assert transverse_frequency(1.0, 1.0, 1e300) < 1e-299
        assert transverse_frequency(1.0, 1.0, 2.0) == pytest.approx(transverse_frequency(1.0, 1.0, 1.0) / 2)


class TestBeta:
    def test_limits(self):
        phi = 0.3
        assert principal_axis_angle(cfg_of(1.0, 0.0, phi)) == pytest.approx(phi, abs=1e-15)
        assert principal_axis_angle(cfg_of(1.0, 1.0, phi)) == math.pi / 2
        assert principal_axis_angle(cfg_of(1.0, 1e9, phi)) == pytest.approx(math.pi - phi, abs=1e-6)

    def test_degenerate(self):
        with pytest.raises(UndefinedAngleError):
            principal_axis_angle(cfg_of(0.0, 0.0, 0.2))
        assert principal_axis_angle(cfg_of(1.0, 1.0, 0.0)) == math.pi / 2

    @given(kappas, kappas, st.floats(1e-3, math.pi / 2 - 1e-3))
    def test_tan_relation_and_range(self, k1, k2, phi):
        beta = principal_axis_angle(cfg_of(k1, k2, phi))
        assert 0.0 <= beta <= math.pi
        if abs(k1 - k2) > 1e-6 * (k1 + k2) and abs(beta - math.pi / 2) > 1e-3:
            assert math.tan(beta) == pytest.approx((k1 + k2) / (k1 - k2) * math.tan(phi), rel=1e-8)

    @given(kappas, kappas, phis)
    def test_swap_symmetry(self, k1, k2, phi):
        a = cfg_of(k1, k2, phi)
        b = cfg_of(k2, k1, phi)
        assert principal_axis_angle(b) == pytest.approx(math.pi - principal_axis_angle(a), abs=1e-12)
        np.testing.assert_allclose(eigenvalues_kappa_pm(a), eigenvalues_kappa_pm(b), rtol=1e-12)

    @pytest.mark.parametrize("phi", [0.016, 0.3, 1.0])
    def test_strictly_increasing(self, phi):
        ratios = np.logspace(-3, 3, 1000)
        betas = np.array([principal_axis_angle(cfg_of(1.0, r, phi)) for r in ratios])
        assert np.all(np.diff(betas) > 0)


class TestAxes:
    def test_bisector(self):
        e_plus, _ = principal_axes(cfg_of(1.0, 1.0, 0.1))
        np.testing.assert_allclose(e_plus, [2**-0.5, 2**-0.5])
        k1_hat, k2_hat = wave_vector_directions(0.1)
        np.testing.assert_allclose(e_plus, (k1_hat + k2_hat) / np.linalg.norm(k1_hat + k2_hat))

    def test_orthogonal_lattice(self):
        e_plus, _ = principal_axes(cfg_of(2.0, 1.0, 0.0))
        np.testing.assert_allclose(e_plus, [1.0, 0.0])

    @given(kappas, kappas, phis)
    def test_eigenvectors(self, k1, k2, phi):
        cfg = cfg_of(k1, k2, phi)
        t = build_spring_tensor(cfg)
        kp, km = eigenvalues_kappa_pm(cfg)
        e_plus, e_minus = principal_axes(cfg)
        scale = np.abs(t).max()
        np.testing.assert_allclose(t @ e_plus, kp * e_plus, atol=1e-12 * scale)
        np.testing.assert_allclose(t @ e_minus, km * e_minus, atol=1e-12 * scale)
        assert e_plus @ e_minus == pytest.approx(0.0, abs=1e-15)
        assert np.linalg.norm(e_plus) == pytest.approx(1.0)

    def test_frame_round_trip(self):
        v = np.array([0.3, -1.2])
        np.testing.assert_allclose(to_primed_frame(to_lab_frame(v, 0.2), 0.2), v)
        _, k2_hat = wave_vector_directions(0.2)
        np.testing.assert_allclose(to_lab_frame(k2_hat, 0.2), [0.0, 1.0], atol=1e-15)
        k1_hat, _ = wave_vector_directions(0.2)
        np.testing.assert_allclose(to_lab_frame(k1_hat, 0.2), [math.cos(0.2), math.sin(0.2)])


class TestProjection:
    @given(kappas, kappas, phis)
    def test_sum_to_one(self, k1, k2, phi):
        pp, pm = sideband_projection(cfg_of(k1, k2, phi))
        assert pp + pm == pytest.approx(1.0, abs=1e-14)

    def test_symmetric_small_phi(self):
        pp, pm = sideband_projection(cfg_of(1.0, 1.0, 0.016))
        assert pp == pytest.approx(0.5, abs=0.01)
        assert pm == pytest.approx(0.5, abs=0.01)

    def test_dot_product_oracle(self):
        cfg = cfg_of(1.0, 0.1, 0.016)
        w, v = np.linalg.eigh(build_spring_tensor(cfg))
        _, k2_hat = wave_vector_directions(cfg.phi)
        pm_ref, pp_ref = (v[:, 0] @ k2_hat) ** 2, (v[:, 1] @ k2_hat) ** 2
        pp, pm = sideband_projection(cfg)
        assert pp == pytest.approx(pp_ref, rel=1e-10, abs=1e-15)
        assert pm == pytest.approx(pm_ref, rel=1e-10)
        # strongly confining 1064 lattice: the upper mode barely sees k2
        assert pp < 1e-3

    def test_eigensystem_bundle(self, crossing_cfg):
        es = eigensystem(crossing_cfg)
        assert es.kappa_plus >= es.kappa_minus
        assert es.omega("+") == es.omega_plus
        assert es.projection("-") == es.proj_minus
        assert es.beta == pytest.approx(math.pi / 2)
